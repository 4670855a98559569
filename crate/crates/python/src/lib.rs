//! Python bindings: the module `rcsynth_py` exposes permutations, circuits,
//! cost scoring, the optimal-circuit database, and the synthesizer.
//!
//! Error mapping: malformed input raises `ValueError`, file problems raise
//! `OSError`, and queries past a database's horizon (or over its memory
//! budget) raise `RuntimeError`.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIndexError, PyOSError, PyRuntimeError, PyTypeError, PyValueError};
use pyo3::prelude::*;

use rcsynth_core::{
    BuildOptions, Circuit, EnumerationReport, EnumerationRequest, Error, OptimalDb, Perm,
    Synthesizer,
};

fn err(e: Error) -> PyErr {
    match e {
        Error::Horizon { .. } | Error::MemoryBudget { .. } | Error::NotInDatabase { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A reversible function on 3 or 4 lines, written as its output vector.
#[pyclass(name = "Perm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPerm {
    inner: Perm,
}

#[pymethods]
impl PyPerm {
    /// Accepts either the bracketed text form, e.g. "[1,0,3,2,5,7,4,6]",
    /// or a list of output values.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(text) = spec.extract::<String>() {
            return Ok(PyPerm { inner: text.parse().map_err(err)? });
        }
        if let Ok(table) = spec.extract::<Vec<u8>>() {
            return Ok(PyPerm { inner: Perm::from_table(&table).map_err(err)? });
        }
        Err(PyTypeError::new_err("expected a vector string or a list of ints"))
    }

    #[getter]
    fn lines(&self) -> u8 {
        self.inner.lines()
    }

    fn __len__(&self) -> usize {
        self.inner.points()
    }

    fn __getitem__(&self, i: usize) -> PyResult<u8> {
        if i >= self.inner.points() {
            return Err(PyIndexError::new_err(i));
        }
        Ok(self.inner.get(i))
    }

    fn table(&self) -> Vec<u8> {
        self.inner.table()
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    /// This function applied first, then `then`.
    fn compose(&self, then: &PyPerm) -> PyResult<Self> {
        if then.inner.lines() != self.inner.lines() {
            return Err(PyValueError::new_err("line counts differ"));
        }
        Ok(PyPerm { inner: self.inner.compose(&then.inner) })
    }

    fn inverse(&self) -> Self {
        PyPerm { inner: self.inner.inverse() }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Perm(\"{}\")", self.inner)
    }

    fn __eq__(&self, other: &PyPerm) -> bool {
        self.inner == other.inner
    }
}

/// A gate sequence; gates apply left to right.
#[pyclass(name = "Circuit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: Circuit,
}

#[pymethods]
impl PyCircuit {
    #[new]
    #[pyo3(signature = (text, n = 4))]
    fn new(text: &str, n: u8) -> PyResult<Self> {
        Ok(PyCircuit { inner: Circuit::parse(text, n).map_err(err)? })
    }

    #[getter]
    fn lines(&self) -> u8 {
        self.inner.lines()
    }

    #[getter]
    fn gate_count(&self) -> usize {
        self.inner.len()
    }

    fn simulate(&self, input: u8) -> PyResult<u8> {
        self.inner.simulate(input).map_err(err)
    }

    fn to_perm(&self) -> PyPerm {
        PyPerm { inner: self.inner.to_perm() }
    }

    fn reversed(&self) -> PyCircuit {
        PyCircuit { inner: self.inner.reversed() }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Circuit(\"{}\", n={})", self.inner, self.inner.lines())
    }

    fn __eq__(&self, other: &PyCircuit) -> bool {
        self.inner == other.inner
    }
}

/// Gate count and quantum cost of one circuit.
#[pyclass(name = "CostReport", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCostReport {
    #[pyo3(get)]
    gate_count: u32,
    /// Cost before merging adjacent Toffoli/CNOT pairs.
    #[pyo3(get)]
    raw_qc: u32,
    /// Cost after subtracting 2 per merged pair.
    #[pyo3(get)]
    qc: u32,
    /// The circuit text with merged pairs in angle brackets.
    #[pyo3(get)]
    marked: String,
}

#[pymethods]
impl PyCostReport {
    fn __repr__(&self) -> String {
        format!(
            "CostReport(gate_count={}, raw_qc={}, qc={}, marked=\"{}\")",
            self.gate_count, self.raw_qc, self.qc, self.marked
        )
    }
}

/// Scores a circuit: gate count and quantum cost after pair merging.
#[pyfunction]
fn quantum_cost(c: &PyCircuit) -> PyCostReport {
    let rep = rcsynth_core::quantum_cost(&c.inner);
    PyCostReport {
        gate_count: rep.gate_count,
        raw_qc: rep.raw_qc,
        qc: rep.qc,
        marked: rep.marked(&c.inner),
    }
}

/// Breadth-first database of minimal gate counts up to its depth.
#[pyclass(name = "Database", frozen)]
struct PyDatabase {
    inner: Arc<OptimalDb>,
}

#[pymethods]
impl PyDatabase {
    #[staticmethod]
    #[pyo3(signature = (lines, depth, memory_budget = None, progress = false))]
    fn build(lines: u8, depth: u8, memory_budget: Option<u64>, progress: bool) -> PyResult<Self> {
        let mut opts = BuildOptions { depth, progress, ..Default::default() };
        if let Some(budget) = memory_budget {
            opts.memory_budget = budget;
        }
        let db = OptimalDb::build(lines, &opts).map_err(err)?;
        Ok(PyDatabase { inner: Arc::new(db) })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyDatabase { inner: Arc::new(OptimalDb::load(&path).map_err(err)?) })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(err)
    }

    #[getter]
    fn lines(&self) -> u8 {
        self.inner.lines()
    }

    #[getter]
    fn depth(&self) -> u8 {
        self.inner.depth()
    }

    /// Number of canonical classes stored.
    fn __len__(&self) -> usize {
        self.inner.len() as usize
    }

    fn info(&self) -> String {
        self.inner.info().to_string()
    }

    /// Minimal gate count when the function is within the depth, else None.
    fn lookup_gc(&self, f: &PyPerm) -> PyResult<Option<u8>> {
        if f.inner.lines() != self.inner.lines() {
            return Err(PyValueError::new_err("line counts differ"));
        }
        Ok(self.inner.lookup_gc(&f.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "Database(lines={}, depth={}, classes={})",
            self.inner.lines(),
            self.inner.depth(),
            self.inner.len()
        )
    }
}

/// Aggregates over every circuit of one exact gate count realizing one
/// function.
#[pyclass(name = "Enumeration", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnumeration {
    #[pyo3(get)]
    gate_count: u32,
    #[pyo3(get)]
    count: u64,
    #[pyo3(get)]
    qc_min: Option<u32>,
    #[pyo3(get)]
    qc_max: Option<u32>,
    /// The first cheapest circuit in enumeration order.
    #[pyo3(get)]
    witness: Option<PyCircuit>,
}

#[pymethods]
impl PyEnumeration {
    fn __repr__(&self) -> String {
        format!(
            "Enumeration(gate_count={}, count={}, qc_min={:?}, qc_max={:?})",
            self.gate_count, self.count, self.qc_min, self.qc_max
        )
    }
}

impl From<EnumerationReport> for PyEnumeration {
    fn from(rep: EnumerationReport) -> PyEnumeration {
        PyEnumeration {
            gate_count: rep.gate_count,
            count: rep.count,
            qc_min: rep.qc_min,
            qc_max: rep.qc_max,
            witness: rep.witness.map(|inner| PyCircuit { inner }),
        }
    }
}

/// Result of scanning a range of gate counts for the cheapest circuit.
#[pyclass(name = "Minimization", frozen)]
struct PyMinimization {
    #[pyo3(get)]
    optimal_gc: u32,
    #[pyo3(get)]
    best_qc: u32,
    #[pyo3(get)]
    best: PyCircuit,
    /// One Enumeration per gate count, starting at optimal_gc.
    #[pyo3(get)]
    reports: Vec<PyEnumeration>,
}

#[pymethods]
impl PyMinimization {
    fn __repr__(&self) -> String {
        format!(
            "Minimization(optimal_gc={}, best_qc={}, best=\"{}\")",
            self.optimal_gc, self.best_qc, self.best.inner
        )
    }
}

/// Distance queries, optimal synthesis, enumeration, and cost minimization
/// over one database. Each call is self-contained; batch-scale work is
/// better served by the `rcsynth` command-line tool, which keeps its
/// distance cache warm across queries.
#[pyclass(name = "Synthesizer", frozen)]
struct PySynthesizer {
    db: Arc<OptimalDb>,
}

#[pymethods]
impl PySynthesizer {
    #[new]
    fn new(db: &PyDatabase) -> Self {
        PySynthesizer { db: Arc::clone(&db.inner) }
    }

    /// Exact minimal gate count, up to twice the database depth.
    fn optimal_gc(&self, f: &PyPerm) -> PyResult<u32> {
        self.check(f)?;
        Synthesizer::new(&self.db).optimal_gc(&f.inner).map_err(err)
    }

    /// One gate-count-optimal circuit.
    fn synthesize(&self, f: &PyPerm) -> PyResult<PyCircuit> {
        self.check(f)?;
        let c = Synthesizer::new(&self.db).synthesize_one(&f.inner).map_err(err)?;
        Ok(PyCircuit { inner: c })
    }

    /// Every circuit of exactly `gate_count` gates, aggregated.
    fn enumerate(&self, f: &PyPerm, gate_count: u32) -> PyResult<PyEnumeration> {
        self.check(f)?;
        let rep = Synthesizer::new(&self.db)
            .enumerate_all(&f.inner, EnumerationRequest { gate_count })
            .map_err(err)?;
        Ok(rep.into())
    }

    /// Scans gate counts from the optimum to `slack` above it and returns
    /// the cheapest circuit found anywhere in the range.
    fn qc_minimize(&self, f: &PyPerm, slack: u32) -> PyResult<PyMinimization> {
        self.check(f)?;
        let r = Synthesizer::new(&self.db).qc_minimize(&f.inner, slack).map_err(err)?;
        Ok(PyMinimization {
            optimal_gc: r.optimal_gc,
            best_qc: r.best_qc,
            best: PyCircuit { inner: r.best },
            reports: r.reports.into_iter().map(PyEnumeration::from).collect(),
        })
    }
}

impl PySynthesizer {
    fn check(&self, f: &PyPerm) -> PyResult<()> {
        if f.inner.lines() != self.db.lines() {
            return Err(PyValueError::new_err("line counts differ"));
        }
        Ok(())
    }
}

#[pymodule]
fn rcsynth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPerm>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyCostReport>()?;
    m.add_class::<PyDatabase>()?;
    m.add_class::<PyEnumeration>()?;
    m.add_class::<PyMinimization>()?;
    m.add_class::<PySynthesizer>()?;
    m.add_function(wrap_pyfunction!(quantum_cost, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
