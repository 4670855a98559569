//! Synthesis toolkit for reversible circuits on 3 or 4 lines over the
//! NOT / CNOT / TOFFOLI gate library (Toffoli gates with 2 or 3 controls).
//!
//! The toolkit finds gate-count-optimal circuits for a given reversible
//! function, enumerates *all* circuits of a given length that realize it,
//! and minimizes quantum cost across those circuits, exploiting the fact
//! that slightly longer circuits often have markedly cheaper quantum cost.
//!
//! The workhorse is a breadth-first database of canonical representatives
//! ([`OptimalDb`]): every function is reduced to the lexicographically
//! smallest member of its input/output-relabeling class (optionally
//! inverted), and only class representatives are stored, keyed by packed
//! output vector. Longer circuits are reached by meeting in the middle.

pub mod benchmarks;
pub mod canonical;
pub mod circuit;
pub mod cost;
pub mod database;
pub mod error;
pub mod gate;
pub mod oracle3;
pub mod perm;
pub mod synthesis;

pub use benchmarks::{
    embedded_suite, improvement_table, load_suite, parse_suite, run_suite, serialize_suite,
    BenchmarkCase, BenchmarkGroup, BenchmarkRow, CaseSummary, PriorResult, RowOutcome, RowResult,
    RunFilters, SuiteResult,
};
pub use canonical::{CanonicalForm, Relabeling};
pub use circuit::Circuit;
pub use cost::{gate_count, gate_qc, peres_pairable, quantum_cost, CostReport};
pub use database::{BuildOptions, DbInfo, OptimalDb};
pub use error::{Error, Result};
pub use gate::{Gate, GateId, GateKind};
pub use oracle3::{Disagreement, Oracle3};
pub use perm::Perm;
pub use synthesis::{EnumerationReport, EnumerationRequest, QcMinimization, Synthesizer};
