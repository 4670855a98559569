//! The embedded benchmark suite and the harness that re-derives its rows.
//!
//! Benchmark data lives in a plain-text file (see `data/benchmarks.txt`),
//! not in code: a transcription fix is a data edit. Each case names a
//! function, the best previously published circuit for it, and one row
//! per enumerated gate count giving the quantum-cost extremes and the
//! exact number of circuits. The harness replays rows through
//! [`Synthesizer::enumerate_all`] and demands exact agreement — a row
//! either matches, mismatches loudly, or is skipped for a stated reason.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::synthesis::{EnumerationReport, EnumerationRequest, Synthesizer};
use std::fmt;
use std::time::{Duration, Instant};

/// A row is too big for interactive runs past either of these marks.
pub const HEAVY_COUNT: u64 = 1_000_000;
pub const HEAVY_GC: u32 = 13;

/// Which comparison family a case belongs to. The `Peres` group's prior
/// costs come from a search restricted to Peres-gate compositions, so
/// improvement summaries leave it out of their averages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchmarkGroup {
    Size15,
    Classic,
    Revlib,
    Peres,
}

impl BenchmarkGroup {
    fn parse(s: &str) -> Option<BenchmarkGroup> {
        Some(match s {
            "size15" => BenchmarkGroup::Size15,
            "classic" => BenchmarkGroup::Classic,
            "revlib" => BenchmarkGroup::Revlib,
            "peres" => BenchmarkGroup::Peres,
            _ => return None,
        })
    }

    fn token(self) -> &'static str {
        match self {
            BenchmarkGroup::Size15 => "size15",
            BenchmarkGroup::Classic => "classic",
            BenchmarkGroup::Revlib => "revlib",
            BenchmarkGroup::Peres => "peres",
        }
    }
}

/// Best previously published circuit for a case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorResult {
    pub gate_count: u32,
    pub qc: u32,
    pub source: String,
}

/// One expected enumeration outcome: over all circuits of exactly
/// `gate_count` gates, the quantum-cost range and the circuit count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkRow {
    pub gate_count: u32,
    pub qc_min: u32,
    pub qc_max: u32,
    pub count: u64,
    /// Known transcription defect; run only on explicit request and
    /// never counted as a failure.
    pub suspect: bool,
}

impl BenchmarkRow {
    /// Too big for interactive validation.
    pub fn heavy(&self) -> bool {
        self.count > HEAVY_COUNT || self.gate_count >= HEAVY_GC
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkCase {
    pub name: String,
    pub group: BenchmarkGroup,
    pub vector: Perm,
    pub prior: Option<PriorResult>,
    pub rows: Vec<BenchmarkRow>,
    pub notes: Vec<String>,
}

impl BenchmarkCase {
    /// A case is heavy when none of its rows can run interactively.
    pub fn heavy(&self) -> bool {
        self.rows.iter().all(|r| r.heavy())
    }
}

fn suite_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::BadSuite(format!("line {line}: {msg}"))
}

/// Parses suite text. Format: `#` comments and blank lines are ignored;
/// each `name = x` opens a case; `group`, `vector`, `prior`, `row`, and
/// `note` lines fill it in. Errors carry 1-based line numbers.
pub fn parse_suite(text: &str) -> Result<Vec<BenchmarkCase>> {
    struct Draft {
        name: String,
        line: usize,
        group: Option<BenchmarkGroup>,
        vector: Option<Perm>,
        prior: Option<PriorResult>,
        rows: Vec<BenchmarkRow>,
        notes: Vec<String>,
    }
    let finish = |d: Draft| -> Result<BenchmarkCase> {
        let vector = d
            .vector
            .ok_or_else(|| suite_err(d.line, format!("case `{}` has no vector", d.name)))?;
        for pair in d.rows.windows(2) {
            if pair[1].gate_count <= pair[0].gate_count {
                return Err(suite_err(
                    d.line,
                    format!("case `{}`: row gate counts must strictly increase", d.name),
                ));
            }
        }
        Ok(BenchmarkCase {
            name: d.name,
            group: d.group.unwrap_or(BenchmarkGroup::Classic),
            vector,
            prior: d.prior,
            rows: d.rows,
            notes: d.notes,
        })
    };

    let mut cases: Vec<BenchmarkCase> = Vec::new();
    let mut draft: Option<Draft> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| suite_err(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "name" {
            if value.is_empty() || value.split_whitespace().count() != 1 {
                return Err(suite_err(line, "a name is one whitespace-free token"));
            }
            if let Some(d) = draft.take() {
                cases.push(finish(d)?);
            }
            if cases.iter().any(|c| c.name == value) {
                return Err(suite_err(line, format!("duplicate case name `{value}`")));
            }
            draft = Some(Draft {
                name: value.to_string(),
                line,
                group: None,
                vector: None,
                prior: None,
                rows: Vec::new(),
                notes: Vec::new(),
            });
            continue;
        }
        let d = draft
            .as_mut()
            .ok_or_else(|| suite_err(line, format!("`{key}` before any `name`")))?;
        match key {
            "group" => {
                let g = BenchmarkGroup::parse(value)
                    .ok_or_else(|| suite_err(line, format!("unknown group `{value}`")))?;
                d.group = Some(g);
            }
            "vector" => {
                let v: Perm = value.parse().map_err(|e| {
                    suite_err(line, format!("case `{}`: bad vector: {e}", d.name))
                })?;
                if d.vector.replace(v).is_some() {
                    return Err(suite_err(line, format!("case `{}`: second vector", d.name)));
                }
            }
            "prior" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let [gc, qc, source] = parts.as_slice() else {
                    return Err(suite_err(line, "prior takes `<gc> <qc> <source>`"));
                };
                let parse_u32 = |s: &str| -> Result<u32> {
                    s.parse().map_err(|_| suite_err(line, format!("`{s}` is not a number")))
                };
                d.prior = Some(PriorResult {
                    gate_count: parse_u32(gc)?,
                    qc: parse_u32(qc)?,
                    source: source.to_string(),
                });
            }
            "row" => {
                let mut parts: Vec<&str> = value.split_whitespace().collect();
                let suspect = parts.last() == Some(&"suspect");
                if suspect {
                    parts.pop();
                }
                let [gc, qc_min, qc_max, count] = parts.as_slice() else {
                    return Err(suite_err(
                        line,
                        "row takes `<gc> <qc_min> <qc_max> <count> [suspect]`",
                    ));
                };
                let num = |s: &str| -> Result<u64> {
                    s.parse().map_err(|_| suite_err(line, format!("`{s}` is not a number")))
                };
                let row = BenchmarkRow {
                    gate_count: num(gc)? as u32,
                    qc_min: num(qc_min)? as u32,
                    qc_max: num(qc_max)? as u32,
                    count: num(count)?,
                    suspect,
                };
                if row.qc_min > row.qc_max {
                    return Err(suite_err(line, "qc_min exceeds qc_max"));
                }
                d.rows.push(row);
            }
            "note" => d.notes.push(value.to_string()),
            other => return Err(suite_err(line, format!("unknown key `{other}`"))),
        }
    }
    if let Some(d) = draft.take() {
        cases.push(finish(d)?);
    }
    Ok(cases)
}

/// Loads a suite from a file.
pub fn load_suite(path: impl AsRef<std::path::Path>) -> Result<Vec<BenchmarkCase>> {
    parse_suite(&std::fs::read_to_string(path)?)
}

/// Renders cases back into the suite format. `parse_suite` of the output
/// yields the same cases (comments and layout are not preserved).
pub fn serialize_suite(cases: &[BenchmarkCase]) -> String {
    let mut out = String::new();
    for c in cases {
        out.push_str(&format!("name   = {}\n", c.name));
        out.push_str(&format!("group  = {}\n", c.group.token()));
        out.push_str(&format!("vector = {}\n", c.vector));
        if let Some(p) = &c.prior {
            out.push_str(&format!("prior  = {} {} {}\n", p.gate_count, p.qc, p.source));
        }
        for r in &c.rows {
            let flag = if r.suspect { " suspect" } else { "" };
            out.push_str(&format!(
                "row    = {} {} {} {}{flag}\n",
                r.gate_count, r.qc_min, r.qc_max, r.count
            ));
        }
        for n in &c.notes {
            out.push_str(&format!("note   = {n}\n"));
        }
        out.push('\n');
    }
    out
}

/// The suite shipped with the crate: forty 4-line functions spanning the
/// largest cost-equivalence classes, classic benchmarks, library designs,
/// and a Peres-search comparison set.
pub fn embedded_suite() -> Vec<BenchmarkCase> {
    parse_suite(include_str!("../data/benchmarks.txt"))
        .expect("the embedded suite always parses")
}

/// Row selection for a run. Everything defaults to permissive except the
/// heavy and suspect gates, which must be opted into.
#[derive(Clone, Debug, Default)]
pub struct RunFilters {
    /// Skip rows whose gate count exceeds this.
    pub max_gc: Option<u32>,
    /// Skip rows whose expected circuit count exceeds this.
    pub max_count: Option<u64>,
    /// Stop starting new rows once this much wall time has elapsed.
    pub time_limit: Option<Duration>,
    /// Run rows flagged heavy (count > 10⁶ or gc ≥ 13).
    pub include_heavy: bool,
    /// Run rows flagged suspect in the data.
    pub include_suspect: bool,
    /// Restrict to these case names (all cases when empty).
    pub names: Vec<String>,
}

/// What happened to one expected row.
#[derive(Clone, Debug)]
pub enum RowOutcome {
    /// Enumeration reproduced the row exactly.
    Matched(EnumerationReport),
    /// Enumeration finished but disagreed.
    Mismatched(EnumerationReport),
    /// Not run; the string says why.
    Skipped(String),
    /// The run failed (for instance, past the database horizon).
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct RowResult {
    pub case: String,
    pub expected: BenchmarkRow,
    pub outcome: RowOutcome,
    pub elapsed: Duration,
}

/// Per-case rollup used by the improvement table.
#[derive(Clone, Debug)]
pub struct CaseSummary {
    pub name: String,
    pub group: BenchmarkGroup,
    pub prior: Option<PriorResult>,
    /// Cheapest quantum cost any completed row produced.
    pub best_qc: Option<u32>,
    /// The circuit achieving `best_qc`.
    pub best_circuit: Option<Circuit>,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    pub rows: Vec<RowResult>,
    pub cases: Vec<CaseSummary>,
}

impl SuiteResult {
    pub fn matched(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.outcome, RowOutcome::Matched(_))).count()
    }

    pub fn mismatched(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.outcome, RowOutcome::Mismatched(_))).count()
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.outcome, RowOutcome::Failed(_))).count()
    }

    pub fn skipped(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.outcome, RowOutcome::Skipped(_))).count()
    }

    /// True when every row that ran reproduced its expected values.
    pub fn clean(&self) -> bool {
        self.mismatched() == 0 && self.failed() == 0
    }

    /// Fixed-column report, one line per row.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:>3} {:>7} {:>7} {:>10}  {:<9} {:>8}  detail\n",
            "case", "gc", "qc_min", "qc_max", "count", "status", "time"
        ));
        for r in &self.rows {
            let e = &r.expected;
            let (status, detail) = match &r.outcome {
                RowOutcome::Matched(_) => ("ok".to_string(), String::new()),
                RowOutcome::Mismatched(got) => (
                    "MISMATCH".to_string(),
                    format!(
                        "got qc {}..{} count {}",
                        got.qc_min.map_or("-".into(), |v| v.to_string()),
                        got.qc_max.map_or("-".into(), |v| v.to_string()),
                        got.count
                    ),
                ),
                RowOutcome::Skipped(why) => ("skipped".to_string(), why.clone()),
                RowOutcome::Failed(why) => ("FAILED".to_string(), why.clone()),
            };
            out.push_str(&format!(
                "{:<16} {:>3} {:>7} {:>7} {:>10}  {:<9} {:>7.1}s  {}\n",
                r.case,
                e.gate_count,
                e.qc_min,
                e.qc_max,
                e.count,
                status,
                r.elapsed.as_secs_f64(),
                detail
            ));
        }
        out.push_str(&format!(
            "{} matched, {} mismatched, {} failed, {} skipped\n",
            self.matched(),
            self.mismatched(),
            self.failed(),
            self.skipped()
        ));
        out
    }

    /// The same report as comma-separated values.
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "case,gate_count,exp_qc_min,exp_qc_max,exp_count,status,got_qc_min,got_qc_max,got_count,seconds\n",
        );
        for r in &self.rows {
            let e = &r.expected;
            let (status, got) = match &r.outcome {
                RowOutcome::Matched(g) => ("ok", Some(g)),
                RowOutcome::Mismatched(g) => ("mismatch", Some(g)),
                RowOutcome::Skipped(_) => ("skipped", None),
                RowOutcome::Failed(_) => ("failed", None),
            };
            let opt = |v: Option<u32>| v.map_or(String::new(), |x| x.to_string());
            let (gmin, gmax, gcount) = match got {
                Some(g) => (opt(g.qc_min), opt(g.qc_max), g.count.to_string()),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{:.3}\n",
                r.case,
                e.gate_count,
                e.qc_min,
                e.qc_max,
                e.count,
                status,
                gmin,
                gmax,
                gcount,
                r.elapsed.as_secs_f64()
            ));
        }
        out
    }
}

/// Replays suite rows through exhaustive enumeration and compares each
/// against its expected values. Rows outside the filters are skipped
/// with a reason; enumeration errors are recorded, never fatal.
pub fn run_suite(
    syn: &Synthesizer<'_>,
    suite: &[BenchmarkCase],
    filters: &RunFilters,
) -> SuiteResult {
    let started = Instant::now();
    let mut result = SuiteResult::default();
    for case in suite {
        if !filters.names.is_empty() && !filters.names.iter().any(|n| n == &case.name) {
            continue;
        }
        let mut summary = CaseSummary {
            name: case.name.clone(),
            group: case.group,
            prior: case.prior.clone(),
            best_qc: None,
            best_circuit: None,
        };
        for row in &case.rows {
            let skip_reason = if row.suspect && !filters.include_suspect {
                Some("suspect transcription".to_string())
            } else if row.heavy() && !filters.include_heavy {
                Some(format!(
                    "heavy row ({} circuits at {} gates)",
                    row.count, row.gate_count
                ))
            } else if filters.max_gc.is_some_and(|m| row.gate_count > m) {
                Some("gate count above filter".to_string())
            } else if filters.max_count.is_some_and(|m| row.count > m) {
                Some("expected count above filter".to_string())
            } else if filters.time_limit.is_some_and(|l| started.elapsed() > l) {
                Some("time limit reached".to_string())
            } else if case.vector.lines() != syn.database().lines() {
                Some(format!(
                    "{}-line case, {}-line database",
                    case.vector.lines(),
                    syn.database().lines()
                ))
            } else {
                None
            };
            if let Some(why) = skip_reason {
                result.rows.push(RowResult {
                    case: case.name.clone(),
                    expected: row.clone(),
                    outcome: RowOutcome::Skipped(why),
                    elapsed: Duration::ZERO,
                });
                continue;
            }
            let t = Instant::now();
            let req = EnumerationRequest { gate_count: row.gate_count };
            let outcome = match syn.enumerate_all(&case.vector, req) {
                Ok(report) => {
                    let hit = report.count == row.count
                        && report.qc_min == Some(row.qc_min)
                        && report.qc_max == Some(row.qc_max);
                    if hit {
                        if summary.best_qc.is_none_or(|b| row.qc_min < b) {
                            summary.best_qc = Some(row.qc_min);
                            summary.best_circuit = report.witness.clone();
                        }
                        RowOutcome::Matched(report)
                    } else {
                        RowOutcome::Mismatched(report)
                    }
                }
                Err(e) => RowOutcome::Failed(e.to_string()),
            };
            result.rows.push(RowResult {
                case: case.name.clone(),
                expected: row.clone(),
                outcome,
                elapsed: t.elapsed(),
            });
        }
        result.cases.push(summary);
    }
    result
}

/// Renders the cost-improvement summary: per case, the best previously
/// published quantum cost against the best this run computed, the saving,
/// and the saving as a percentage of the prior cost. The closing line
/// averages over the included cases (those with both a prior and a
/// computed best); the percentage there is the ratio of the averages.
/// The `peres` group is listed but left out of the averages, since its
/// priors came from a differently restricted search.
pub fn improvement_table(result: &SuiteResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:>10} {:<7} {:>8} {:>6} {:>7}\n",
        "case", "best known", "source", "our best", "saved", "% impr."
    ));
    let mut n = 0u32;
    let mut prior_sum = 0u64;
    let mut ours_sum = 0u64;
    for c in &result.cases {
        let Some(prior) = &c.prior else { continue };
        let (ours, delta, pct) = match c.best_qc {
            Some(b) => {
                let delta = prior.qc as i64 - b as i64;
                (b.to_string(), delta, 100.0 * delta as f64 / prior.qc as f64)
            }
            None => ("-".to_string(), 0, 0.0),
        };
        let headline = c.group != BenchmarkGroup::Peres && c.best_qc.is_some();
        if headline {
            n += 1;
            prior_sum += prior.qc as u64;
            ours_sum += c.best_qc.unwrap() as u64;
        }
        out.push_str(&format!(
            "{:<16} {:>10} {:<7} {:>8} {:>6} {:>7.1}{}\n",
            c.name,
            prior.qc,
            prior.source,
            ours,
            -delta,
            pct,
            if headline { "" } else { "  (not averaged)" }
        ));
    }
    if n > 0 {
        let prior_avg = prior_sum as f64 / n as f64;
        let ours_avg = ours_sum as f64 / n as f64;
        let delta_avg = prior_avg - ours_avg;
        out.push_str(&format!(
            "{:<16} {:>10.1} {:<7} {:>8.1} {:>6.1} {:>7.1}\n",
            "average:",
            prior_avg,
            "",
            ours_avg,
            -delta_avg,
            100.0 * delta_avg / prior_avg
        ));
    }
    out
}
