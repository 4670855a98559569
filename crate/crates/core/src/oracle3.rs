//! Exhaustive ground truth for the 3-line space, computed from first
//! principles on dense arrays — deliberately sharing no search machinery
//! with the database or the meet-in-the-middle code, so the two sides can
//! check each other.
//!
//! All 8! = 40,320 functions are indexed densely. Distances come from a
//! plain breadth-first sweep, optimal-circuit counts from a layered walk
//! count, and minimal quantum costs per circuit length from a dynamic
//! program whose state carries the previous gate: circuits that repeat a
//! gate back-to-back are excluded (the pair cancels — the enumerator
//! counts the same population), and a pending Toffoli or CNOT may merge
//! with a fitting neighbor for the usual two-unit discount. Merging and
//! not merging are both explored; skipping a profitable merge only ever
//! costs more, so the minimum lands on each circuit's best matching.

use crate::database::OptimalDb;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Lengths tracked per function: its distance and three above it.
pub const QC_SPAN: usize = 4;

const FUNCS: usize = 40_320;
const GATES: usize = 12;
/// Context: the previous gate (needed to rule out immediate repeats)
/// with a flag for whether it is still free to merge, plus a start state.
const CTX: usize = 2 * GATES + 1;
const START: usize = 2 * GATES;
const INF: u16 = u16::MAX;

fn ctx_free(g: usize) -> usize {
    2 * g
}

fn ctx_blocked(g: usize) -> usize {
    2 * g + 1
}

/// Gate on 3 lines for the oracle's private use.
#[derive(Clone, Copy)]
struct OGate {
    target: u8,
    controls: u8,
    qc: u16,
}

pub struct Oracle3 {
    /// Sorted packed keys; position is the dense function index.
    keys: Vec<u32>,
    dist: Vec<u8>,
    /// Number of circuits of exactly `dist` gates.
    optimal_counts: Vec<u64>,
    /// Minimal quantum cost at lengths `dist + k` (INF if unrealizable).
    min_qc: Vec<[u16; QC_SPAN]>,
}

fn pack(table: &[u8; 8]) -> u32 {
    table.iter().fold(0u32, |k, &v| (k << 3) | v as u32)
}

fn unpack(key: u32) -> [u8; 8] {
    let mut t = [0u8; 8];
    for (i, slot) in t.iter_mut().enumerate() {
        *slot = ((key >> (3 * (7 - i))) & 7) as u8;
    }
    t
}

/// The 12 gates in library order: NOT by target, then CNOT by target and
/// control, then TOFFOLI by target.
fn oracle_gates() -> Vec<OGate> {
    let mut gates = Vec::with_capacity(GATES);
    for ctrl_count in 0..=2u32 {
        for target in 0..3u8 {
            for controls in 0..8u8 {
                if controls & (1 << target) != 0
                    || controls & !0b111 != 0
                    || controls.count_ones() != ctrl_count
                {
                    continue;
                }
                let qc = if ctrl_count == 2 { 5 } else { 1 };
                gates.push(OGate { target, controls, qc });
            }
        }
    }
    assert_eq!(gates.len(), GATES);
    gates
}

/// Whether `prev` directly followed by `next` merges into one cheaper
/// gate: one of them a 2-control Toffoli, the other a CNOT touching
/// exactly the Toffoli's control lines.
fn merges(prev: &OGate, next: &OGate) -> bool {
    let (t, c) = match (prev.controls.count_ones(), next.controls.count_ones()) {
        (2, 1) => (prev, next),
        (1, 2) => (next, prev),
        _ => return false,
    };
    c.controls | (1 << c.target) == t.controls
}

impl Oracle3 {
    /// Computes the full table. A few seconds of dense array work.
    pub fn build() -> Oracle3 {
        let gates = oracle_gates();

        // Dense index: every permutation of [0, 8), keys sorted.
        let mut keys = Vec::with_capacity(FUNCS);
        let mut table = [0u8, 1, 2, 3, 4, 5, 6, 7];
        loop {
            keys.push(pack(&table));
            // next_permutation in lexicographic order
            let Some(i) = (0..7).rev().find(|&i| table[i] < table[i + 1]) else {
                break;
            };
            let j = (i + 1..8).rev().find(|&j| table[j] > table[i]).unwrap();
            table.swap(i, j);
            table[i + 1..].reverse();
        }
        assert_eq!(keys.len(), FUNCS);
        // Lexicographic generation of tables == sorted packed keys.
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));

        let index_of = |key: u32| -> usize { keys.binary_search(&key).unwrap() };

        // Gate action on dense indices: applying gate g after function f.
        let mut apply = vec![0u32; FUNCS * GATES];
        for (fi, &key) in keys.iter().enumerate() {
            let t = unpack(key);
            for (gi, g) in gates.iter().enumerate() {
                let mut out = [0u8; 8];
                for x in 0..8 {
                    let v = t[x];
                    out[x] = if v & g.controls == g.controls {
                        v ^ (1 << g.target)
                    } else {
                        v
                    };
                }
                apply[fi * GATES + gi] = index_of(pack(&out)) as u32;
            }
        }

        // Distances: breadth-first from the identity.
        let id = index_of(pack(&[0, 1, 2, 3, 4, 5, 6, 7]));
        let mut dist = vec![u8::MAX; FUNCS];
        dist[id] = 0;
        let mut frontier = vec![id as u32];
        let mut d = 0u8;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &fi in &frontier {
                for gi in 0..GATES {
                    let ni = apply[fi as usize * GATES + gi] as usize;
                    if dist[ni] == u8::MAX {
                        dist[ni] = d;
                        next.push(ni as u32);
                    }
                }
            }
            frontier = next;
        }
        let max_dist = *dist.iter().max().unwrap();
        assert!(dist.iter().all(|&x| x != u8::MAX), "space not connected");

        // Optimal-circuit counts: walks of length dist(F) from id to F.
        let mut optimal_counts = vec![0u64; FUNCS];
        optimal_counts[id] = 1;
        let mut walk = vec![0u64; FUNCS];
        walk[id] = 1;
        for len in 1..=max_dist {
            let mut next = vec![0u64; FUNCS];
            for fi in 0..FUNCS {
                let w = walk[fi];
                if w == 0 {
                    continue;
                }
                for gi in 0..GATES {
                    next[apply[fi * GATES + gi] as usize] += w;
                }
            }
            walk = next;
            for fi in 0..FUNCS {
                if dist[fi] == len {
                    optimal_counts[fi] = walk[fi];
                }
            }
        }

        // Minimal quantum cost per (function, circuit length), length up
        // to dist + 3. State: function × previous-gate context.
        let mut min_qc = vec![[INF; QC_SPAN]; FUNCS];
        let mut dp = vec![INF; FUNCS * CTX];
        dp[id * CTX + START] = 0;
        let record = |dp: &[u16], min_qc: &mut Vec<[u16; QC_SPAN]>, len: u8| {
            for fi in 0..FUNCS {
                let span = len as i16 - dist[fi] as i16;
                if !(0..QC_SPAN as i16).contains(&span) {
                    continue;
                }
                let best = dp[fi * CTX..fi * CTX + CTX].iter().copied().min().unwrap();
                min_qc[fi][span as usize] = best;
            }
        };
        record(&dp, &mut min_qc, 0);
        let mut merge_matrix = [[false; GATES]; GATES];
        for (pi, prev) in gates.iter().enumerate() {
            for (gi, g) in gates.iter().enumerate() {
                merge_matrix[pi][gi] = merges(prev, g);
            }
        }
        for len in 1..=max_dist + (QC_SPAN as u8 - 1) {
            let mut next = vec![INF; FUNCS * CTX];
            for fi in 0..FUNCS {
                for ctx in 0..CTX {
                    let cost = dp[fi * CTX + ctx];
                    if cost == INF {
                        continue;
                    }
                    let prev = (ctx != START).then_some(ctx / 2);
                    let prev_free = ctx != START && ctx % 2 == 0;
                    for (gi, g) in gates.iter().enumerate() {
                        if prev == Some(gi) {
                            // An immediate repeat cancels; such circuits
                            // are not in the counted population.
                            continue;
                        }
                        let ni = apply[fi * GATES + gi] as usize;
                        if prev_free && merge_matrix[prev.unwrap()][gi] {
                            let slot = &mut next[ni * CTX + ctx_blocked(gi)];
                            *slot = (*slot).min(cost + g.qc - 2);
                        }
                        // Leaving the pair unmerged is also a matching of
                        // the same circuit, just never a cheaper one.
                        let slot = &mut next[ni * CTX + ctx_free(gi)];
                        *slot = (*slot).min(cost + g.qc);
                    }
                }
            }
            dp = next;
            record(&dp, &mut min_qc, len);
        }

        Oracle3 { keys, dist, optimal_counts, min_qc }
    }

    fn index(&self, f: &Perm) -> usize {
        assert_eq!(f.lines(), 3, "the oracle covers 3 lines only");
        let t: Vec<u8> = f.table();
        let key = t.iter().fold(0u32, |k, &v| (k << 3) | v as u32);
        self.keys.binary_search(&key).expect("every 3-line function is indexed")
    }

    /// Exact minimal gate count.
    pub fn distance(&self, f: &Perm) -> u8 {
        self.dist[self.index(f)]
    }

    /// Number of distinct minimal-length circuits.
    pub fn optimal_count(&self, f: &Perm) -> u64 {
        self.optimal_counts[self.index(f)]
    }

    /// Minimal quantum cost over circuits of exactly `gate_count` gates
    /// (excluding circuits that repeat a gate back-to-back), tracked for
    /// `distance ≤ gate_count ≤ distance + 3`; `None` when out of that
    /// window or when no such circuit exists.
    pub fn min_qc_at(&self, f: &Perm, gate_count: u32) -> Option<u32> {
        let fi = self.index(f);
        let span = gate_count as i64 - self.dist[fi] as i64;
        if !(0..QC_SPAN as i64).contains(&span) {
            return None;
        }
        let qc = self.min_qc[fi][span as usize];
        (qc != INF).then_some(qc as u32)
    }

    /// Functions per distance; index = gate count.
    pub fn histogram(&self) -> Vec<u64> {
        let max = *self.dist.iter().max().unwrap() as usize;
        let mut h = vec![0u64; max + 1];
        for &d in &self.dist {
            h[d as usize] += 1;
        }
        h
    }

    /// The number of indexed functions (always 40,320).
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Iterates all functions (dense order) with their distances.
    pub fn functions(&self) -> impl Iterator<Item = (Perm, u8)> + '_ {
        self.keys.iter().zip(&self.dist).map(|(&k, &d)| {
            (Perm::from_table(&unpack(k)).unwrap(), d)
        })
    }

    /// Compares every function's distance against a database, which must
    /// be 3-line and deep enough to cover the whole space. Returns the
    /// disagreements (empty means the two independent computations agree).
    pub fn crosscheck(&self, db: &OptimalDb) -> Result<Vec<Disagreement>> {
        if db.lines() != 3 {
            return Err(Error::WidthMismatch(3, db.lines()));
        }
        let mut out = Vec::new();
        for (f, d) in self.functions() {
            let got = db.lookup_gc(&f);
            if got != Some(d) {
                out.push(Disagreement { function: f, oracle: d, database: got });
                if out.len() >= 100 {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// The whole table condensed to CSV: the gate-count histogram, the two
    /// quantum-cost histograms (cheapest at the minimal length, cheapest
    /// within three extra gates), and the extremal functions. Row order is
    /// fixed, so the output is byte-stable.
    pub fn csv_summary(&self) -> String {
        use std::collections::BTreeMap;

        let mut out = String::from("section,key,value,vector\n");
        for (gc, n) in self.histogram().iter().enumerate() {
            out.push_str(&format!("gc_histogram,{gc},{n},\n"));
        }

        let mut qc_at_optimal: BTreeMap<u32, u64> = BTreeMap::new();
        let mut qc_within_3: BTreeMap<u32, u64> = BTreeMap::new();
        let mut deepest: Option<Perm> = None;
        let mut most: (u64, Option<Perm>) = (0, None);
        let mut saving: (i64, Option<(Perm, u32, u32)>) = (i64::MIN, None);
        let max_d = (self.histogram().len() - 1) as u8;
        for (f, d) in self.functions() {
            let at = self
                .min_qc_at(&f, d as u32)
                .expect("the minimal length always has a circuit");
            *qc_at_optimal.entry(at).or_default() += 1;
            let best = (0..QC_SPAN as u32)
                .filter_map(|s| self.min_qc_at(&f, d as u32 + s))
                .min()
                .unwrap();
            *qc_within_3.entry(best).or_default() += 1;

            if d == max_d && deepest.is_none() {
                deepest = Some(f);
            }
            let count = self.optimal_counts[self.index(&f)];
            if count > most.0 {
                most = (count, Some(f));
            }
            if let Some(next) = self.min_qc_at(&f, d as u32 + 1) {
                let drop = at as i64 - next as i64;
                if drop > saving.0 {
                    saving = (drop, Some((f, at, next)));
                }
            }
        }
        for (qc, n) in &qc_at_optimal {
            out.push_str(&format!("qc_at_optimal_histogram,{qc},{n},\n"));
        }
        for (qc, n) in &qc_within_3 {
            out.push_str(&format!("qc_within_3_histogram,{qc},{n},\n"));
        }

        out.push_str(&format!(
            "extremal,max_gc,{max_d},\"{}\"\n",
            deepest.expect("histogram's last bin is populated")
        ));
        let (count, f) = most;
        out.push_str(&format!(
            "extremal,most_optimal_circuits,{count},\"{}\"\n",
            f.expect("counts are positive")
        ));
        let (_, hit) = saving;
        let (f, at, next) = hit.expect("some function saves cost with one extra gate");
        out.push_str(&format!(
            "extremal,best_one_gate_saving,{at}->{next},\"{f}\"\n"
        ));
        out
    }
}

/// One function the oracle and a database disagree about.
#[derive(Clone, Debug)]
pub struct Disagreement {
    pub function: Perm,
    pub oracle: u8,
    pub database: Option<u8>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::{BuildOptions, OptimalDb};
    use crate::synthesis::{EnumerationRequest, Synthesizer};
    use std::sync::OnceLock;

    fn oracle() -> &'static Oracle3 {
        static O: OnceLock<Oracle3> = OnceLock::new();
        O.get_or_init(Oracle3::build)
    }

    fn full_db() -> &'static OptimalDb {
        static DB: OnceLock<OptimalDb> = OnceLock::new();
        DB.get_or_init(|| {
            OptimalDb::build(3, &BuildOptions { depth: 8, ..Default::default() }).unwrap()
        })
    }

    #[test]
    fn covers_the_whole_space_with_max_distance_eight() {
        let o = oracle();
        assert_eq!(o.len(), 40_320);
        let h = o.histogram();
        assert_eq!(h.len(), 9);
        assert_eq!(h.iter().sum::<u64>(), 40_320);
        assert_eq!(h[0], 1);
        assert_eq!(h[1], 12);
    }

    #[test]
    fn agrees_with_the_database_everywhere() {
        let mismatches = oracle().crosscheck(full_db()).unwrap();
        assert!(mismatches.is_empty(), "first mismatches: {mismatches:?}");
    }

    #[test]
    fn optimal_counts_match_brute_force_for_short_distances() {
        use crate::gate::tables;
        use std::collections::HashMap;
        let o = oracle();
        // Count length-k walks from the identity by brute force.
        let t = tables(3);
        let mut walks: HashMap<u64, u64> = HashMap::new();
        walks.insert(crate::perm::identity_key(3), 1);
        for _ in 0..3 {
            let mut next: HashMap<u64, u64> = HashMap::new();
            for (&k, &w) in &walks {
                for gi in 0..12 {
                    *next.entry(t.apply_key(3, k, gi)).or_insert(0) += w;
                }
            }
            walks = next;
        }
        let mut checked = 0;
        for (f, d) in o.functions() {
            if d == 3 {
                assert_eq!(o.optimal_count(&f), walks[&f.key()], "f={f}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn some_function_needs_more_than_a_thousand_optimal_circuits() {
        let o = oracle();
        let max = o.functions().map(|(f, _)| o.optimal_count(&f)).max().unwrap();
        assert!(max > 1000, "max optimal-circuit count {max}");
    }

    #[test]
    fn longer_circuits_can_be_much_cheaper() {
        // Some function's minimal-length circuits all cost 24, while one
        // extra gate brings the cost down to 13.
        let o = oracle();
        let found = o.functions().any(|(f, d)| {
            o.min_qc_at(&f, d as u32) == Some(24) && o.min_qc_at(&f, d as u32 + 1) == Some(13)
        });
        assert!(found);
    }

    #[test]
    fn min_qc_matches_enumeration() {
        let o = oracle();
        let db = full_db();
        let s = Synthesizer::new(db);
        let mut checked = 0;
        let shallow: Vec<(Perm, u8)> = o.functions().filter(|&(_, d)| d <= 4).collect();
        for (f, d) in shallow.iter().step_by(shallow.len() / 24).copied() {
            for extra in 0..2u32 {
                let gc = d as u32 + extra;
                let rep = s.enumerate_all(&f, EnumerationRequest { gate_count: gc }).unwrap();
                assert_eq!(o.min_qc_at(&f, gc), rep.qc_min, "f={f} gc={gc}");
                checked += 1;
            }
        }
        assert!(checked >= 10);
    }

    #[test]
    fn identity_row_is_trivial() {
        let o = oracle();
        let id = Perm::identity(3);
        assert_eq!(o.distance(&id), 0);
        assert_eq!(o.optimal_count(&id), 1);
        assert_eq!(o.min_qc_at(&id, 0), Some(0));
        // No single gate realizes the identity; two gates only do so by
        // repeating (which cancels and is excluded), and a three-gate
        // realization would need one gate to equal the product of two
        // others, which never happens in this library.
        assert_eq!(o.min_qc_at(&id, 1), None);
        assert_eq!(o.min_qc_at(&id, 2), None);
        assert_eq!(o.min_qc_at(&id, 3), None);
    }

    #[test]
    fn csv_summary_is_stable_and_names_the_extremes() {
        let o = oracle();
        let csv = o.csv_summary();
        assert!(csv.starts_with("section,key,value,vector\n"));
        assert!(csv.contains("\ngc_histogram,0,1,\n"));
        assert!(csv.contains("\ngc_histogram,8,"));
        assert!(csv.contains("\nextremal,max_gc,8,"));
        assert!(csv.contains("\nextremal,most_optimal_circuits,"));
        // The largest one-gate saving is 11, first attained in scan order
        // by a function dropping 21 -> 10; the well-known 24 -> 13 drop
        // saves the same amount (see `longer_circuits_can_be_much_cheaper`).
        assert!(csv.contains("\nextremal,best_one_gate_saving,21->10,"));
        assert_eq!(csv, o.csv_summary(), "byte-stable across calls");
        // Histogram sections tally the whole space.
        let total: u64 = csv
            .lines()
            .filter(|l| l.starts_with("gc_histogram,"))
            .map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 40_320);
        let total: u64 = csv
            .lines()
            .filter(|l| l.starts_with("qc_at_optimal_histogram,"))
            .map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 40_320);
    }

    #[test]
    fn crosscheck_flags_a_wrong_database() {
        // A shallow database disagrees wherever its depth cuts off.
        let shallow =
            OptimalDb::build(3, &BuildOptions { depth: 2, ..Default::default() }).unwrap();
        let mismatches = oracle().crosscheck(&shallow).unwrap();
        assert!(!mismatches.is_empty());
        assert!(mismatches.iter().all(|m| m.database.is_none() && m.oracle > 2));
    }
}
