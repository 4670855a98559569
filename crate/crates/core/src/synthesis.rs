//! Search on top of the database: exact distances past the stored depth,
//! exhaustive same-length enumeration, quantum-cost minimization.
//!
//! A database of depth *D* answers distances up to *D* by lookup. Meeting
//! in the middle doubles the reach: `f` needs at most `b` gates
//! (`D < b ≤ 2D`) exactly when some function `P` needing exactly `b − D`
//! gates leaves a remainder `P⁻¹∘f` that the database knows. The scan runs
//! over every class member at that single level, testing remainders by
//! canonical lookup, so no member list is needed on the remainder side.
//!
//! Enumeration walks the prefix tree of gate sequences depth-first,
//! descending only into children whose remainder is still finishable in
//! the gates that remain — the distance test above used as an exact
//! pruning oracle. Every counted sequence of the requested length is
//! visited exactly once, in lexicographic order of gate indices, with
//! nothing else explored.
//!
//! A sequence in which some gate immediately repeats is not counted:
//! every library gate is an involution, so such a pair cancels and the
//! sequence is a padded rewrite of a circuit two gates shorter. All
//! other sequences count, including reorderings of one another.

use std::sync::OnceLock;

use dashmap::DashMap;
use rayon::prelude::*;

use crate::canonical::{canon_key, member_keys, relabeling_count};
use crate::circuit::Circuit;
use crate::cost::{gate_qc, peres_pairable};
use crate::database::OptimalDb;
use crate::error::{Error, Result};
use crate::gate::{gate_library, tables, GateId};
use crate::perm::{self, Perm};

/// Caching distances costs 8 bytes per class member; past this many
/// members a level is rescanned from the representatives instead.
const CACHE_CAP: u64 = 8_000_000;

/// What to enumerate: all realizations of a fixed gate count.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationRequest {
    pub gate_count: u32,
}

/// Aggregates over every circuit of one exact gate count realizing one
/// function.
#[derive(Clone, Debug)]
pub struct EnumerationReport {
    pub gate_count: u32,
    /// Distinct gate sequences of this length realizing the function,
    /// excluding any in which a gate immediately repeats (those cancel).
    pub count: u64,
    /// Cheapest quantum cost seen, when `count > 0`.
    pub qc_min: Option<u32>,
    /// Costliest quantum cost seen, when `count > 0`.
    pub qc_max: Option<u32>,
    /// The first circuit in enumeration order attaining `qc_min`.
    pub witness: Option<Circuit>,
}

/// Result of scanning a range of gate counts for the cheapest circuit.
#[derive(Clone, Debug)]
pub struct QcMinimization {
    pub optimal_gc: u32,
    /// One report per gate count, starting at `optimal_gc`.
    pub reports: Vec<EnumerationReport>,
    /// Cheapest quantum cost across the whole range, with its circuit.
    pub best_qc: u32,
    pub best: Circuit,
}

/// Distance queries, enumeration, and cost minimization over one database.
pub struct Synthesizer<'a> {
    db: &'a OptimalDb,
    n: u8,
    /// canonical key → (lower, upper) bounds on its distance, grown
    /// monotonically by every query that learns something.
    memo: DashMap<u64, (u8, u8)>,
    /// Per level: inverse keys of every class member, built on first use.
    member_inv: Vec<OnceLock<Box<[u64]>>>,
    /// Per gate id: quantum cost.
    id_qc: Vec<u32>,
    /// Flattened gate-pair mergeability matrix, `a * lib + b`.
    id_pairable: Vec<bool>,
}

impl<'a> Synthesizer<'a> {
    pub fn new(db: &'a OptimalDb) -> Synthesizer<'a> {
        let n = db.lines();
        let lib = gate_library(n);
        let id_qc = lib.iter().map(gate_qc).collect();
        let id_pairable = lib
            .iter()
            .flat_map(|a| lib.iter().map(move |b| peres_pairable(a, b)))
            .collect();
        Synthesizer {
            db,
            n,
            memo: DashMap::new(),
            member_inv: (0..=db.depth()).map(|_| OnceLock::new()).collect(),
            id_qc,
            id_pairable,
        }
    }

    pub fn database(&self) -> &OptimalDb {
        self.db
    }

    fn horizon(&self) -> u32 {
        2 * self.db.depth() as u32
    }

    /// Inverse keys of every member at `level`, cached when small enough.
    fn cached_members_inv(&self, level: u8) -> Option<&[u64]> {
        let reps = self.db.level_keys(level);
        let projected = reps.len() as u64 * relabeling_count(self.n) as u64;
        if projected > CACHE_CAP {
            return None;
        }
        Some(self.member_inv[level as usize].get_or_init(|| {
            let per_rep: Vec<Vec<u64>> = reps
                .par_iter()
                .map(|&rk| {
                    member_keys(self.n, rk)
                        .into_iter()
                        .map(|m| perm::invert_key(self.n, m))
                        .collect()
                })
                .collect();
            per_rep.concat().into_boxed_slice()
        }))
    }

    /// True when some `P` needing exactly `level` gates has `P⁻¹∘f` in the
    /// database — i.e. `d(f) ≤ level + depth`.
    fn scan_level(&self, level: u8, fkey: u64) -> bool {
        let test = |pinv: u64| {
            let s = perm::compose_key(self.n, pinv, fkey);
            self.db.lookup_key(canon_key(self.n, s).0).is_some()
        };
        match self.cached_members_inv(level) {
            Some(members) => members.par_iter().any(|&pinv| test(pinv)),
            None => self.db.level_keys(level).par_iter().any(|&rk| {
                member_keys(self.n, rk)
                    .into_iter()
                    .any(|m| test(perm::invert_key(self.n, m)))
            }),
        }
    }

    fn distance_at_most_key(&self, key: u64, bound: u32) -> Result<bool> {
        let (ck, _) = canon_key(self.n, key);
        if let Some(gc) = self.db.lookup_key(ck) {
            return Ok(gc as u32 <= bound);
        }
        let depth = self.db.depth() as u32;
        if bound <= depth {
            return Ok(false);
        }
        if bound > self.horizon() {
            return Err(Error::Horizon {
                bound,
                horizon: self.horizon(),
                depth: self.db.depth(),
            });
        }
        if let Some(e) = self.memo.get(&ck) {
            let (lo, hi) = *e;
            if (hi as u32) <= bound {
                return Ok(true);
            }
            if (lo as u32) > bound {
                return Ok(false);
            }
        }
        let hit = self.scan_level((bound - depth) as u8, key);
        let mut e = self.memo.entry(ck).or_insert((0, u8::MAX));
        if hit {
            e.1 = e.1.min(bound as u8);
        } else {
            e.0 = e.0.max(bound as u8 + 1);
        }
        Ok(hit)
    }

    /// Whether `f` is realizable with at most `bound` gates. Errors with
    /// [`Error::Horizon`] when `bound` exceeds twice the database depth
    /// and the answer is not already decided by lookup.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn distance_at_most(&self, f: &Perm, bound: u32) -> Result<bool> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        self.distance_at_most_key(f.key(), bound)
    }

    /// Exact minimal gate count of `f`, up to twice the database depth.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn optimal_gc(&self, f: &Perm) -> Result<u32> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        if let Some(gc) = self.db.lookup_gc(f) {
            return Ok(gc as u32);
        }
        let depth = self.db.depth() as u32;
        for bound in depth + 1..=self.horizon() {
            if self.distance_at_most_key(f.key(), bound)? {
                return Ok(bound);
            }
        }
        Err(Error::Horizon {
            bound: self.horizon() + 1,
            horizon: self.horizon(),
            depth: self.db.depth(),
        })
    }

    /// One minimal circuit for `f`, reaching past the database depth by
    /// splitting the function at the meet-in-the-middle level.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn synthesize_one(&self, f: &Perm) -> Result<Circuit> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        if self.db.lookup_gc(f).is_some() {
            return self.db.synthesize(f);
        }
        let d = self.optimal_gc(f)?;
        let level = (d - self.db.depth() as u32) as u8;
        let fkey = f.key();

        let split = |pinv: u64| -> Option<(u64, u64)> {
            let skey = perm::compose_key(self.n, pinv, fkey);
            self.db
                .lookup_key(canon_key(self.n, skey).0)
                .map(|_| (perm::invert_key(self.n, pinv), skey))
        };
        let found = match self.cached_members_inv(level) {
            Some(members) => members.par_iter().copied().find_map_first(split),
            None => self
                .db
                .level_keys(level)
                .par_iter()
                .find_map_first(|&rk| {
                    member_keys(self.n, rk)
                        .into_iter()
                        .find_map(|m| split(perm::invert_key(self.n, m)))
                }),
        };
        let (pkey, skey) = found.ok_or(Error::CorruptDb(
            "distance scan and split scan disagree".into(),
        ))?;
        let head = self.db.synthesize(&Perm::from_key(self.n, pkey))?;
        let tail = self.db.synthesize(&Perm::from_key(self.n, skey))?;
        let mut gates = head.gates().to_vec();
        gates.extend_from_slice(tail.gates());
        let c = Circuit::from_gates(self.n, gates)?;
        if c.to_perm() != *f || c.len() as u32 != d {
            return Err(Error::CorruptDb(
                "assembled circuit fails verification".into(),
            ));
        }
        Ok(c)
    }

    /// Quantum cost of a gate-id sequence: summed gate costs minus 2 per
    /// merged adjacent Toffoli/CNOT pair (maximum matching).
    fn qc_of_ids(&self, ids: &[GateId]) -> u32 {
        let lib_len = self.id_qc.len();
        let raw: u32 = ids.iter().map(|&id| self.id_qc[id as usize]).sum();
        let len = ids.len();
        let mut m = [0u32; 40];
        for i in (0..len.saturating_sub(1)).rev() {
            let p = self.id_pairable[ids[i] as usize * lib_len + ids[i + 1] as usize];
            m[i] = if p { (1 + m[i + 2]).max(m[i + 1]) } else { m[i + 1] };
        }
        raw - 2 * m[0]
    }

    /// Every circuit with exactly `req.gate_count` gates realizing `f`,
    /// aggregated. Counts distinct gate sequences in which no gate is
    /// immediately followed by itself (an adjacent pair of equal gates
    /// cancels, leaving a padded shorter circuit); the witness is the
    /// first minimum-cost circuit in lexicographic gate-index order.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn enumerate_all(&self, f: &Perm, req: EnumerationRequest) -> Result<EnumerationReport> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        let gc = req.gate_count;
        if gc == 0 {
            let hit = f.is_identity();
            return Ok(EnumerationReport {
                gate_count: 0,
                count: hit as u64,
                qc_min: hit.then_some(0),
                qc_max: hit.then_some(0),
                witness: hit.then(|| Circuit::empty(self.n)),
            });
        }
        if gc - 1 > self.horizon() {
            return Err(Error::Horizon {
                bound: gc - 1,
                horizon: self.horizon(),
                depth: self.db.depth(),
            });
        }

        let t = tables(self.n);
        let lib_len = gate_library(self.n).len() as GateId;
        let subs: Vec<Result<Sub>> = (0..lib_len as usize)
            .into_par_iter()
            .map(|g0| {
                let g0 = g0 as GateId;
                let mut sub = Sub::default();
                let r1 = t.apply_before_key(f.key(), g0);
                if self.distance_at_most_key(r1, gc - 1)? {
                    let mut prefix = vec![g0];
                    self.dfs(r1, gc - 1, &mut prefix, &mut sub)?;
                }
                Ok(sub)
            })
            .collect();

        let mut total = Sub::default();
        for sub in subs {
            let sub = sub?;
            total.count += sub.count;
            total.qc_max = total.qc_max.max(sub.qc_max);
            if let Some((qc, ids)) = sub.best {
                // Root gates ascend, so the first strictly better witness
                // is the lexicographically least one.
                if total.best.as_ref().is_none_or(|(bq, _)| qc < *bq) {
                    total.best = Some((qc, ids));
                }
            }
        }
        Ok(EnumerationReport {
            gate_count: gc,
            count: total.count,
            qc_min: total.best.as_ref().map(|(qc, _)| *qc),
            qc_max: (total.count > 0).then_some(total.qc_max),
            witness: total.best.map(|(_, ids)| self.ids_to_circuit(&ids)),
        })
    }

    fn ids_to_circuit(&self, ids: &[GateId]) -> Circuit {
        let lib = gate_library(self.n);
        Circuit::from_gates(self.n, ids.iter().map(|&id| lib[id as usize]).collect())
            .expect("library gates always fit")
    }

    /// Visits every circuit [`enumerate_all`](Self::enumerate_all) would
    /// count, one at a time in lexicographic gate-index order, always
    /// single-threaded so the order is reproducible. `visit` returns
    /// `false` to stop early. Returns how many circuits were visited.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn enumerate_each(
        &self,
        f: &Perm,
        req: EnumerationRequest,
        mut visit: impl FnMut(&Circuit) -> bool,
    ) -> Result<u64> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        let gc = req.gate_count;
        if gc == 0 {
            if f.is_identity() {
                visit(&Circuit::empty(self.n));
                return Ok(1);
            }
            return Ok(0);
        }
        if gc - 1 > self.horizon() {
            return Err(Error::Horizon {
                bound: gc - 1,
                horizon: self.horizon(),
                depth: self.db.depth(),
            });
        }
        let t = tables(self.n);
        let lib_len = gate_library(self.n).len() as GateId;
        let mut seen = 0u64;
        let mut prefix = Vec::with_capacity(gc as usize);
        for g0 in 0..lib_len {
            let r1 = t.apply_before_key(f.key(), g0);
            if self.distance_at_most_key(r1, gc - 1)? {
                prefix.push(g0);
                let keep_going = self.walk_each(r1, gc - 1, &mut prefix, &mut seen, &mut visit)?;
                prefix.pop();
                if !keep_going {
                    break;
                }
            }
        }
        Ok(seen)
    }

    fn walk_each(
        &self,
        r: u64,
        budget: u32,
        prefix: &mut Vec<GateId>,
        seen: &mut u64,
        visit: &mut impl FnMut(&Circuit) -> bool,
    ) -> Result<bool> {
        if budget == 0 {
            *seen += 1;
            return Ok(visit(&self.ids_to_circuit(prefix)));
        }
        let t = tables(self.n);
        let lib_len = gate_library(self.n).len() as GateId;
        let last = *prefix.last().expect("walk always runs below a root gate");
        for g in 0..lib_len {
            if g == last {
                continue;
            }
            let r2 = t.apply_before_key(r, g);
            if self.distance_at_most_key(r2, budget - 1)? {
                prefix.push(g);
                let keep_going = self.walk_each(r2, budget - 1, prefix, seen, visit)?;
                prefix.pop();
                if !keep_going {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn dfs(&self, r: u64, budget: u32, prefix: &mut Vec<GateId>, sub: &mut Sub) -> Result<()> {
        if budget == 0 {
            // Pruning only descends into finishable children, so the
            // remainder here is the identity.
            debug_assert_eq!(r, perm::identity_key(self.n));
            sub.count += 1;
            let qc = self.qc_of_ids(prefix);
            sub.qc_max = sub.qc_max.max(qc);
            if sub.best.as_ref().is_none_or(|(bq, _)| qc < *bq) {
                sub.best = Some((qc, prefix.clone()));
            }
            return Ok(());
        }
        let t = tables(self.n);
        let lib_len = gate_library(self.n).len() as GateId;
        let last = *prefix.last().expect("dfs always runs below a root gate");
        for g in 0..lib_len {
            if g == last {
                // The same gate twice cancels; not a counted sequence.
                continue;
            }
            let r2 = t.apply_before_key(r, g);
            if self.distance_at_most_key(r2, budget - 1)? {
                prefix.push(g);
                self.dfs(r2, budget - 1, prefix, sub)?;
                prefix.pop();
            }
        }
        Ok(())
    }

    /// Finds the optimal gate count, then enumerates every gate count up
    /// to `slack` above it, returning the cheapest circuit seen anywhere.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn qc_minimize(&self, f: &Perm, slack: u32) -> Result<QcMinimization> {
        let optimal = self.optimal_gc(f)?;
        let mut reports = Vec::new();
        let mut best: Option<(u32, Circuit)> = None;
        for gc in optimal..=optimal + slack {
            let report = self.enumerate_all(f, EnumerationRequest { gate_count: gc })?;
            if let (Some(qc), Some(w)) = (report.qc_min, report.witness.clone()) {
                if best.as_ref().is_none_or(|(bq, _)| qc < *bq) {
                    best = Some((qc, w));
                }
            }
            reports.push(report);
        }
        let (best_qc, best) = best.ok_or(Error::CorruptDb(
            "optimal gate count enumerated to nothing".into(),
        ))?;
        Ok(QcMinimization { optimal_gc: optimal, reports, best_qc, best })
    }
}

#[derive(Default)]
struct Sub {
    count: u64,
    qc_max: u32,
    best: Option<(u32, Vec<GateId>)>,
}
