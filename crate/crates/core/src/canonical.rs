//! Cost-equivalence classes under simultaneous input/output relabeling and
//! inversion.
//!
//! Relabeling lines of a circuit (the same way on inputs and outputs) and
//! reversing it both preserve gate count and quantum cost, because the gate
//! library is closed under both. Two functions related by `σ ∘ f' ∘ σ⁻¹`
//! (with `f'` either `f` or its inverse, and `σ` the index permutation
//! induced by a line relabeling) therefore share all costs. Each class has
//! at most `2·n!` members — 12 for three lines, 48 for four.
//!
//! The canonical representative of a class is its lexicographically
//! smallest output vector, which on packed keys is the smallest integer.
//! The database stores only representatives; everything else reaches its
//! class through the witness relabeling returned by [`canonical_rep`].

use once_cell::sync::Lazy;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::perm::{self, Perm};

/// A line relabeling, optionally composed with functional inversion.
///
/// `line_perm[i]` is the new name of line `i`; unused entries (beyond the
/// line count) stay at their index.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Relabeling {
    line_perm: [u8; 4],
    inverted: bool,
}

impl Relabeling {
    pub fn new(line_perm: [u8; 4], inverted: bool) -> Result<Relabeling> {
        let mut seen = [false; 4];
        for &l in &line_perm {
            if l >= 4 || seen[l as usize] {
                return Err(Error::BadVector(format!(
                    "not a line permutation: {line_perm:?}"
                )));
            }
            seen[l as usize] = true;
        }
        Ok(Relabeling { line_perm, inverted })
    }

    pub fn identity() -> Relabeling {
        Relabeling { line_perm: [0, 1, 2, 3], inverted: false }
    }

    #[inline]
    pub fn line_perm(&self) -> [u8; 4] {
        self.line_perm
    }

    #[inline]
    pub fn inverted(&self) -> bool {
        self.inverted
    }

    /// The relabeling that undoes this one: if `apply(f) == g` then
    /// `inverse().apply(g) == f`. The inversion flag is self-dual.
    pub fn inverse(&self) -> Relabeling {
        let mut inv = [0u8; 4];
        for (i, &l) in self.line_perm.iter().enumerate() {
            inv[l as usize] = i as u8;
        }
        Relabeling { line_perm: inv, inverted: self.inverted }
    }

    /// The induced permutation of input values: bit `i` moves to bit
    /// `line_perm[i]`.
    pub fn index_map(&self, n: u8) -> Perm {
        let mut table = vec![0u8; perm::points(n)];
        for (x, slot) in table.iter_mut().enumerate() {
            let mut y = 0u8;
            for b in 0..n {
                if x & (1 << b) != 0 {
                    y |= 1 << self.line_perm[b as usize];
                }
            }
            *slot = y;
        }
        Perm::from_table(&table).unwrap()
    }

    /// `σ ∘ f' ∘ σ⁻¹` where `f'` is `f` or its inverse.
    pub fn apply(&self, f: &Perm) -> Perm {
        let n = f.lines();
        let sigma = self.index_map(n);
        let fp = if self.inverted { f.inverse() } else { *f };
        // result(x) = σ(f'(σ⁻¹(x)))  ==  σ⁻¹ then f' then σ, applied left to
        // right in composition order.
        sigma.inverse().compose(&fp).compose(&sigma)
    }

    /// Renames one gate's lines: a single-gate circuit for `g` transports
    /// to a single-gate circuit for `apply(g)` (gates are involutions, so
    /// the inversion flag has no effect on them).
    pub fn map_gate(&self, g: &Gate) -> Gate {
        let target = self.line_perm[g.target() as usize];
        let mut controls = 0u8;
        for l in g.control_lines() {
            controls |= 1 << self.line_perm[l as usize];
        }
        Gate::new(target, controls).unwrap()
    }

    /// Renames a circuit's lines, reversing gate order when inverted, so
    /// that the transported circuit computes `apply(original function)`.
    pub fn transport(&self, c: &Circuit) -> Circuit {
        let gates: Vec<Gate> = if self.inverted {
            c.gates().iter().rev().map(|g| self.map_gate(g)).collect()
        } else {
            c.gates().iter().map(|g| self.map_gate(g)).collect()
        };
        Circuit::from_gates(c.lines(), gates).unwrap()
    }
}

/// A class representative together with the relabeling that reaches it.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalForm {
    pub rep: Perm,
    /// `witness.apply(f) == rep` for the `f` this form was computed from.
    pub witness: Relabeling,
}

// ---------------------------------------------------------------------------
// Packed conjugation machinery.
//
// Conjugating a packed key by a line relabeling needs two steps: permute the
// fields (positions are conjugated through σ) and permute the bits inside
// every field (values are mapped through σ). Field moves decompose into at
// most three delta swaps because σ permutes *index bits*; the in-field bit
// permutation is a few shift-and-mask passes. All of it is precomputed per
// relabeling at startup and verified against the naive path in tests.

struct ConjProgram {
    swaps: Vec<(u64, u32)>,
    pi: [u8; 4],
}

impl ConjProgram {
    #[inline]
    fn run(&self, key: u64, n: u8) -> u64 {
        let mut k = key;
        for &(mask, sh) in &self.swaps {
            let d = ((k >> sh) ^ k) & mask;
            k ^= d ^ (d << sh);
        }
        let lanes = perm::lane_lsb(n);
        let mut out = 0u64;
        for b in 0..n {
            out |= ((k >> b) & lanes) << self.pi[b as usize];
        }
        out
    }
}

struct RelabelTables {
    n: u8,
    perms: Vec<[u8; 4]>,
    programs: Vec<ConjProgram>,
}

fn lex_line_perms(n: u8) -> Vec<[u8; 4]> {
    let mut base: Vec<u8> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let mut arr = [0u8, 1, 2, 3];
        arr[..n as usize].copy_from_slice(&base);
        out.push(arr);
        // next lexicographic permutation
        let Some(i) = (0..base.len() - 1).rev().find(|&i| base[i] < base[i + 1]) else {
            break;
        };
        let j = (i + 1..base.len()).rev().find(|&j| base[j] > base[i]).unwrap();
        base.swap(i, j);
        base[i + 1..].reverse();
    }
    out
}

/// Delta-swap of the packed fields for the index-bit transposition (i, j).
fn bit_swap_step(n: u8, i: u8, j: u8) -> (u64, u32) {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let mut marker = 0u64;
    for x in 0..perm::points(n) {
        // mark the lane of the higher index of each swapped pair (packs lower)
        if x & (1 << j) != 0 && x & (1 << i) == 0 {
            marker |= 1u64 << perm::field_shift(n, x);
        }
    }
    let shift = (n as u32) * ((1u32 << j) - (1u32 << i));
    (marker * ((1u64 << n) - 1), shift)
}

fn swap_program(n: u8, pi: [u8; 4]) -> Vec<(u64, u32)> {
    // Appending a field swap to the program composes it on the *right* of
    // the gather map the program realizes, so we build toward the inverse
    // bit permutation: gather(p) = π⁻¹(p) makes W[π(x)] = V[x].
    let mut target = [0u8; 4];
    for (b, &p) in pi.iter().enumerate() {
        target[p as usize] = b as u8;
    }
    let mut cur: Vec<u8> = (0..4).collect();
    let mut steps = Vec::new();
    for b in 0..n as usize {
        if cur[b] != target[b] {
            let other = (0..4).find(|&o| cur[o] == target[b]).unwrap();
            steps.push(bit_swap_step(n, b as u8, other as u8));
            cur.swap(b, other);
        }
    }
    debug_assert!((0..n as usize).all(|b| cur[b] == target[b]));
    steps
}

impl RelabelTables {
    fn new(n: u8) -> RelabelTables {
        let perms = lex_line_perms(n);
        let programs = perms
            .iter()
            .map(|&pi| ConjProgram { swaps: swap_program(n, pi), pi })
            .collect();
        RelabelTables { n, perms, programs }
    }

    /// Count of distinct relabelings: `2 · n!`.
    fn variants(&self) -> usize {
        self.perms.len() * 2
    }

    fn relabeling(&self, idx: usize) -> Relabeling {
        Relabeling {
            line_perm: self.perms[idx / 2],
            inverted: idx % 2 == 1,
        }
    }

    /// The variant key for witness index `idx` (σ index × 2 + inverted).
    #[inline]
    fn variant(&self, key: u64, inv_key: u64, idx: usize) -> u64 {
        let src = if idx % 2 == 1 { inv_key } else { key };
        self.programs[idx / 2].run(src, self.n)
    }
}

static TABLES3: Lazy<RelabelTables> = Lazy::new(|| RelabelTables::new(3));
static TABLES4: Lazy<RelabelTables> = Lazy::new(|| RelabelTables::new(4));

fn tables(n: u8) -> &'static RelabelTables {
    match n {
        3 => &TABLES3,
        _ => &TABLES4,
    }
}

/// Number of relabelings for `n` lines (12 or 48).
pub fn relabeling_count(n: u8) -> usize {
    tables(n).variants()
}

/// The `idx`-th relabeling in the fixed enumeration order (σ in
/// lexicographic order, plain before inverted).
pub fn relabeling_by_index(n: u8, idx: usize) -> Relabeling {
    tables(n).relabeling(idx)
}

/// Smallest packed key over the class of `key`, with the witness index that
/// produced it. The hot path for everything else in the crate.
pub(crate) fn canon_key(n: u8, key: u64) -> (u64, u32) {
    let t = tables(n);
    let inv = perm::invert_key(n, key);
    let mut best = u64::MAX;
    let mut best_idx = 0u32;
    for idx in 0..t.variants() {
        let v = t.variant(key, inv, idx);
        if v < best {
            best = v;
            best_idx = idx as u32;
        }
    }
    (best, best_idx)
}

/// All class-member keys of `key`, deduplicated and sorted.
pub(crate) fn member_keys(n: u8, key: u64) -> Vec<u64> {
    let t = tables(n);
    let inv = perm::invert_key(n, key);
    let mut out: Vec<u64> = (0..t.variants()).map(|i| t.variant(key, inv, i)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The canonical representative of `f`'s class and a witness reaching it.
pub fn canonical_rep(f: &Perm) -> CanonicalForm {
    let n = f.lines();
    let (key, idx) = canon_key(n, f.key());
    CanonicalForm {
        rep: Perm::from_key(n, key),
        witness: tables(n).relabeling(idx as usize),
    }
}

/// Every function sharing `f`'s class, sorted by output vector.
pub fn class_members(f: &Perm) -> Vec<Perm> {
    let n = f.lines();
    member_keys(n, f.key())
        .into_iter()
        .map(|k| Perm::from_key(n, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_relabel(f: &Perm, r: &Relabeling) -> Perm {
        let n = f.lines();
        let fp = if r.inverted() { f.inverse() } else { *f };
        let mut table = vec![0u8; f.points()];
        let pi = r.line_perm();
        let map = |x: u8| -> u8 {
            let mut y = 0;
            for b in 0..n {
                if x & (1 << b) != 0 {
                    y |= 1 << pi[b as usize];
                }
            }
            y
        };
        for x in 0..f.points() {
            // find σ⁻¹(x), apply f', then σ
            let pre = (0..f.points() as u8).find(|&v| map(v) as usize == x).unwrap();
            table[x] = map(fp.get(pre as usize));
        }
        Perm::from_table(&table).unwrap()
    }

    fn scrambled(n: u8, seed: u64) -> Perm {
        let mut rng = seed | 1;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        let cnt = perm::points(n);
        let mut t: Vec<u8> = (0..cnt as u8).collect();
        for i in (1..cnt).rev() {
            t.swap(i, next() as usize % (i + 1));
        }
        Perm::from_table(&t).unwrap()
    }

    #[test]
    fn packed_conjugation_matches_naive() {
        for n in [3u8, 4] {
            for seed in 1..6u64 {
                let f = scrambled(n, seed * 7919);
                for idx in 0..relabeling_count(n) {
                    let r = relabeling_by_index(n, idx);
                    assert_eq!(
                        r.apply(&f),
                        naive_relabel(&f, &r),
                        "n={n} idx={idx}"
                    );
                    let t = tables(n);
                    let fast = t.variant(
                        f.key(),
                        f.inverse().key(),
                        idx,
                    );
                    assert_eq!(fast, naive_relabel(&f, &r).key(), "packed n={n} idx={idx}");
                }
            }
        }
    }

    #[test]
    fn witness_reaches_representative() {
        for n in [3u8, 4] {
            for seed in 1..20u64 {
                let f = scrambled(n, seed * 104729);
                let c = canonical_rep(&f);
                assert_eq!(c.witness.apply(&f), c.rep);
                // idempotent: the representative is its own representative
                let again = canonical_rep(&c.rep);
                assert_eq!(again.rep, c.rep);
                // and the class minimum really is the member minimum
                let members = class_members(&f);
                assert_eq!(members[0], c.rep);
            }
        }
    }

    #[test]
    fn class_invariance() {
        for n in [3u8, 4] {
            let f = scrambled(n, 42);
            let rep = canonical_rep(&f).rep;
            for idx in 0..relabeling_count(n) {
                let g = relabeling_by_index(n, idx).apply(&f);
                assert_eq!(canonical_rep(&g).rep, rep);
            }
        }
    }

    #[test]
    fn relabeling_inverse_round_trips() {
        for n in [3u8, 4] {
            let f = scrambled(n, 1234);
            for idx in 0..relabeling_count(n) {
                let r = relabeling_by_index(n, idx);
                assert_eq!(r.inverse().apply(&r.apply(&f)), f);
            }
        }
    }

    /// The published 12-member class of `[1,0,3,2,5,7,4,6]`, reproduced
    /// exactly. Its first entry doubles as the canonical representative.
    #[test]
    fn twelve_member_class_example() {
        let f: Perm = "[1,0,3,2,5,7,4,6]".parse().unwrap();
        let expected: Vec<Perm> = [
            "[1,0,3,2,5,7,4,6]",
            "[1,0,3,2,6,4,7,5]",
            "[1,0,3,7,5,4,2,6]",
            "[1,0,6,2,5,4,7,3]",
            "[2,3,0,1,5,7,4,6]",
            "[2,3,0,1,6,4,7,5]",
            "[2,3,0,7,6,1,4,5]",
            "[2,5,0,1,6,7,4,3]",
            "[4,3,6,7,0,1,2,5]",
            "[4,5,3,7,0,1,2,6]",
            "[4,5,6,1,0,7,2,3]",
            "[4,5,6,2,0,1,7,3]",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        let members = class_members(&f);
        assert_eq!(members, expected);
        assert_eq!(canonical_rep(&f).rep, f);
        // every member canonicalizes to the same representative
        for m in &members {
            assert_eq!(canonical_rep(m).rep, f);
        }
    }

    #[test]
    fn class_sizes_divide_group_order() {
        for n in [3u8, 4] {
            let order = relabeling_count(n);
            for seed in 1..15u64 {
                let f = scrambled(n, seed * 31337);
                assert_eq!(order % class_members(&f).len(), 0);
            }
            // identity is alone in its class
            assert_eq!(class_members(&Perm::identity(n)).len(), 1);
        }
    }

    #[test]
    fn transport_tracks_relabeling() {
        let c = Circuit::parse("Tbd-c Tbd-a Tcd-b Na Cc-b", 4).unwrap();
        let f = c.to_perm();
        for idx in 0..relabeling_count(4) {
            let r = relabeling_by_index(4, idx);
            let moved = r.transport(&c);
            assert_eq!(moved.to_perm(), r.apply(&f), "idx={idx}");
            assert_eq!(moved.len(), c.len());
        }
    }
}
