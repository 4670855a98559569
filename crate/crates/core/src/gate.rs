//! The gate library: NOT, CNOT, and Toffoli gates with 2 or 3 controls.
//!
//! Every gate inverts its target line exactly when all control lines are 1,
//! so every gate is its own inverse. Gates are written with wire letters
//! `a..d` for lines 0..3 (`a` is the least significant bit of an input
//! value): `Na`, `Ca-b`, `Tab-c`, `T4abc-d`. The three-control form is also
//! accepted without the `4` (`Tabc-d`), as some published circuits spell it.
//!
//! The library for a given line count is ordered canonically: by kind
//! (NOT < CNOT < TOFFOLI3 < TOFFOLI4), then target line, then control-set
//! bitmask. A gate's index in that order is its [`GateId`]; ids are stable,
//! fit in a byte, and are what the database and enumeration use.

use once_cell::sync::Lazy;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{self, Perm};

pub type GateId = u8;

/// Reserved id meaning "no gate" (used by the database for the identity).
pub const NO_GATE: GateId = 0xFF;

pub const WIRES: [char; 4] = ['a', 'b', 'c', 'd'];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli3,
    Toffoli4,
}

/// A single gate: a target line plus a set of control lines.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    target: u8,
    controls: u8, // bitmask of control lines
}

impl Gate {
    pub fn new(target: u8, controls: u8) -> Result<Gate> {
        if target >= 4 || controls >= 16 {
            return Err(Error::BadCircuit(format!(
                "gate uses lines beyond d (target {target}, controls {controls:#x})"
            )));
        }
        if controls & (1 << target) != 0 {
            return Err(Error::BadCircuit("gate target repeated as control".into()));
        }
        if controls.count_ones() > 3 {
            return Err(Error::BadCircuit("too many controls".into()));
        }
        Ok(Gate { target, controls })
    }

    pub fn not(target: u8) -> Gate {
        Gate::new(target, 0).unwrap()
    }

    pub fn cnot(control: u8, target: u8) -> Gate {
        Gate::new(target, 1 << control).unwrap()
    }

    pub fn toffoli(c1: u8, c2: u8, target: u8) -> Gate {
        assert_ne!(c1, c2);
        Gate::new(target, (1 << c1) | (1 << c2)).unwrap()
    }

    #[inline]
    pub fn kind(&self) -> GateKind {
        match self.controls.count_ones() {
            0 => GateKind::Not,
            1 => GateKind::Cnot,
            2 => GateKind::Toffoli3,
            _ => GateKind::Toffoli4,
        }
    }

    #[inline]
    pub fn target(&self) -> u8 {
        self.target
    }

    /// Control lines as a bitmask.
    #[inline]
    pub fn control_mask(&self) -> u8 {
        self.controls
    }

    /// Control lines in ascending order.
    pub fn control_lines(&self) -> Vec<u8> {
        (0..4).filter(|&l| self.controls & (1 << l) != 0).collect()
    }

    /// All lines the gate touches, as a bitmask.
    #[inline]
    pub fn line_mask(&self) -> u8 {
        self.controls | (1 << self.target)
    }

    /// Highest line index used, for width checks.
    pub fn max_line(&self) -> u8 {
        let m = self.line_mask();
        7 - (m.leading_zeros() as u8)
    }

    /// The gate's effect on a single value.
    #[inline]
    pub fn eval(&self, x: u8) -> u8 {
        if x & self.controls == self.controls {
            x ^ (1 << self.target)
        } else {
            x
        }
    }

    /// The gate's position in the canonical library order for `n` lines.
    pub fn id(&self, n: u8) -> Result<GateId> {
        if self.max_line() >= n {
            return Err(Error::BadCircuit(format!(
                "gate {self} does not fit on {n} lines"
            )));
        }
        let lib = gate_library(n);
        Ok(lib.iter().position(|g| g == self).expect("gate in library") as GateId)
    }

    /// Parses one token, e.g. `Nb`, `Ca-b`, `Tbd-c`, `T4abc-d` or `Tabc-d`.
    pub fn parse_token(tok: &str) -> Result<Gate> {
        let bad = |msg: &str| Error::BadCircuit(format!("token `{tok}`: {msg}"));
        let line_of = |ch: char| -> Result<u8> {
            WIRES
                .iter()
                .position(|&w| w == ch)
                .map(|p| p as u8)
                .ok_or_else(|| bad(&format!("unknown wire `{ch}`")))
        };
        let mut chars = tok.chars();
        let head = chars.next().ok_or_else(|| bad("empty"))?;
        let rest: String = chars.collect();
        match head {
            'N' => {
                if rest.len() != 1 {
                    return Err(bad("NOT takes exactly one wire"));
                }
                Ok(Gate::not(line_of(rest.chars().next().unwrap())?))
            }
            'C' | 'T' => {
                let body = if head == 'T' {
                    rest.strip_prefix('4').unwrap_or(&rest)
                } else {
                    &rest
                };
                let (ctrl, tgt) = body
                    .split_once('-')
                    .ok_or_else(|| bad("missing `-` before target"))?;
                if tgt.chars().count() != 1 {
                    return Err(bad("exactly one target wire expected"));
                }
                let target = line_of(tgt.chars().next().unwrap())?;
                let mut controls = 0u8;
                let mut count = 0;
                for ch in ctrl.chars() {
                    let l = line_of(ch)?;
                    if controls & (1 << l) != 0 {
                        return Err(bad(&format!("wire `{ch}` repeated")));
                    }
                    controls |= 1 << l;
                    count += 1;
                }
                let expected = match (head, rest.starts_with('4')) {
                    ('C', _) => 1..=1,
                    ('T', true) => 3..=3,
                    ('T', false) => 2..=3,
                    _ => unreachable!(),
                };
                if !expected.contains(&count) {
                    return Err(bad("wrong number of controls"));
                }
                if controls & (1 << target) != 0 {
                    return Err(bad("target repeated as control"));
                }
                Gate::new(target, controls)
            }
            _ => Err(bad("unknown gate letter")),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = WIRES[self.target as usize];
        match self.kind() {
            GateKind::Not => write!(f, "N{t}"),
            GateKind::Cnot => {
                write!(f, "C{}-{t}", WIRES[self.control_lines()[0] as usize])
            }
            kind => {
                write!(f, "T")?;
                if kind == GateKind::Toffoli4 {
                    write!(f, "4")?;
                }
                for l in self.control_lines() {
                    write!(f, "{}", WIRES[l as usize])?;
                }
                write!(f, "-{t}")
            }
        }
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn build_library(n: u8) -> Vec<Gate> {
    let mut gates = Vec::new();
    for ctrl_count in 0..n {
        for target in 0..n {
            for controls in 0u8..(1 << n) {
                if controls.count_ones() == ctrl_count as u32
                    && controls & (1 << target) == 0
                {
                    gates.push(Gate { target, controls });
                }
            }
        }
    }
    gates
}

/// Precomputed per-gate machinery for packed keys.
pub(crate) struct GateTables {
    pub gates: Vec<Gate>,
    /// For applying a gate to all output values at once: bit-0 lane mask,
    /// control shifts, target shift.
    apply: Vec<(Vec<u32>, u32)>,
    /// For composing a gate on the *input* side: one delta-swap
    /// (mask of the lower lane, shift between swapped fields).
    pre: Vec<(u64, u32)>,
}

impl GateTables {
    fn new(n: u8) -> GateTables {
        let gates = build_library(n);
        let apply = gates
            .iter()
            .map(|g| {
                let shifts = g.control_lines().iter().map(|&c| c as u32).collect();
                (shifts, g.target as u32)
            })
            .collect();
        let pre = gates
            .iter()
            .map(|g| {
                let tbit = 1usize << g.target;
                let mut marker = 0u64;
                for x in 0..perm::points(n) {
                    // fields being swapped: x (target bit 0) <-> x | tbit;
                    // mark the lane of the *larger* index, which packs lower.
                    if x & tbit == 0 && (x as u8) & g.controls == g.controls {
                        marker |= 1u64 << perm::field_shift(n, x | tbit);
                    }
                }
                let shift = (n as u32) * (tbit as u32);
                (marker * ((1u64 << n) - 1), shift)
            })
            .collect();
        GateTables { gates, apply, pre }
    }

    /// `gate(f)`: maps every output value through the gate (apply after `f`).
    #[inline]
    pub fn apply_key(&self, n: u8, key: u64, id: GateId) -> u64 {
        let (ref ctl, tgt) = self.apply[id as usize];
        let ones = perm::lane_lsb(n);
        let mut m = ones;
        for &c in ctl {
            m &= key >> c;
        }
        key ^ ((m & ones) << tgt)
    }

    /// `f ∘ gate`: composes the gate on the input side (apply before `f`),
    /// which permutes packed fields rather than values.
    #[inline]
    pub fn apply_before_key(&self, key: u64, id: GateId) -> u64 {
        let (mask, shift) = self.pre[id as usize];
        let d = ((key >> shift) ^ key) & mask;
        key ^ d ^ (d << shift)
    }
}

static TABLES3: Lazy<GateTables> = Lazy::new(|| GateTables::new(3));
static TABLES4: Lazy<GateTables> = Lazy::new(|| GateTables::new(4));

pub(crate) fn tables(n: u8) -> &'static GateTables {
    match n {
        3 => &TABLES3,
        _ => &TABLES4,
    }
}

/// The canonical gate library for `n` lines (12 gates for 3, 32 for 4).
pub fn gate_library(n: u8) -> &'static [Gate] {
    &tables(n).gates
}

impl Perm {
    /// Applies `gate` after `self`: every output value is mapped through it.
    ///
    /// Panics if the gate does not fit on this function's lines.
    pub fn apply_gate(&self, gate: &Gate) -> Perm {
        let n = self.lines();
        assert!(gate.max_line() < n, "gate {gate} does not fit on {n} lines");
        let id = gate.id(n).unwrap();
        Perm::from_key(n, tables(n).apply_key(n, self.key(), id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_sizes_and_order() {
        assert_eq!(gate_library(3).len(), 12);
        assert_eq!(gate_library(4).len(), 32);
        // first entry is NOT on line 0, kinds appear in canonical order
        assert_eq!(gate_library(4)[0], Gate::not(0));
        let kinds: Vec<_> = gate_library(4).iter().map(|g| g.kind()).collect();
        let mut sorted = kinds.clone();
        sorted.sort();
        assert_eq!(kinds, sorted);
        // per n=4: 4 NOT, 12 CNOT, 12 TOFFOLI3, 4 TOFFOLI4
        let count = |k: GateKind| kinds.iter().filter(|&&x| x == k).count();
        assert_eq!(count(GateKind::Not), 4);
        assert_eq!(count(GateKind::Cnot), 12);
        assert_eq!(count(GateKind::Toffoli3), 12);
        assert_eq!(count(GateKind::Toffoli4), 4);
    }

    #[test]
    fn ids_round_trip() {
        for n in [3u8, 4] {
            for (i, g) in gate_library(n).iter().enumerate() {
                assert_eq!(g.id(n).unwrap(), i as GateId);
            }
        }
    }

    #[test]
    fn apply_not_flips_lsb_of_every_value() {
        let f = Perm::identity(3).apply_gate(&Gate::not(0));
        assert_eq!(f.table(), vec![1, 0, 3, 2, 5, 4, 7, 6]);
    }

    #[test]
    fn gates_are_involutions() {
        for n in [3u8, 4] {
            let t = tables(n);
            let id = Perm::identity(n).key();
            for gid in 0..t.gates.len() as GateId {
                let once = t.apply_key(n, id, gid);
                assert_ne!(once, id);
                assert_eq!(t.apply_key(n, once, gid), id);
            }
        }
    }

    #[test]
    fn apply_before_matches_compose() {
        // f ∘ g computed by field swaps must equal composing g's permutation
        // with f the slow way.
        for n in [3u8, 4] {
            let t = tables(n);
            // some scrambled but valid permutation
            let mut table: Vec<u8> = (0..perm::points(n) as u8).collect();
            table.rotate_left(3);
            table.swap(0, 2);
            let f = Perm::from_table(&table).unwrap();
            for (gid, g) in t.gates.iter().enumerate() {
                let gperm = Perm::identity(n).apply_gate(g);
                let slow = gperm.compose(&f);
                let fast = t.apply_before_key(f.key(), gid as GateId);
                assert_eq!(fast, slow.key(), "gate {g} on {n} lines");
            }
        }
    }

    #[test]
    fn token_parse_and_format() {
        for (tok, gate) in [
            ("Na", Gate::not(0)),
            ("Nd", Gate::not(3)),
            ("Ca-b", Gate::cnot(0, 1)),
            ("Cd-a", Gate::cnot(3, 0)),
            ("Tab-c", Gate::toffoli(0, 1, 2)),
            ("Tbd-c", Gate::toffoli(1, 3, 2)),
            ("T4abc-d", Gate::new(3, 0b0111).unwrap()),
            ("T4bcd-a", Gate::new(0, 0b1110).unwrap()),
        ] {
            assert_eq!(Gate::parse_token(tok).unwrap(), gate, "{tok}");
            assert_eq!(gate.to_string(), tok);
        }
        // three-control form without the 4, as printed in some circuit listings
        assert_eq!(
            Gate::parse_token("Tabd-c").unwrap(),
            Gate::new(2, 0b1011).unwrap()
        );
        // control order does not matter
        assert_eq!(
            Gate::parse_token("Tdb-c").unwrap(),
            Gate::parse_token("Tbd-c").unwrap()
        );
    }

    #[test]
    fn token_parse_rejects_garbage() {
        for tok in [
            "Ne",      // no such wire: only a..d exist
            "Ted-b",   // ditto (a known misprint shape -- must not be guessed)
            "Caa-b",   // repeated wire
            "Ca-a",    // target equals control
            "Tab-ab",  // two targets
            "Tab",     // missing target
            "Xa",      // unknown letter
            "T4ab-c",  // explicit 4 wants three controls
            "N",       // missing wire
            "Cabc-d",  // CNOT with three controls
        ] {
            assert!(Gate::parse_token(tok).is_err(), "{tok} should fail");
        }
    }

    #[test]
    fn gate_fit_is_width_checked() {
        assert!(Gate::not(3).id(3).is_err());
        assert!(Gate::toffoli(1, 3, 2).id(3).is_err());
        assert!(Gate::toffoli(1, 3, 2).id(4).is_ok());
    }
}
