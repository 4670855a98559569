//! Gate count and quantum cost.
//!
//! Quantum cost charges each gate by its standard elementary-gate size —
//! 1 for NOT and CNOT, 5 for a two-control Toffoli, 13 for a three-control
//! one — except that a two-control Toffoli sitting directly next to a CNOT
//! acting on exactly the Toffoli's control pair forms a merged gate of cost
//! 4 (in either order), saving 2. The report therefore finds a maximum set
//! of disjoint adjacent pairs; among maximum matchings it prefers the
//! leftmost pairing, so reports are deterministic. No gate reordering is
//! attempted: adjacency in the written sequence is what counts.

use crate::circuit::Circuit;
use crate::gate::{Gate, GateKind};

/// Quantum cost of one gate by kind.
pub fn gate_qc(g: &Gate) -> u32 {
    match g.kind() {
        GateKind::Not | GateKind::Cnot => 1,
        GateKind::Toffoli3 => 5,
        GateKind::Toffoli4 => 13,
    }
}

/// True when the two adjacent gates merge: one is a two-control Toffoli,
/// the other a CNOT whose two lines are exactly the Toffoli's controls,
/// in either order.
pub fn peres_pairable(g1: &Gate, g2: &Gate) -> bool {
    let (t, c) = match (g1.kind(), g2.kind()) {
        (GateKind::Toffoli3, GateKind::Cnot) => (g1, g2),
        (GateKind::Cnot, GateKind::Toffoli3) => (g2, g1),
        _ => return false,
    };
    c.line_mask() == t.control_mask()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub gate_count: u32,
    /// Cost before pair merging.
    pub raw_qc: u32,
    /// Cost after subtracting 2 per merged pair.
    pub qc: u32,
    /// Indices `i` such that gates `i` and `i+1` form a merged pair.
    pub pairs: Vec<usize>,
}

impl CostReport {
    /// The circuit text with `<...>` around each merged pair.
    pub fn marked(&self, c: &Circuit) -> String {
        c.to_marked_string(&self.pairs)
    }
}

pub fn gate_count(c: &Circuit) -> u32 {
    c.len() as u32
}

/// Computes the cost report for a circuit.
pub fn quantum_cost(c: &Circuit) -> CostReport {
    let gates = c.gates();
    let len = gates.len();
    let raw: u32 = gates.iter().map(gate_qc).sum();

    // m[i] = size of a maximum matching of adjacent mergeable pairs in the
    // suffix starting at gate i.
    let mut m = vec![0u32; len + 2];
    for i in (0..len.saturating_sub(1)).rev() {
        let take = if peres_pairable(&gates[i], &gates[i + 1]) {
            1 + m[i + 2]
        } else {
            0
        };
        m[i] = take.max(m[i + 1]);
    }

    // Walk left to right, pairing greedily whenever that still allows a
    // maximum matching overall.
    let mut pairs = Vec::new();
    let mut i = 0;
    while i + 1 < len {
        if peres_pairable(&gates[i], &gates[i + 1]) && 1 + m[i + 2] == m[i] {
            pairs.push(i);
            i += 2;
        } else {
            i += 1;
        }
    }

    let qc = raw - 2 * (pairs.len() as u32);
    debug_assert_eq!(pairs.len() as u32, *m.first().unwrap_or(&0));
    CostReport { gate_count: len as u32, raw_qc: raw, qc, pairs }
}
