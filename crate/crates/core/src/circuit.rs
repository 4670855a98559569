//! Gate sequences and their text form.
//!
//! A circuit is an ordered list of gates applied left to right: the first
//! token acts on the circuit inputs, the last produces the outputs. Line
//! `a` is bit 0 of a value, `b` bit 1, and so on.
//!
//! The text form is whitespace-separated gate tokens. Angle brackets may
//! group a Toffoli/CNOT pair that a cost report counts as one merged gate
//! (`<Tab-c Ca-b>`); they are accepted anywhere on input — including
//! stray or nested ones, which some printed listings contain — and carry
//! no structural meaning.

use std::fmt;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::perm::Perm;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n: u8,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn empty(n: u8) -> Circuit {
        assert!((3..=4).contains(&n), "unsupported line count {n}");
        Circuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: u8, gates: Vec<Gate>) -> Result<Circuit> {
        if !(3..=4).contains(&n) {
            return Err(Error::UnsupportedWidth(n as usize));
        }
        for g in &gates {
            if g.max_line() >= n {
                return Err(Error::BadCircuit(format!(
                    "gate {g} does not fit on {n} lines"
                )));
            }
        }
        Ok(Circuit { n, gates })
    }

    /// Parses whitespace-separated gate tokens, ignoring angle brackets.
    pub fn parse(text: &str, n: u8) -> Result<Circuit> {
        if !(3..=4).contains(&n) {
            return Err(Error::UnsupportedWidth(n as usize));
        }
        let cleaned: String = text
            .chars()
            .map(|c| if c == '<' || c == '>' { ' ' } else { c })
            .collect();
        let mut gates = Vec::new();
        for (pos, tok) in cleaned.split_whitespace().enumerate() {
            let gate = Gate::parse_token(tok)
                .map_err(|e| Error::BadCircuit(format!("gate {}: {e}", pos + 1)))?;
            if gate.max_line() >= n {
                return Err(Error::BadCircuit(format!(
                    "gate {} ({tok}) does not fit on {n} lines",
                    pos + 1
                )));
            }
            gates.push(gate);
        }
        Ok(Circuit { n, gates })
    }

    #[inline]
    pub fn lines(&self) -> u8 {
        self.n
    }

    #[inline]
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) {
        assert!(gate.max_line() < self.n);
        self.gates.push(gate);
    }

    /// The same gates in reverse order — the circuit's inverse, since every
    /// gate in the library is an involution.
    pub fn reversed(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.reverse();
        Circuit { n: self.n, gates }
    }

    /// The function the circuit computes.
    pub fn to_perm(&self) -> Perm {
        let mut p = Perm::identity(self.n);
        for g in &self.gates {
            p = p.apply_gate(g);
        }
        p
    }

    /// Runs one input value through the circuit.
    pub fn simulate(&self, input: u8) -> Result<u8> {
        if input as usize >= 1 << self.n {
            return Err(Error::BadVector(format!(
                "input {input} out of range for {} lines",
                self.n
            )));
        }
        Ok(self.gates.iter().fold(input, |x, g| g.eval(x)))
    }

    /// Formats with `<...>` marks around the given merged pairs;
    /// `pair_starts` holds indices `i` such that gates `i` and `i+1` merge.
    pub fn to_marked_string(&self, pair_starts: &[usize]) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.gates.len() {
            if !out.is_empty() {
                out.push(' ');
            }
            if pair_starts.contains(&i) {
                out.push_str(&format!("<{} {}>", self.gates[i], self.gates[i + 1]));
                i += 2;
            } else {
                out.push_str(&self.gates[i].to_string());
                i += 1;
            }
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Circuit({} lines, `{self}`)", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The wire convention in one assertion: `a` is the least significant
    /// bit and gates apply left to right. This printed three-gate circuit
    /// computes the known output vector below; any other convention breaks
    /// the equality.
    #[test]
    fn wire_convention_pin() {
        let c = Circuit::parse("Tbd-c Tbd-a Tcd-b", 4).unwrap();
        let expect: Perm = "[0,1,2,3,4,5,6,7,8,9,13,12,14,15,11,10]"
            .parse()
            .unwrap();
        assert_eq!(c.to_perm(), expect);
    }

    #[test]
    fn parse_strips_brackets_even_nested_ones() {
        let plain = Circuit::parse("Tbd-a Cd-b Tbd-c", 4).unwrap();
        let marked = Circuit::parse("<Tbd-a <Cd-b> Tbd-c>", 4).unwrap();
        assert_eq!(plain, marked);
        let pair = Circuit::parse("<Tab-c Ca-b> Nd", 4).unwrap();
        assert_eq!(pair.len(), 3);
    }

    #[test]
    fn parse_rejects_unknown_wires_and_misfits() {
        // `e` is not a wire; misprints like this must fail loudly rather
        // than guess.
        assert!(Circuit::parse("Ted-b", 4).is_err());
        // a 4-line gate cannot sit on a 3-line circuit
        assert!(Circuit::parse("Tbd-c", 3).is_err());
        assert!(Circuit::parse("Nd", 3).is_err());
        assert!(Circuit::parse("Tab-c", 3).is_ok());
    }

    #[test]
    fn format_parse_round_trip() {
        let text = "Na Cc-a Tbd-c T4abc-d Cd-b";
        let c = Circuit::parse(text, 4).unwrap();
        assert_eq!(c.to_string(), text);
        assert_eq!(Circuit::parse(&c.to_string(), 4).unwrap(), c);
    }

    #[test]
    fn reversed_circuit_inverts() {
        let c = Circuit::parse("Tbd-c Tbd-a Tcd-b Na Cc-b", 4).unwrap();
        let there_and_back = c.to_perm().compose(&c.reversed().to_perm());
        assert!(there_and_back.is_identity());
    }

    #[test]
    fn simulate_single_values() {
        let c = Circuit::parse("Na", 4).unwrap();
        assert_eq!(c.simulate(0).unwrap(), 1);
        let c2 = Circuit::parse("Tab-c", 3).unwrap();
        assert_eq!(c2.simulate(3).unwrap(), 7);
        assert_eq!(c2.simulate(2).unwrap(), 2);
        assert!(c2.simulate(8).is_err());
    }

    #[test]
    fn marked_formatting() {
        let c = Circuit::parse("Tbc-a Cb-c Tad-b Ca-d", 4).unwrap();
        assert_eq!(
            c.to_marked_string(&[0, 2]),
            "<Tbc-a Cb-c> <Tad-b Ca-d>"
        );
        assert_eq!(c.to_marked_string(&[]), "Tbc-a Cb-c Tad-b Ca-d");
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert!(Circuit::empty(4).to_perm().is_identity());
        assert_eq!(Circuit::parse("", 4).unwrap().len(), 0);
    }
}
