use std::fmt::Write;

use super::statevector::Statevector;
use crate::hamiltonian::{Determinant, PauliString};
use crate::{Error, Result};

/// `exp(i · angle · pauli)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub pauli: PauliString,
    pub angle: f64,
}

/// Ordered Pauli rotations applied to a determinant basis state.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub initial: Determinant,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, initial: Determinant) -> Self {
        Self { n_qubits, initial, gates: Vec::new() }
    }

    pub fn push(&mut self, pauli: PauliString, angle: f64) {
        self.gates.push(Gate { pauli, angle });
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    /// First line `alpha_hex beta_hex`, then one `PAULI angle` line per gate.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:x} {:x}", self.initial.alpha, self.initial.beta).unwrap();
        for g in &self.gates {
            writeln!(s, "{} {:.17e}", g.pauli, g.angle).unwrap();
        }
        s
    }

    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::CircuitFormat { line, msg };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| bad(1, "missing initial determinant".into()))?;
        let f: Vec<&str> = first.split_whitespace().collect();
        if f.len() != 2 {
            return Err(bad(1, "expected 'alpha_hex beta_hex'".into()));
        }
        let initial = Determinant::from_hex(f[0], f[1]).map_err(|e| bad(1, e.to_string()))?;
        let mut c = Circuit::new(n_qubits, initial);
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(bad(n + 1, "expected 'PAULI angle'".into()));
            }
            let p: PauliString = f[0].parse().map_err(|e: Error| bad(n + 1, e.to_string()))?;
            if p.n_qubits != n_qubits {
                return Err(bad(n + 1, format!("string has {} qubits, expected {n_qubits}", p.n_qubits)));
            }
            let angle: f64 = f[1].parse().map_err(|_| bad(n + 1, format!("bad angle '{}'", f[1])))?;
            if !angle.is_finite() {
                return Err(bad(n + 1, "non-finite angle".into()));
            }
            c.push(p, angle);
        }
        Ok(c)
    }
}

/// Applies the gates in list order to the initial determinant's basis state.
pub fn run_circuit(c: &Circuit) -> Statevector {
    let mut s = Statevector::basis(c.n_qubits, c.initial.spin_orbitals());
    for g in &c.gates {
        s.apply_rotation(&g.pauli, g.angle)
            .expect("gate width validated against circuit width");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let mut c = Circuit::new(4, Determinant::new(0b1, 0b1));
        c.push("IXYI".parse().unwrap(), 0.125);
        c.push("ZZII".parse().unwrap(), -1.5e-3);
        let t = c.to_text();
        assert!(t.starts_with("1 1\nIXYI 1.25"));
        assert_eq!(Circuit::parse(&t, 4).unwrap(), c);
        assert!(Circuit::parse(&t, 5).is_err());
        assert!(Circuit::parse("1 1\nIXQI 0.1\n", 4).is_err());
    }
}
