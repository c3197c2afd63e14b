use std::fmt;
use std::io::Write;

use num_complex::Complex64;

use super::excitation::Excitation;
use crate::hamiltonian::jordan_wigner::{ladder_product, PauliSum};
use crate::hamiltonian::PauliString;
use crate::Result;

/// Default amplitude cut: excitations with `|t| ≤ 1e-6` are dropped.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TokenSource {
    Identity,
    Excitation(Excitation),
}

impl fmt::Display for TokenSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenSource::Identity => f.write_str("identity"),
            TokenSource::Excitation(e) => write!(f, "{e}"),
        }
    }
}

/// `exp(i · angle · pauli)` with its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoolToken {
    pub index: usize,
    pub pauli: PauliString,
    pub angle: f64,
    pub source: TokenSource,
}

/// Token 0 is the identity; the rest follow singles by `(i, a)` then
/// doubles by `(i, j, a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPool {
    pub n_qubits: usize,
    pub tokens: Vec<PoolToken>,
}

impl OperatorPool {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn identity_only(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            tokens: vec![PoolToken {
                index: 0,
                pauli: PauliString::identity(n_qubits),
                angle: 0.0,
                source: TokenSource::Identity,
            }],
        }
    }

    /// CSV `token_id,pauli,angle,source`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["token_id", "pauli", "angle", "source"])?;
        for t in &self.tokens {
            out.write_record([t.index.to_string(), t.pauli.to_string(), format!("{:.17e}", t.angle), t.source.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Anti-Hermitian generator `τ − τ†` of an excitation as a Pauli sum.
pub fn generator(ex: &Excitation, n_qubits: usize) -> PauliSum {
    let (fwd, back): (Vec<(usize, bool)>, Vec<(usize, bool)>) = match *ex {
        Excitation::Single { i, a, .. } => (vec![(a, true), (i, false)], vec![(i, true), (a, false)]),
        Excitation::Double { i, j, a, b, .. } => (
            vec![(a, true), (b, true), (j, false), (i, false)],
            vec![(i, true), (j, true), (b, false), (a, false)],
        ),
    };
    let mut tau = ladder_product(n_qubits, &fwd);
    tau.add_scaled(&ladder_product(n_qubits, &back), Complex64::new(-1.0, 0.0));
    tau
}

/// Removes Z letters strictly between the lowest and highest acted qubits.
pub fn strip_parity(p: &PauliString, lo: usize, hi: usize) -> PauliString {
    let mut out = *p;
    for q in lo + 1..hi {
        if out.letter(q) == 'Z' {
            out.set(q, 'I');
        }
    }
    out
}

/// Terms `c_ℓ P_ℓ` of `τ = i Σ c_ℓ P_ℓ`, parity stripped, in canonical order.
pub fn stripped_terms(ex: &Excitation, n_qubits: usize) -> Vec<(f64, PauliString)> {
    let acted: Vec<usize> = ex.occupied().into_iter().chain(ex.virtuals()).collect();
    let lo = *acted.iter().min().expect("excitation acts on qubits");
    let hi = *acted.iter().max().expect("excitation acts on qubits");
    let mut terms: Vec<(f64, PauliString)> = generator(ex, n_qubits)
        .to_sorted()
        .into_iter()
        .map(|(c, p)| {
            debug_assert!(c.re.abs() < 1e-12, "generator must be anti-Hermitian");
            (c.im, strip_parity(&p, lo, hi))
        })
        .collect();
    terms.sort_by_key(|a| a.1);
    terms
}

/// Representative string: largest `|c|`, ties to the first canonical string.
pub fn representative(ex: &Excitation, n_qubits: usize) -> (f64, PauliString) {
    let terms = stripped_terms(ex, n_qubits);
    let mut best = terms[0];
    for &(c, p) in &terms[1..] {
        // Strict comparison keeps the earliest string on ties.
        if c.abs() > best.0.abs() + 1e-12 {
            best = (c, p);
        }
    }
    best
}

/// Pool of single-Pauli rotation tokens, one per excitation with
/// `|t| > threshold`, each with angle `c · t` for its representative term.
pub fn build_pool(amps: &[Excitation], threshold: f64, n_qubits: usize) -> OperatorPool {
    let mut kept: Vec<&Excitation> = amps.iter().filter(|e| e.amplitude().abs() > threshold).collect();
    kept.sort_by_key(|e| e.key());
    let mut pool = OperatorPool::identity_only(n_qubits);
    for ex in kept {
        let (c, pauli) = representative(ex, n_qubits);
        pool.tokens.push(PoolToken {
            index: pool.tokens.len(),
            pauli,
            angle: c * ex.amplitude(),
            source: TokenSource::Excitation(*ex),
        });
    }
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_strips_to_weight_two() {
        let ex = Excitation::single(1, 6, 0.05);
        let terms = stripped_terms(&ex, 8);
        assert_eq!(terms.len(), 2);
        for (c, p) in &terms {
            assert_eq!(p.weight(), 2);
            assert!((c.abs() - 0.5).abs() < 1e-14);
        }
        let names: Vec<String> = terms.iter().map(|(_, p)| p.to_string()).collect();
        assert_eq!(names, ["IXIIIIYI", "IYIIIIXI"]);
        let (c, p) = representative(&ex, 8);
        assert_eq!(p.to_string(), "IXIIIIYI");
        assert_eq!(c, terms[0].0);
    }

    #[test]
    fn double_strips_to_weight_four() {
        let ex = Excitation::double(0, 3, 4, 7, 0.1);
        let terms = stripped_terms(&ex, 8);
        assert_eq!(terms.len(), 8);
        for (c, p) in &terms {
            assert_eq!(p.weight(), 4);
            assert!((c.abs() - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn threshold_and_ordering() {
        let amps = vec![
            Excitation::double(0, 1, 2, 3, 0.1),
            Excitation::single(1, 3, 1e-7),
            Excitation::single(0, 2, -0.02),
        ];
        let pool = build_pool(&amps, DEFAULT_THRESHOLD, 4);
        assert_eq!(pool.len(), 3);
        assert_eq!(pool.tokens[0].source, TokenSource::Identity);
        assert!(pool.tokens[0].pauli.is_identity() && pool.tokens[0].angle == 0.0);
        assert!(matches!(pool.tokens[1].source, TokenSource::Excitation(Excitation::Single { i: 0, a: 2, .. })));
        assert!(matches!(pool.tokens[2].source, TokenSource::Excitation(Excitation::Double { .. })));
        for (k, t) in pool.tokens.iter().enumerate() {
            assert_eq!(t.index, k);
        }
        assert_eq!(build_pool(&[], DEFAULT_THRESHOLD, 4).len(), 1);
    }

    #[test]
    fn csv_dump() {
        let pool = build_pool(&[Excitation::single(0, 2, 0.1)], DEFAULT_THRESHOLD, 4);
        let mut buf = Vec::new();
        pool.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "token_id,pauli,angle,source");
        assert!(lines[1].starts_with("0,IIII,0"));
        assert!(lines[2].starts_with("1,IXIY,") || lines[2].starts_with("1,IYIX,"));
    }
}
