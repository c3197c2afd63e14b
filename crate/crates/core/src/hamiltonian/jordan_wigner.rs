//! Jordan–Wigner encoding of the spin-orbital Hamiltonian.
//!
//! Spin orbital `2p` (`2p+1`) is the α (β) spin of spatial orbital `p`, and
//! `a_q = Z_0 ⋯ Z_{q-1} (X_q + iY_q)/2`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::integrals::MolecularIntegrals;
use super::pauli::{phase, PauliHamiltonian, PauliString};

/// Coefficients smaller than this after assembly are rounding residue of
/// cancelling terms.
const DROP_TOL: f64 = 1e-13;

/// A Pauli sum with complex coefficients, used for fermionic algebra.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: HashMap<(u64, u64), Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: HashMap::new() }
    }

    pub fn scalar(n_qubits: usize, c: Complex64) -> Self {
        let mut s = Self::new(n_qubits);
        s.terms.insert((0, 0), c);
        s
    }

    fn add_term(&mut self, p: PauliString, c: Complex64) {
        *self.terms.entry((p.x, p.z)).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn add_scaled(&mut self, other: &PauliSum, c: Complex64) {
        for (&(x, z), &v) in &other.terms {
            self.add_term(PauliString::new(self.n_qubits, x, z), v * c);
        }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits);
        for (&(x1, z1), &c1) in &self.terms {
            let p1 = PauliString::new(self.n_qubits, x1, z1);
            for (&(x2, z2), &c2) in &other.terms {
                let (k, p) = p1.mul(&PauliString::new(self.n_qubits, x2, z2));
                out.add_term(p, c1 * c2 * phase(k));
            }
        }
        out
    }

    /// Sorted `(coefficient, string)` list without negligible entries.
    pub fn to_sorted(&self) -> Vec<(Complex64, PauliString)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() > DROP_TOL)
            .map(|(&(x, z), &c)| (c, PauliString::new(self.n_qubits, x, z)))
            .collect();
        v.sort_by_key(|a| a.1);
        v
    }
}

/// `a_q` (`dagger = false`) or `a†_q` as a two-term Pauli sum.
pub fn ladder(n_qubits: usize, q: usize, dagger: bool) -> PauliSum {
    let parity = (1u64 << q) - 1;
    let bit = 1u64 << q;
    let mut s = PauliSum::new(n_qubits);
    let half = Complex64::new(0.5, 0.0);
    let y = if dagger { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
    s.add_term(PauliString::new(n_qubits, bit, parity), half);
    s.add_term(PauliString::new(n_qubits, bit, parity | bit), y);
    s
}

/// Product of ladder operators, leftmost first: `[(q, dagger), ...]`.
pub fn ladder_product(n_qubits: usize, ops: &[(usize, bool)]) -> PauliSum {
    let mut acc = PauliSum::scalar(n_qubits, Complex64::new(1.0, 0.0));
    for &(q, d) in ops {
        acc = acc.mul(&ladder(n_qubits, q, d));
    }
    acc
}

/// Pauli Hamiltonian of the spin-orbital second-quantized operator
/// `Σ h_pq a†_p a_q + ½ Σ (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ} + e_core`.
pub fn jordan_wigner(ints: &MolecularIntegrals) -> PauliHamiltonian {
    let n = ints.n_orb;
    let nq = 2 * n;
    let mut acc = PauliSum::scalar(nq, Complex64::new(ints.e_core, 0.0));

    // Cache of single ladder operators; products are formed on the fly.
    let lad: Vec<[PauliSum; 2]> = (0..nq).map(|q| [ladder(nq, q, false), ladder(nq, q, true)]).collect();

    for p in 0..n {
        for q in 0..n {
            let h = ints.h1(p, q);
            if h == 0.0 {
                continue;
            }
            for s in 0..2 {
                let term = lad[2 * p + s][1].mul(&lad[2 * q + s][0]);
                acc.add_scaled(&term, Complex64::new(h, 0.0));
            }
        }
    }

    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.h2(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sig in 0..2 {
                        for tau in 0..2 {
                            let (cp, cr) = (2 * p + sig, 2 * r + tau);
                            let (aq, as_) = (2 * q + sig, 2 * s + tau);
                            if cp == cr || aq == as_ {
                                continue;
                            }
                            let term = lad[cp][1]
                                .mul(&lad[cr][1])
                                .mul(&lad[as_][0])
                                .mul(&lad[aq][0]);
                            acc.add_scaled(&term, Complex64::new(0.5 * v, 0.0));
                        }
                    }
                }
            }
        }
    }

    let terms = acc
        .to_sorted()
        .into_iter()
        .map(|(c, p)| {
            debug_assert!(c.im.abs() < 1e-9, "non-real JW coefficient {c} on {p}");
            (c.re, p)
        })
        .filter(|(c, _)| c.abs() > DROP_TOL)
        .collect();
    PauliHamiltonian::new(nq, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::determinant::Determinant;
    use crate::hamiltonian::slater_condon::slater_condon;
    use crate::rng;

    #[test]
    fn number_operator() {
        // a†_q a_q = (I - Z_q)/2
        let n = ladder_product(3, &[(1, true), (1, false)]).to_sorted();
        assert_eq!(n.len(), 2);
        assert_eq!(n[0].1.to_string(), "III");
        assert!((n[0].0 - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(n[1].1.to_string(), "IZI");
        assert!((n[1].0 - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn core_only_is_identity() {
        let mut ints = MolecularIntegrals::zeros(2, 1, 1).unwrap();
        ints.e_core = 0.42;
        let h = jordan_wigner(&ints);
        assert_eq!(h.terms.len(), 1);
        assert!(h.terms[0].1.is_identity());
        assert_eq!(h.terms[0].0, 0.42);
    }

    #[test]
    fn anticommutation() {
        let a0 = ladder(3, 0, false);
        let a2d = ladder(3, 2, true);
        let mut s = a0.mul(&a2d);
        s.add_scaled(&a2d.mul(&a0), Complex64::new(1.0, 0.0));
        assert!(s.to_sorted().is_empty());
        let mut t = ladder(3, 1, false).mul(&ladder(3, 1, true));
        t.add_scaled(&ladder(3, 1, true).mul(&ladder(3, 1, false)), Complex64::new(1.0, 0.0));
        let t = t.to_sorted();
        assert_eq!(t.len(), 1);
        assert!(t[0].1.is_identity());
    }

    /// Brute force over all 16 basis states of a random 2-orbital system.
    #[test]
    fn dense_matches_slater_condon_two_orbitals() {
        let ints = MolecularIntegrals::random(2, 1, 1, &mut rng::stream(11, &[]));
        let h = jordan_wigner(&ints);
        let dense = h.to_dense();
        for bra in 0..16u64 {
            for ket in 0..16u64 {
                let x = Determinant::from_spin_orbitals(bra);
                let y = Determinant::from_spin_orbitals(ket);
                let m = dense[(bra * 16 + ket) as usize];
                assert!(m.im.abs() < 1e-12);
                if x.sector() == y.sector() {
                    let sc = slater_condon(&x, &y, &ints).unwrap();
                    assert!((m.re - sc).abs() < 1e-10, "{x} {y}: {} vs {sc}", m.re);
                } else {
                    assert!(m.re.abs() < 1e-12);
                }
            }
        }
    }
}
