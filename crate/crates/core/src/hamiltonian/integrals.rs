use rand::Rng;

use super::determinant::{Determinant, MAX_ORBITALS};
use crate::{Error, Result};

/// Spatial-orbital molecular integrals (Hartree).
///
/// Two-electron integrals are chemists' notation `(pq|rs)` stored densely
/// with the 8-fold permutational symmetry expanded, which is affordable up to
/// a few dozen orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub e_core: f64,
    h1: Vec<f64>,
    h2: Vec<f64>,
    pub orb_energies: Option<Vec<f64>>,
}

impl MolecularIntegrals {
    /// Zero integrals for `n_orb` orbitals; fill with the setters.
    pub fn zeros(n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_orb > MAX_ORBITALS {
            return Err(Error::Config(format!("at most {MAX_ORBITALS} orbitals are supported, got {n_orb}")));
        }
        if n_alpha > n_orb || n_beta > n_orb {
            return Err(Error::Config(format!(
                "electron counts ({n_alpha}, {n_beta}) exceed {n_orb} orbitals"
            )));
        }
        Ok(Self {
            n_orb,
            n_alpha,
            n_beta,
            e_core: 0.0,
            h1: vec![0.0; n_orb * n_orb],
            h2: vec![0.0; n_orb.pow(4)],
            orb_energies: None,
        })
    }

    #[inline]
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_orb + q]
    }

    #[inline]
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orb;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    /// Sets `h1[p][q]` and `h1[q][p]`.
    pub fn set_h1(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_orb;
        self.h1[p * n + q] = v;
        self.h1[q * n + p] = v;
    }

    /// Sets `(pq|rs)` and its seven symmetry partners.
    pub fn set_h2(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orb;
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.h2[((a * n + b) * n + c) * n + d] = v;
        }
    }

    pub fn hf_determinant(&self) -> Determinant {
        hf_determinant(self)
    }

    /// Checks the symmetry invariants within `tol`.
    pub fn check_symmetry(&self, tol: f64) -> bool {
        let n = self.n_orb;
        for p in 0..n {
            for q in 0..n {
                if (self.h1(p, q) - self.h1(q, p)).abs() > tol {
                    return false;
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        if (v - self.h2(q, p, r, s)).abs() > tol
                            || (v - self.h2(p, q, s, r)).abs() > tol
                            || (v - self.h2(r, s, p, q)).abs() > tol
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Random integrals with the full symmetry, for property tests and benches.
    ///
    /// One-body entries are uniform in `[-1, 1]` with an ascending diagonal
    /// shift so the aufbau determinant is a sensible reference; two-body
    /// entries are uniform in `[-0.25, 0.25]` with positive Coulomb-like
    /// `(pp|qq)`.
    pub fn random<R: Rng>(n_orb: usize, n_alpha: usize, n_beta: usize, rng: &mut R) -> Self {
        let mut ints = Self::zeros(n_orb, n_alpha, n_beta).expect("valid random dimensions");
        ints.e_core = rng.random_range(-1.0..1.0);
        for p in 0..n_orb {
            for q in 0..=p {
                let mut v = rng.random_range(-0.3..0.3);
                if p == q {
                    v += -2.0 + p as f64 * 0.7;
                }
                ints.set_h1(p, q, v);
            }
        }
        for p in 0..n_orb {
            for q in 0..=p {
                for r in 0..n_orb {
                    for s in 0..=r {
                        if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                            continue;
                        }
                        let mut v: f64 = rng.random_range(-0.25..0.25);
                        if p == q && r == s {
                            v = v.abs() + 0.3;
                        }
                        ints.set_h2(p, q, r, s, v);
                    }
                }
            }
        }
        ints.orb_energies = Some((0..n_orb).map(|p| ints.h1(p, p)).collect());
        ints
    }
}

/// Aufbau reference: lowest `n_alpha` α and `n_beta` β orbitals occupied.
pub fn hf_determinant(ints: &MolecularIntegrals) -> Determinant {
    let mask = |k: usize| if k == 0 { 0 } else { u64::MAX >> (64 - k) };
    Determinant::new(mask(ints.n_alpha), mask(ints.n_beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn hf_bits() {
        let ints = MolecularIntegrals::zeros(4, 2, 2).unwrap();
        assert_eq!(hf_determinant(&ints), Determinant::new(0b0011, 0b0011));
        let ints = MolecularIntegrals::zeros(4, 0, 1).unwrap();
        assert_eq!(hf_determinant(&ints).alpha, 0);
        let ints = MolecularIntegrals::zeros(8, 5, 5).unwrap();
        assert_eq!(hf_determinant(&ints).sector(), (5, 5));
    }

    #[test]
    fn random_is_symmetric() {
        let ints = MolecularIntegrals::random(4, 2, 1, &mut rng::stream(3, &[]));
        assert!(ints.check_symmetry(1e-14));
    }

    #[test]
    fn rejects_overfull_sector() {
        assert!(MolecularIntegrals::zeros(2, 3, 0).is_err());
    }
}
