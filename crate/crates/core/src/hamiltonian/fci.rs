use super::determinant::{binomial, sector_determinants};
use super::integrals::MolecularIntegrals;
use crate::qsci::{diagonalize_determinants, SampledWavefunction};
use crate::{Error, Result};

/// Default cap on the sector dimension for exact diagonalization.
pub const DEFAULT_FCI_CAP: usize = 1_000_000;

pub fn sector_dimension(ints: &MolecularIntegrals) -> usize {
    binomial(ints.n_orb, ints.n_alpha) * binomial(ints.n_orb, ints.n_beta)
}

/// Exact ground state over the whole `(n_alpha, n_beta)` sector.
pub fn fci_ground_state(ints: &MolecularIntegrals, cap: usize) -> Result<(f64, SampledWavefunction)> {
    let dim = sector_dimension(ints);
    if dim > cap {
        return Err(Error::SectorTooLarge { dim, cap });
    }
    let dets = sector_determinants(ints.n_orb, ints.n_alpha, ints.n_beta);
    let wf = diagonalize_determinants(&dets, ints)?;
    Ok((wf.energy, wf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{hf_determinant, slater_condon};
    use crate::rng;

    #[test]
    fn one_orbital_one_electron() {
        let mut ints = MolecularIntegrals::zeros(1, 1, 0).unwrap();
        ints.set_h1(0, 0, -0.75);
        ints.e_core = 0.25;
        let (e, wf) = fci_ground_state(&ints, DEFAULT_FCI_CAP).unwrap();
        assert_eq!(e, -0.5);
        assert_eq!(wf.len(), 1);
    }

    #[test]
    fn variational_below_hf() {
        for seed in 0..5 {
            let ints = MolecularIntegrals::random(4, 2, 1, &mut rng::stream(seed, &[]));
            let hf = hf_determinant(&ints);
            let (e, wf) = fci_ground_state(&ints, DEFAULT_FCI_CAP).unwrap();
            assert!(e <= slater_condon(&hf, &hf, &ints).unwrap() + 1e-12);
            assert!((wf.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_enforced() {
        let ints = MolecularIntegrals::zeros(6, 3, 3).unwrap();
        assert!(matches!(fci_ground_state(&ints, 100), Err(Error::SectorTooLarge { dim: 400, .. })));
    }
}
