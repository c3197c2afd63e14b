//! QSCI core: determinant selection from shot histograms, spin-symmetry
//! completion, truncation to `d_max`, and subspace diagonalization.

pub mod completion;
pub mod selection;
pub mod subspace;
pub mod wavefunction;

pub use completion::{completion_class, symmetry_complete};
pub use selection::{select_determinants, truncate, DeterminantSet};
pub use subspace::{diagonalize_determinants, diagonalize_subspace, expectation};
pub use wavefunction::SampledWavefunction;

use crate::hamiltonian::MolecularIntegrals;
use crate::rng::Stream;
use crate::simulator::{sample, ShotHistogram, Statevector};
use crate::Result;

/// Sector filter, completion, truncation and diagonalization of a histogram.
pub fn qsci_from_histogram(h: &ShotHistogram, d_max: usize, ints: &MolecularIntegrals) -> Result<SampledWavefunction> {
    let sector = (ints.n_alpha as u32, ints.n_beta as u32);
    let selected = select_determinants(h, sector);
    let completed = symmetry_complete(&selected);
    let kept = truncate(&completed, d_max);
    diagonalize_subspace(&kept, ints)
}

/// Sample → select → complete → truncate → diagonalize.
pub fn qsci_energy(
    state: &Statevector,
    n_shots: u64,
    d_max: usize,
    ints: &MolecularIntegrals,
    rng: &mut Stream,
) -> Result<SampledWavefunction> {
    let h = sample(state, n_shots, rng);
    qsci_from_histogram(&h, d_max, ints)
}
