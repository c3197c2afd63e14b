//! Molecular integrals, determinants, Slater–Condon matrix elements, the
//! Jordan–Wigner Pauli Hamiltonian and exact sector diagonalization.

pub mod determinant;
pub mod fcidump;
pub mod fci;
pub mod integrals;
pub mod jordan_wigner;
pub mod pauli;
pub mod slater_condon;

pub use determinant::{sector_determinants, Determinant};
pub use fci::{fci_ground_state, sector_dimension, DEFAULT_FCI_CAP};
pub use fcidump::{parse_fcidump, write_fcidump};
pub use integrals::{hf_determinant, MolecularIntegrals};
pub use jordan_wigner::jordan_wigner;
pub use pauli::{PauliHamiltonian, PauliString};
pub use slater_condon::slater_condon;

/// Reads and parses an FCIDUMP file.
pub fn read_fcidump(path: impl AsRef<std::path::Path>) -> crate::Result<MolecularIntegrals> {
    parse_fcidump(&std::fs::read_to_string(path)?)
}
