//! Generative circuit design for quantum-selected configuration interaction (QSCI).
//!
//! The crate is organised bottom-up:
//!
//! * [`hamiltonian`] parses FCIDUMP integrals, evaluates Slater–Condon matrix
//!   elements, builds the Jordan–Wigner Pauli Hamiltonian and exact references.
//! * [`simulator`] is a statevector simulator for Pauli-rotation circuits with
//!   Trotter / qDRIFT circuit builders, shot sampling and gate accounting.
//! * [`qsci`] turns shot histograms into determinant subspaces (sector
//!   filtering, spin-symmetry completion, truncation) and diagonalizes them.
//! * [`pool`] builds the fixed-angle single-Pauli operator vocabulary.
//! * [`policy`] is a small decoder-only Transformer trained with GRPO.
//! * [`refine`] merges sparse wavefunctions through a generalized eigenproblem.
//! * [`baselines`] holds the time-evolved, randomized and exact-state families
//!   and the simultaneous-perturbation VQE optimizer.
//! * [`harness`] wires everything into the optimization loop and CSV reports.
//!
//! Data-parallel loops go through [`par`]; with the default `parallel`
//! feature they run on rayon, otherwise sequentially with identical results.

pub mod baselines;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod linalg;
pub mod par;
pub mod policy;
pub mod pool;
pub mod qsci;
pub mod refine;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_PRECISION: f64 = 1.5936e-3;
