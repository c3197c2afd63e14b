//! Statevector simulation of Pauli-rotation circuits.

pub mod circuit;
pub mod cost;
pub mod evolution;
pub mod sampling;
pub mod statevector;

pub use circuit::{run_circuit, Circuit, Gate};
pub use cost::{gate_cost, rotation_cost, GateCost};
pub use evolution::{qdrift_circuit, trotter_circuit, trotter_order};
pub use sampling::{sample, sample_distribution, ShotHistogram};
pub use statevector::{apply_pauli_rotation, Statevector};
