//! Discrete operator vocabulary: one fixed-angle Pauli rotation per
//! excitation channel, plus the identity.

pub mod build;
pub mod excitation;

pub use build::{build_pool, representative, OperatorPool, PoolToken, TokenSource, DEFAULT_THRESHOLD};
pub use excitation::{mp2_amplitudes, parse_amplitudes, Excitation};

use crate::hamiltonian::Determinant;
use crate::simulator::Circuit;

impl OperatorPool {
    /// Circuit `U_{s_L} ⋯ U_{s_1}` acting on `initial`, with `tokens` given
    /// as pool indices in application order.
    pub fn circuit(&self, initial: Determinant, tokens: &[usize]) -> Circuit {
        let mut c = Circuit::new(self.n_qubits, initial);
        for &t in tokens {
            let tok = &self.tokens[t];
            if !tok.pauli.is_identity() {
                c.push(tok.pauli, tok.angle);
            }
        }
        c
    }
}
