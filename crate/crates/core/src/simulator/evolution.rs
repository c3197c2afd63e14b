//! Time-evolution circuit builders.
//!
//! Rotations use the `exp(iθP)` convention, so `exp(-i c t P)` is `θ = -c t`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use super::circuit::Circuit;
use crate::hamiltonian::{Determinant, PauliHamiltonian, PauliString};
use crate::rng::Stream;
use crate::{Error, Result};

/// Non-identity terms by descending `|c|`, ties in canonical string order.
pub fn trotter_order(h: &PauliHamiltonian) -> Vec<(f64, PauliString)> {
    let mut terms: Vec<(f64, PauliString)> = h.non_identity().filter(|(c, _)| *c != 0.0).copied().collect();
    terms.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()).then(a.1.cmp(&b.1)));
    terms
}

/// First-order product formula: `steps` repetitions of one rotation per term.
/// The identity term only contributes a global phase and is skipped.
pub fn trotter_circuit(h: &PauliHamiltonian, t: f64, steps: usize, initial: Determinant) -> Circuit {
    let mut c = Circuit::new(h.n_qubits, initial);
    if t == 0.0 || steps == 0 {
        return c;
    }
    let dt = t / steps as f64;
    let order = trotter_order(h);
    for _ in 0..steps {
        for (coef, p) in &order {
            c.push(*p, -coef * dt);
        }
    }
    c
}

/// qDRIFT: `n_samples` rotations, each term drawn with probability `|c_j|/λ`
/// and rotated by `-sign(c_j) λ t / n_samples`.
pub fn qdrift_circuit(
    h: &PauliHamiltonian,
    t: f64,
    n_samples: usize,
    initial: Determinant,
    rng: &mut Stream,
) -> Result<Circuit> {
    let terms: Vec<(f64, PauliString)> = h.non_identity().filter(|(c, _)| *c != 0.0).copied().collect();
    if terms.is_empty() {
        return Err(Error::TrivialHamiltonian);
    }
    let lambda: f64 = terms.iter().map(|(c, _)| c.abs()).sum();
    let dist = WeightedIndex::new(terms.iter().map(|(c, _)| c.abs())).map_err(|e| Error::Config(e.to_string()))?;
    let tau = lambda * t / n_samples.max(1) as f64;
    let mut c = Circuit::new(h.n_qubits, initial);
    for _ in 0..n_samples {
        let (coef, p) = terms[dist.sample(rng)];
        c.push(p, -coef.signum() * tau);
    }
    Ok(c)
}
