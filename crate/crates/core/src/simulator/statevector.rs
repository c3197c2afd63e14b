use num_complex::Complex64;

use crate::hamiltonian::PauliString;
use crate::{par, Error, Result};

/// Dense `2^n` amplitude vector; basis index bit `q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: u64) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if !n.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: n.next_power_of_two(), got: n });
        }
        Ok(Self { n_qubits: n.trailing_zeros() as usize, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// In place `|ψ⟩ ← exp(iθP)|ψ⟩ = cos θ|ψ⟩ + i sin θ P|ψ⟩`.
    pub fn apply_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if p.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: p.n_qubits });
        }
        if theta == 0.0 {
            return Ok(());
        }
        let (s, c) = theta.sin_cos();
        let (x, z) = (p.x, p.z);
        let base = (x & z).count_ones();
        // i sin θ · i^{|x∧z|} as one complex factor; the (-1)^{|z∧b|} sign is per index.
        let factor = Complex64::new(0.0, s) * crate::hamiltonian::pauli::phase((base % 4) as u8);
        if x == 0 {
            let plus = c + factor;
            let minus = c - factor;
            let amps = &mut self.amplitudes;
            let src = amps.clone();
            par::fill_indexed(amps, |b| {
                let f = if (z & b as u64).count_ones().is_multiple_of(2) { plus } else { minus };
                src[b] * f
            });
            return Ok(());
        }
        let src = self.amplitudes.clone();
        par::fill_indexed(&mut self.amplitudes, |b| {
            let partner = (b as u64) ^ x;
            let sign = if (z & partner).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            src[b] * c + factor * src[partner as usize] * sign
        });
        Ok(())
    }
}

/// `exp(iθP)|ψ⟩` as a new state.
pub fn apply_pauli_rotation(state: &Statevector, p: &PauliString, theta: f64) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply_rotation(p, theta)?;
    Ok(out)
}
