//! Averaged simultaneous-perturbation gradient search.

use rand::Rng;

use crate::hamiltonian::slater_condon::diagonal;
use crate::hamiltonian::MolecularIntegrals;
use crate::pool::OperatorPool;
use crate::qsci::qsci_energy;
use crate::rng::{fork, Stream};
use crate::simulator::{run_circuit, Circuit};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct GspgsSchedule {
    pub eta0: f64,
    pub eta_exp: f64,
    pub offset: f64,
    pub c0: f64,
    pub c_exp: f64,
    pub n_perturbations: usize,
    pub iterations: usize,
}

impl Default for GspgsSchedule {
    fn default() -> Self {
        Self { eta0: 0.1, eta_exp: 0.602, offset: 10.0, c0: 0.05, c_exp: 0.101, n_perturbations: 5, iterations: 100 }
    }
}

impl GspgsSchedule {
    /// `η_t = η0 / (t + A + 1)^0.602`.
    pub fn eta(&self, t: usize) -> f64 {
        self.eta0 / (t as f64 + self.offset + 1.0).powf(self.eta_exp)
    }

    /// `c_t = c0 / (t + 1)^0.101`.
    pub fn c(&self, t: usize) -> f64 {
        self.c0 / (t as f64 + 1.0).powf(self.c_exp)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GspgsStep {
    pub t: usize,
    pub theta: Vec<f64>,
    pub grad_norm: f64,
    /// Lowest objective value seen so far.
    pub best: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GspgsResult {
    pub theta: Vec<f64>,
    pub trace: Vec<GspgsStep>,
    pub evaluations: usize,
}

/// Averaged estimator `ĝ_t` at `theta`, with the objective values it used.
pub fn gradient_estimate<F>(f: &mut F, theta: &[f64], c: f64, n_perturbations: usize, t: usize, rng: &mut Stream) -> (Vec<f64>, Vec<f64>)
where
    F: FnMut(&[f64], &mut Stream) -> f64,
{
    let p = theta.len();
    let mut g = vec![0.0; p];
    let mut values = Vec::with_capacity(2 * n_perturbations);
    for r in 0..n_perturbations {
        let delta: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(x, d)| x + c * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(x, d)| x - c * d).collect();
        let fp = f(&plus, &mut fork(rng, &[t as u64, r as u64, 0]));
        let fm = f(&minus, &mut fork(rng, &[t as u64, r as u64, 1]));
        values.extend([fp, fm]);
        let scale = (fp - fm) / (2.0 * c) / n_perturbations as f64;
        for (gi, d) in g.iter_mut().zip(&delta) {
            *gi += scale * d;
        }
    }
    (g, values)
}

/// Minimizes a stochastic objective `f(θ, stream)`; every evaluation gets a
/// fresh stream.
pub fn gspgs_minimize<F>(mut f: F, theta0: &[f64], sched: &GspgsSchedule, rng: &mut Stream) -> GspgsResult
where
    F: FnMut(&[f64], &mut Stream) -> f64,
{
    let mut theta = theta0.to_vec();
    let mut best = f64::INFINITY;
    let mut trace = Vec::with_capacity(sched.iterations);
    let mut evaluations = 0;
    for t in 0..sched.iterations {
        let (g, values) = gradient_estimate(&mut f, &theta, sched.c(t), sched.n_perturbations, t, rng);
        evaluations += values.len();
        best = values.iter().copied().fold(best, f64::min);
        let eta = sched.eta(t);
        for (x, gi) in theta.iter_mut().zip(&g) {
            *x -= eta * gi;
        }
        let grad_norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        trace.push(GspgsStep { t, theta: theta.clone(), grad_norm, best });
    }
    GspgsResult { theta, trace, evaluations }
}

/// Circuit for `tokens` (pool indices) with per-gate angles `theta`.
pub fn parameterized_circuit(pool: &OperatorPool, tokens: &[usize], theta: &[f64], ints: &MolecularIntegrals) -> Circuit {
    let mut c = Circuit::new(pool.n_qubits, ints.hf_determinant());
    for (&tok, &angle) in tokens.iter().zip(theta) {
        let p = pool.tokens[tok].pauli;
        if !p.is_identity() {
            c.push(p, angle);
        }
    }
    c
}

/// QSCI energy of a pool-token circuit with free angles, minimized by GSPGS.
/// A sample with no in-sector determinant scores the Hartree–Fock energy.
#[allow(clippy::too_many_arguments)]
pub fn gspgs_optimize(
    pool: &OperatorPool,
    tokens: &[usize],
    theta0: &[f64],
    sched: &GspgsSchedule,
    ints: &MolecularIntegrals,
    d_max: usize,
    n_shots: u64,
    rng: &mut Stream,
) -> GspgsResult {
    let e_hf = diagonal(&ints.hf_determinant(), ints);
    let objective = |theta: &[f64], s: &mut Stream| {
        let state = run_circuit(&parameterized_circuit(pool, tokens, theta, ints));
        match qsci_energy(&state, n_shots, d_max, ints, s) {
            Ok(w) => w.energy,
            Err(Error::EmptySubspace) => e_hf,
            Err(e) => panic!("QSCI objective failed: {e}"),
        }
    };
    gspgs_minimize(objective, theta0, sched, rng)
}
