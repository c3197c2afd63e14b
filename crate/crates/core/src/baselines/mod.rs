//! Comparison state-preparation families and the simultaneous-perturbation
//! optimizer.

pub mod gspgs;
pub mod report;

pub use gspgs::{gspgs_minimize, gspgs_optimize, GspgsResult, GspgsSchedule, GspgsStep};
pub use report::{write_baseline_csv, BaselineRow};

use crate::hamiltonian::{fci_ground_state, MolecularIntegrals, PauliHamiltonian, DEFAULT_FCI_CAP};
use crate::qsci::{qsci_from_histogram, SampledWavefunction};
use crate::rng::{fork, Stream};
use crate::simulator::{gate_cost, qdrift_circuit, run_circuit, sample, sample_distribution, trotter_circuit, Circuit, GateCost, ShotHistogram};
use crate::{par, Error, Result};

/// Output of one baseline run.
#[derive(Clone, Debug)]
pub struct BaselineResult {
    pub wavefunction: SampledWavefunction,
    /// Cost of the most expensive circuit that was executed.
    pub cost: GateCost,
    pub shots: u64,
    pub histogram: ShotHistogram,
    pub n_circuits: usize,
}

/// `budget` split over `n` parts: `floor(budget / n)` each, remainder to the
/// earliest parts.
pub fn split_shots(budget: u64, n: usize) -> Vec<u64> {
    let n64 = n as u64;
    let base = budget / n64;
    let rem = budget % n64;
    (0..n64).map(|i| base + u64::from(i < rem)).collect()
}

/// Simulates circuits (in parallel), samples each with its own stream, and
/// sums the histograms in circuit order.
fn sample_circuits(circuits: &[Circuit], shares: &[u64], streams: Vec<Stream>) -> (ShotHistogram, GateCost) {
    let jobs: Vec<(usize, Stream)> = streams.into_iter().enumerate().collect();
    let hists = par::map_slice(&jobs, |(i, s)| {
        if shares[*i] == 0 {
            return ShotHistogram::default();
        }
        sample(&run_circuit(&circuits[*i]), shares[*i], &mut s.clone())
    });
    let mut merged = ShotHistogram::default();
    for h in &hists {
        merged.merge(h);
    }
    let cost = circuits
        .iter()
        .zip(shares)
        .filter(|(_, &s)| s > 0)
        .map(|(c, _)| gate_cost(c))
        .fold(GateCost::default(), GateCost::max);
    (merged, cost)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeEvolvedMode {
    Single,
    Multiple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeEvolvedConfig {
    pub mode: TimeEvolvedMode,
    pub dt: f64,
    pub k_list: Vec<u32>,
    pub trotter_steps: usize,
    pub shots: u64,
}

impl TimeEvolvedConfig {
    /// `e^{-iHΔt}|HF⟩`.
    pub fn single(dt: f64, shots: u64) -> Self {
        Self { mode: TimeEvolvedMode::Single, dt, k_list: vec![1], trotter_steps: 1, shots }
    }

    /// `k = 1..5` at `Δt = 1`, shots split uniformly.
    pub fn multiple(shots: u64) -> Self {
        Self { mode: TimeEvolvedMode::Multiple, dt: 1.0, k_list: (1..=5).collect(), trotter_steps: 1, shots }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.k_list.is_empty() || self.trotter_steps == 0 {
            return Err(Error::Config("time evolution needs dt > 0, k values and at least one step".into()));
        }
        if self.mode == TimeEvolvedMode::Single && self.k_list != [1] {
            return Err(Error::Config("single mode uses k = 1".into()));
        }
        Ok(())
    }
}

/// QSCI on Trotterized `e^{-iHkΔt}|HF⟩` states with merged histograms.
pub fn time_evolved_qsci(
    cfg: &TimeEvolvedConfig,
    ints: &MolecularIntegrals,
    ham: &PauliHamiltonian,
    d_max: usize,
    rng: &mut Stream,
) -> Result<BaselineResult> {
    cfg.validate()?;
    let hf = ints.hf_determinant();
    let circuits: Vec<Circuit> = cfg
        .k_list
        .iter()
        .map(|&k| trotter_circuit(ham, k as f64 * cfg.dt, cfg.trotter_steps, hf))
        .collect();
    let shares = split_shots(cfg.shots, circuits.len());
    let streams = (0..circuits.len()).map(|i| fork(rng, &[i as u64])).collect();
    let (histogram, cost) = sample_circuits(&circuits, &shares, streams);
    let wavefunction = qsci_from_histogram(&histogram, d_max, ints)?;
    Ok(BaselineResult { wavefunction, cost, shots: histogram.n_shots, histogram, n_circuits: circuits.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqDriftConfig {
    /// qDRIFT gates per circuit.
    pub n_excitations: usize,
    pub randomizations: usize,
    pub k_list: Vec<u32>,
    pub shots: u64,
}

impl SqDriftConfig {
    pub fn new(n_excitations: usize, shots: u64) -> Self {
        Self { n_excitations, randomizations: 500, k_list: vec![1, 2, 3], shots }
    }
}

/// QSCI on independently drawn qDRIFT circuits for `t = k`.
pub fn sqdrift_qsci(
    cfg: &SqDriftConfig,
    ints: &MolecularIntegrals,
    ham: &PauliHamiltonian,
    d_max: usize,
    rng: &mut Stream,
) -> Result<BaselineResult> {
    if cfg.randomizations == 0 || cfg.k_list.is_empty() || cfg.n_excitations == 0 {
        return Err(Error::Config("SqDRIFT needs randomizations, k values and excitations".into()));
    }
    let hf = ints.hf_determinant();
    let mut circuits = Vec::with_capacity(cfg.k_list.len() * cfg.randomizations);
    for (ki, &k) in cfg.k_list.iter().enumerate() {
        for r in 0..cfg.randomizations {
            let mut s = fork(rng, &[ki as u64, r as u64]);
            circuits.push(qdrift_circuit(ham, k as f64, cfg.n_excitations, hf, &mut s)?);
        }
    }
    let shares = split_shots(cfg.shots, circuits.len());
    let streams = (0..circuits.len()).map(|i| fork(rng, &[u64::MAX, i as u64])).collect();
    let (histogram, cost) = sample_circuits(&circuits, &shares, streams);
    let wavefunction = qsci_from_histogram(&histogram, d_max, ints)?;
    Ok(BaselineResult { wavefunction, cost, shots: histogram.n_shots, histogram, n_circuits: circuits.len() })
}

/// QSCI on samples of a given exact ground state.
pub fn exact_state_qsci_from(
    ground: &SampledWavefunction,
    ints: &MolecularIntegrals,
    n_shots: u64,
    d_max: usize,
    rng: &mut Stream,
) -> Result<BaselineResult> {
    let probs: Vec<(u64, f64)> = ground.iter().map(|(d, c)| (d.spin_orbitals(), c * c)).collect();
    let histogram = sample_distribution(&probs, n_shots, rng);
    let wavefunction = qsci_from_histogram(&histogram, d_max, ints)?;
    Ok(BaselineResult { wavefunction, cost: GateCost::default(), shots: histogram.n_shots, histogram, n_circuits: 0 })
}

/// QSCI on samples of the exact sector ground state.
pub fn exact_state_qsci(ints: &MolecularIntegrals, n_shots: u64, d_max: usize, rng: &mut Stream) -> Result<BaselineResult> {
    let (_, ground) = fci_ground_state(ints, DEFAULT_FCI_CAP)?;
    exact_state_qsci_from(&ground, ints, n_shots, d_max, rng)
}

#[cfg(test)]
mod tests;
