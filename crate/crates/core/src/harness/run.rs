//! The generative optimization loop, the random-circuit control and the
//! baseline delegations.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;

use super::config::ExperimentConfig;
use crate::baselines::{
    exact_state_qsci_from, sqdrift_qsci, time_evolved_qsci, BaselineResult, BaselineRow, SqDriftConfig, TimeEvolvedConfig,
    TimeEvolvedMode,
};
use crate::hamiltonian::slater_condon::diagonal;
use crate::hamiltonian::{
    fci_ground_state, jordan_wigner, read_fcidump, sector_dimension, MolecularIntegrals, PauliHamiltonian, DEFAULT_FCI_CAP,
};
use crate::policy::{
    adamw_step, compute_advantages, grpo_loss_and_grad, pool_index, sample_sequences, AdamState, PolicyConfig,
    PolicyParameters, SampledBatch,
};
use crate::pool::{build_pool, mp2_amplitudes, parse_amplitudes, OperatorPool};
use crate::qsci::{qsci_energy, SampledWavefunction};
use crate::refine::{global_refine, local_refine, RefinementState};
use crate::rng::{purpose, stream};
use crate::simulator::{gate_cost, run_circuit, sample, Circuit, GateCost};
use crate::{par, Error, Result};

/// Everything derived from the inputs that stays fixed during a run.
#[derive(Clone, Debug)]
pub struct Problem {
    pub ints: MolecularIntegrals,
    pub hamiltonian: PauliHamiltonian,
    pub pool: OperatorPool,
    pub e_fci: f64,
    pub e_hf: f64,
    pub ground: SampledWavefunction,
    pub sector_dim: usize,
}

impl Problem {
    /// Reads the FCIDUMP and amplitude file named in `cfg`. Without an
    /// amplitude file the pool is built from MP2 doubles.
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let ints = read_fcidump(&cfg.fcidump)?;
        let amps = match &cfg.amps {
            Some(p) => parse_amplitudes(&std::fs::read_to_string(p)?)?,
            None => mp2_amplitudes(&ints)?,
        };
        let n_qubits = 2 * ints.n_orb;
        let hf = ints.hf_determinant().spin_orbitals();
        for ex in &amps {
            ex.check_reference(hf, n_qubits)?;
        }
        let pool = build_pool(&amps, cfg.pool_threshold, n_qubits);
        Self::new(ints, pool)
    }

    pub fn new(ints: MolecularIntegrals, pool: OperatorPool) -> Result<Self> {
        let hamiltonian = jordan_wigner(&ints);
        let (e_fci, ground) = fci_ground_state(&ints, DEFAULT_FCI_CAP)?;
        let e_hf = diagonal(&ints.hf_determinant(), &ints);
        let sector_dim = sector_dimension(&ints);
        Ok(Self { ints, hamiltonian, pool, e_fci, e_hf, ground, sector_dim })
    }

    pub fn d_max(&self, cfg: &ExperimentConfig) -> usize {
        cfg.d_max.unwrap_or(self.sector_dim)
    }

    pub fn circuit(&self, pool_tokens: &[usize]) -> Circuit {
        self.pool.circuit(self.ints.hf_determinant(), pool_tokens)
    }
}

/// One quantum-pipeline evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Pool indices in application order.
    pub tokens: Vec<usize>,
    /// `None` when no sampled bitstring was in the electron sector.
    pub energy: Option<f64>,
    pub n_dets: usize,
    pub unique_bitstrings: usize,
    pub cost: GateCost,
}

#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub iter: usize,
    pub evaluations: Vec<Evaluation>,
    /// Rewards actually used; empty subspaces score `−max(E_HF, worst)`.
    pub rewards: Vec<f64>,
    pub best_so_far: f64,
    pub e_local: f64,
    pub e_global: f64,
    pub n_local: usize,
    pub n_global: usize,
    /// Shots consumed up to and including this iteration.
    pub cumulative_shots: u64,
    /// Distinct bitstrings observed up to and including this iteration.
    pub cumulative_unique: usize,
    /// Cost of the best circuit found so far.
    pub best_cost: GateCost,
    pub wall_seconds: f64,
}

// Wall time is excluded so that reruns compare equal.
impl PartialEq for IterationRecord {
    fn eq(&self, o: &Self) -> bool {
        self.iter == o.iter
            && self.evaluations == o.evaluations
            && self.rewards == o.rewards
            && self.best_so_far == o.best_so_far
            && self.e_local == o.e_local
            && self.e_global == o.e_global
            && self.n_local == o.n_local
            && self.n_global == o.n_global
            && self.cumulative_shots == o.cumulative_shots
            && self.cumulative_unique == o.cumulative_unique
            && self.best_cost == o.best_cost
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRow {
    pub iter: usize,
    pub update: usize,
    pub loss: f64,
    pub mean_reward: f64,
    pub best_energy: f64,
}

/// Circuit with the lowest recorded batch energy.
#[derive(Clone, Debug, PartialEq)]
pub struct BestCircuit {
    pub iter: usize,
    pub index: usize,
    pub tokens: Vec<usize>,
    pub energy: f64,
    pub circuit: Circuit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub method: String,
    pub e_fci: f64,
    pub e_hf: f64,
    pub d_max: usize,
    pub n_shots: u64,
    pub iterations: Vec<IterationRecord>,
    pub training: Vec<TrainingRow>,
    pub refinement: RefinementState,
    pub best: Option<BestCircuit>,
    /// Set for the delegated baselines.
    pub baseline: Option<BaselineRow>,
}

impl RunRecord {
    pub fn best_so_far(&self) -> Option<f64> {
        self.iterations.last().map(|r| r.best_so_far)
    }

    pub fn global_energy(&self) -> Option<f64> {
        self.iterations.last().map(|r| r.e_global)
    }

    pub fn total_shots(&self) -> u64 {
        self.iterations.last().map_or(0, |r| r.cumulative_shots)
    }
}

/// Where token sequences come from.
enum Sampler {
    Policy { params: PolicyParameters, adam: AdamState, step: u64 },
    Uniform,
}

/// Mutable loop state shared by the policy and random runs.
struct Tracker {
    best: Option<BestCircuit>,
    best_so_far: f64,
    best_cost: GateCost,
    shots: u64,
    seen: BTreeSet<u64>,
    refinement: RefinementState,
}

fn evaluate(problem: &Problem, tokens: &[usize], n_shots: u64, d_max: usize, seed: u64, iter: usize, m: usize) -> Result<(Evaluation, Option<SampledWavefunction>, Vec<u64>)> {
    let circuit = problem.circuit(tokens);
    let cost = gate_cost(&circuit);
    let state = run_circuit(&circuit);
    let mut rng = stream(seed, &[purpose::SHOTS, iter as u64, m as u64]);
    let hist = sample(&state, n_shots, &mut rng);
    let bits: Vec<u64> = hist.counts.keys().copied().collect();
    let wf = match crate::qsci::qsci_from_histogram(&hist, d_max, &problem.ints) {
        Ok(w) => Some(w),
        Err(Error::EmptySubspace) => None,
        Err(e) => return Err(e),
    };
    let ev = Evaluation {
        tokens: tokens.to_vec(),
        energy: wf.as_ref().map(|w| w.energy),
        n_dets: wf.as_ref().map_or(0, |w| w.len()),
        unique_bitstrings: bits.len(),
        cost,
    };
    Ok((ev, wf, bits))
}

fn draw_batch(sampler: &Sampler, problem: &Problem, cfg: &ExperimentConfig, iter: usize) -> Result<(SampledBatch, Vec<Vec<usize>>)> {
    let mut rng = stream(cfg.seed, &[purpose::POLICY, iter as u64]);
    match sampler {
        Sampler::Policy { params, .. } => {
            let batch = sample_sequences(params, cfg.m, cfg.length, cfg.repetition_penalty, &mut rng)?;
            let tokens = batch.sequences.iter().map(|s| s.iter().map(|&v| pool_index(v)).collect()).collect();
            Ok((batch, tokens))
        }
        Sampler::Uniform => {
            let n = problem.pool.len();
            let tokens: Vec<Vec<usize>> =
                (0..cfg.m).map(|_| (0..cfg.length).map(|_| rng.random_range(0..n)).collect()).collect();
            let batch = SampledBatch {
                sequences: tokens.iter().map(|s| s.iter().map(|t| t + 1).collect()).collect(),
                logprobs: Vec::new(),
                rewards: Vec::new(),
                advantages: Vec::new(),
            };
            Ok((batch, tokens))
        }
    }
}

fn one_iteration(
    sampler: &mut Sampler,
    problem: &Problem,
    cfg: &ExperimentConfig,
    d_max: usize,
    iter: usize,
    tr: &mut Tracker,
    training: &mut Vec<TrainingRow>,
) -> Result<IterationRecord> {
    let start = Instant::now();
    let (mut batch, tokens) = draw_batch(sampler, problem, cfg, iter)?;

    let results = par::map_range(cfg.m, |m| evaluate(problem, &tokens[m], cfg.n_shots, d_max, cfg.seed, iter, m));
    let mut evaluations = Vec::with_capacity(cfg.m);
    let mut wfs = Vec::new();
    for r in results {
        let (ev, wf, bits) = r?;
        tr.seen.extend(bits);
        tr.shots += cfg.n_shots;
        evaluations.push(ev);
        wfs.extend(wf);
    }
    if wfs.is_empty() {
        return Err(Error::EmptySubspace);
    }

    let worst = evaluations.iter().filter_map(|e| e.energy).fold(problem.e_hf, f64::max);
    let rewards: Vec<f64> = evaluations.iter().map(|e| -e.energy.unwrap_or(worst)).collect();

    for (m, ev) in evaluations.iter().enumerate() {
        if let Some(e) = ev.energy {
            if tr.best.as_ref().is_none_or(|b| e < b.energy) {
                tr.best = Some(BestCircuit {
                    iter,
                    index: m,
                    tokens: ev.tokens.clone(),
                    energy: e,
                    circuit: problem.circuit(&ev.tokens),
                });
                tr.best_cost = ev.cost;
            }
        }
    }
    tr.best_so_far = tr.best.as_ref().map_or(f64::INFINITY, |b| b.energy);

    if let Sampler::Policy { params, adam, step } = sampler {
        batch.rewards = rewards.clone();
        batch.advantages = compute_advantages(&rewards, cfg.grpo.sigma_floor);
        let mean_reward = rewards.iter().sum::<f64>() / rewards.len() as f64;
        // All-zero advantages give a zero surrogate gradient; decay alone
        // would still move the weights, so the batch is skipped.
        if batch.advantages.iter().any(|&a| a != 0.0) {
            let old = batch.logprobs.clone();
            for u in 0..cfg.grpo.updates_per_batch {
                let (loss, grad) = grpo_loss_and_grad(params, &old, &batch, &cfg.grpo)?;
                *step += 1;
                adamw_step(params, &grad, *step, &cfg.grpo, adam)?;
                training.push(TrainingRow { iter, update: u, loss, mean_reward, best_energy: tr.best_so_far });
            }
        }
    }

    let local = local_refine(&wfs, d_max, &problem.ints)?;
    let (e_local, n_local) = (local.energy, local.len());
    tr.refinement = global_refine(std::mem::take(&mut tr.refinement), local, d_max, &problem.ints)?;
    let global = tr.refinement.global.as_ref().expect("global set after refinement");

    Ok(IterationRecord {
        iter,
        evaluations,
        rewards,
        best_so_far: tr.best_so_far,
        e_local,
        e_global: global.energy,
        n_local,
        n_global: global.len(),
        cumulative_shots: tr.shots,
        cumulative_unique: tr.seen.len(),
        best_cost: tr.best_cost,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_loop(problem: &Problem, cfg: &ExperimentConfig, mut sampler: Sampler, method: &str) -> Result<RunRecord> {
    cfg.validate()?;
    let d_max = problem.d_max(cfg);
    let mut tr = Tracker {
        best: None,
        best_so_far: f64::INFINITY,
        best_cost: GateCost::default(),
        shots: 0,
        seen: BTreeSet::new(),
        refinement: RefinementState::new(),
    };
    let mut iterations = Vec::with_capacity(cfg.n_iter);
    let mut training = Vec::new();
    for iter in 0..cfg.n_iter {
        let rec = one_iteration(&mut sampler, problem, cfg, d_max, iter, &mut tr, &mut training)
            .map_err(|e| Error::Iteration { iter, source: Box::new(e) })?;
        iterations.push(rec);
    }
    Ok(RunRecord {
        method: method.to_string(),
        e_fci: problem.e_fci,
        e_hf: problem.e_hf,
        d_max,
        n_shots: cfg.n_shots,
        iterations,
        training,
        refinement: tr.refinement,
        best: tr.best,
        baseline: None,
    })
}

pub fn policy_config(problem: &Problem, cfg: &ExperimentConfig) -> PolicyConfig {
    PolicyConfig {
        d_model: cfg.d_model,
        n_heads: cfg.n_heads,
        n_layers: cfg.n_layers,
        d_ff: cfg.d_ff,
        repetition_penalty: cfg.repetition_penalty,
        ..PolicyConfig::new(problem.pool.len(), cfg.length, cfg.seed)
    }
}

/// Policy-driven loop: sample, evaluate, GRPO-update, refine.
pub fn run_gqe(problem: &Problem, cfg: &ExperimentConfig) -> Result<RunRecord> {
    let pc = policy_config(problem, cfg);
    let params = PolicyParameters::init(pc, &mut stream(cfg.seed, &[purpose::INIT]))?;
    let adam = AdamState::new(params.len());
    run_loop(problem, cfg, Sampler::Policy { params, adam, step: 0 }, "gqe")
}

/// Same loop with uniformly drawn tokens and no learning.
pub fn run_random_baseline(problem: &Problem, cfg: &ExperimentConfig) -> Result<RunRecord> {
    run_loop(problem, cfg, Sampler::Uniform, "random")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    TimeEvolved,
    SqDrift,
    Exact,
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time_evolved" | "time-evolved" | "te" => Ok(Self::TimeEvolved),
            "sqdrift" => Ok(Self::SqDrift),
            "exact" => Ok(Self::Exact),
            _ => Err(Error::Config(format!("unknown baseline '{s}' (time_evolved, sqdrift, exact)"))),
        }
    }
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::TimeEvolved => "time_evolved",
            Self::SqDrift => "sqdrift",
            Self::Exact => "exact",
        }
    }
}

/// One baseline evaluation with the shared shot budget, as a single-row record.
pub fn run_baseline(problem: &Problem, cfg: &ExperimentConfig, which: BaselineKind) -> Result<RunRecord> {
    let start = Instant::now();
    let d_max = problem.d_max(cfg);
    let shots = cfg.baseline_budget();
    let mut rng = stream(cfg.seed, &[purpose::CIRCUIT, which as u64]);
    let (res, param): (BaselineResult, String) = match which {
        BaselineKind::TimeEvolved => {
            let te = match cfg.te_mode {
                TimeEvolvedMode::Single => TimeEvolvedConfig { trotter_steps: cfg.trotter_steps, ..TimeEvolvedConfig::single(cfg.te_dt, shots) },
                TimeEvolvedMode::Multiple => TimeEvolvedConfig { trotter_steps: cfg.trotter_steps, ..TimeEvolvedConfig::multiple(shots) },
            };
            let p = match te.mode {
                TimeEvolvedMode::Single => format!("dt={}", te.dt),
                TimeEvolvedMode::Multiple => "k=1..5".to_string(),
            };
            (time_evolved_qsci(&te, &problem.ints, &problem.hamiltonian, d_max, &mut rng)?, p)
        }
        BaselineKind::SqDrift => {
            let sq = SqDriftConfig { randomizations: cfg.sqdrift_randomizations, ..SqDriftConfig::new(cfg.sqdrift_excitations, shots) };
            let p = format!("n_exc={}", sq.n_excitations);
            (sqdrift_qsci(&sq, &problem.ints, &problem.hamiltonian, d_max, &mut rng)?, p)
        }
        BaselineKind::Exact => (exact_state_qsci_from(&problem.ground, &problem.ints, shots, d_max, &mut rng)?, String::new()),
    };
    let wf = res.wavefunction;
    let row = BaselineRow {
        method: which.name().to_string(),
        param,
        shots: res.shots,
        cost: res.cost,
        n_dets: wf.len(),
        energy: wf.energy,
        error: wf.energy - problem.e_fci,
    };
    let rec = IterationRecord {
        iter: 0,
        evaluations: vec![Evaluation {
            tokens: Vec::new(),
            energy: Some(wf.energy),
            n_dets: wf.len(),
            unique_bitstrings: res.histogram.unique(),
            cost: res.cost,
        }],
        rewards: vec![-wf.energy],
        best_so_far: wf.energy,
        e_local: wf.energy,
        e_global: wf.energy,
        n_local: wf.len(),
        n_global: wf.len(),
        cumulative_shots: res.shots,
        cumulative_unique: res.histogram.unique(),
        best_cost: res.cost,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let refinement = global_refine(RefinementState::new(), wf, d_max, &problem.ints)?;
    Ok(RunRecord {
        method: which.name().to_string(),
        e_fci: problem.e_fci,
        e_hf: problem.e_hf,
        d_max,
        n_shots: shots,
        iterations: vec![rec],
        training: Vec::new(),
        refinement,
        best: None,
        baseline: Some(row),
    })
}

/// QSCI energy of `circuit` re-evaluated on a fresh stream.
pub fn reevaluate(problem: &Problem, circuit: &Circuit, n_shots: u64, d_max: usize, seed: u64, tag: u64) -> Result<SampledWavefunction> {
    let state = run_circuit(circuit);
    qsci_energy(&state, n_shots, d_max, &problem.ints, &mut stream(seed, &[purpose::REEVAL, tag]))
}
