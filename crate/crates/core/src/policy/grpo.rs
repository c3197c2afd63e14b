use nalgebra::DMatrix;

use super::model::PolicyParameters;
use super::sampling::{log_softmax, penalize, SampledBatch, START_TOKEN};
use crate::{par, Error, Result};

/// Sequences per batched forward/backward pass in the loss.
const GRAD_CHUNK: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct GrpoConfig {
    pub clip_eps: f64,
    pub updates_per_batch: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub sigma_floor: f64,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        Self { clip_eps: 0.2, updates_per_batch: 30, learning_rate: 5e-6, weight_decay: 0.01, sigma_floor: 1e-8 }
    }
}

/// `(r − mean) / σ` with the population standard deviation; all zeros when
/// `σ < sigma_floor`.
pub fn compute_advantages(rewards: &[f64], sigma_floor: f64) -> Vec<f64> {
    let m = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / m;
    let sigma = (rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / m).sqrt();
    if !(sigma >= sigma_floor) {
        return vec![0.0; rewards.len()];
    }
    rewards.iter().map(|r| (r - mean) / sigma).collect()
}

/// Clipped surrogate loss averaged over the `M` sequences and `L` steps, and
/// its gradient. At the clip boundary the unclipped branch is used.
pub fn grpo_loss_and_grad(
    params: &PolicyParameters,
    old_logprobs: &[Vec<f64>],
    batch: &SampledBatch,
    cfg: &GrpoConfig,
) -> Result<(f64, Vec<f64>)> {
    let m = batch.len();
    if m == 0 || batch.advantages.len() != m || old_logprobs.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: batch.advantages.len().min(old_logprobs.len()) });
    }
    let penalty = params.config.repetition_penalty;
    let v = params.config.vocab_size;
    let l = batch.sequences[0].len();
    let norm = 1.0 / (m * l) as f64;
    // Chunks are fixed in size, not per thread, so the summation order and
    // hence the result do not depend on the backend.
    let starts: Vec<usize> = (0..m).step_by(GRAD_CHUNK).collect();
    let per_chunk = par::map_slice(&starts, |&start| -> Result<(f64, Vec<f64>)> {
        let idx = start..(start + GRAD_CHUNK).min(m);
        let inputs: Vec<Vec<usize>> = idx
            .clone()
            .map(|i| {
                let seq = &batch.sequences[i];
                let mut input = vec![START_TOKEN];
                input.extend_from_slice(&seq[..seq.len().saturating_sub(1)]);
                input
            })
            .collect();
        let refs: Vec<&[usize]> = inputs.iter().map(|x| x.as_slice()).collect();
        let (logits, cache) = params.forward_cached(&refs)?;
        let mut dlogits = DMatrix::zeros(logits.nrows(), v);
        let mut loss = 0.0;
        for (b, i) in idx.enumerate() {
            let adv = batch.advantages[i];
            let mut emitted = vec![false; v];
            for (t, &tok) in batch.sequences[i].iter().enumerate() {
                let r = b * l + t;
                let row: Vec<f64> = logits.row(r).iter().copied().collect();
                let (pen, deriv) = penalize(&row, &emitted, penalty);
                let logp = log_softmax(&pen);
                emitted[tok] = true;
                let rho = (logp[tok] - old_logprobs[i][t]).exp();
                let clipped = rho.clamp(1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
                let (a, c) = (rho * adv, clipped * adv);
                loss -= norm * a.min(c);
                if c < a {
                    continue;
                }
                // ∂(−norm·ρA)/∂l_k = −norm·A·ρ·(δ_k,tok − p_k)·∂l'_k/∂l_k
                let w = -norm * adv * rho;
                if w == 0.0 {
                    continue;
                }
                for k in 0..v {
                    let p = if logp[k] == f64::NEG_INFINITY { 0.0 } else { logp[k].exp() };
                    let onehot = if k == tok { 1.0 } else { 0.0 };
                    dlogits[(r, k)] = w * (onehot - p) * deriv[k];
                }
            }
        }
        let mut grad = vec![0.0; params.len()];
        if dlogits.iter().any(|x| *x != 0.0) {
            params.backward(&cache, &dlogits, &mut grad);
        }
        Ok((loss, grad))
    });
    let mut loss = 0.0;
    let mut grad = vec![0.0; params.len()];
    for r in per_chunk {
        let (l, g) = r?;
        loss += l;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("GRPO loss"));
    }
    Ok((loss, grad))
}
