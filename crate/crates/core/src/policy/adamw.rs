use super::grpo::GrpoConfig;
use super::model::PolicyParameters;
use crate::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPS: f64 = 1e-8;

/// First and second moment estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n] }
    }
}

/// One AdamW step (`step_index` starts at 1). Decay multiplies decayed
/// weights by `1 − lr·wd` before the Adam update; gains and biases are exempt.
pub fn adamw_step(
    params: &mut PolicyParameters,
    grad: &[f64],
    step_index: u64,
    cfg: &GrpoConfig,
    state: &mut AdamState,
) -> Result<()> {
    let n = params.len();
    for len in [grad.len(), state.m.len(), state.v.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    if step_index == 0 {
        return Err(Error::Config("AdamW steps are 1-based".into()));
    }
    let mask = params.layout.decay_mask();
    let lr = cfg.learning_rate;
    let bc1 = 1.0 - BETA1.powi(step_index as i32);
    let bc2 = 1.0 - BETA2.powi(step_index as i32);
    for k in 0..n {
        let g = grad[k];
        state.m[k] = BETA1 * state.m[k] + (1.0 - BETA1) * g;
        state.v[k] = BETA2 * state.v[k] + (1.0 - BETA2) * g * g;
        let p = &mut params.data[k];
        if mask[k] {
            *p *= 1.0 - lr * cfg.weight_decay;
        }
        *p -= lr * (state.m[k] / bc1) / ((state.v[k] / bc2).sqrt() + EPS);
    }
    Ok(())
}
