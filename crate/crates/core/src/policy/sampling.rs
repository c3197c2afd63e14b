use rand::Rng;

use super::model::PolicyParameters;
use crate::rng::{fork, Stream};
use crate::{Error, Result};

/// Start token id; never sampled.
pub const START_TOKEN: usize = 0;

/// `M` sampled sequences of vocabulary ids with their sampling log-probs.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledBatch {
    pub sequences: Vec<Vec<usize>>,
    /// `log π_old(s_t | q, s_<t)` of the penalized sampling distribution.
    pub logprobs: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
}

impl SampledBatch {
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

/// Logits after the repetition penalty and start-token mask, plus
/// `∂l'/∂l` per entry.
pub fn penalize(row: &[f64], emitted: &[bool], penalty: f64) -> (Vec<f64>, Vec<f64>) {
    let mut out = Vec::with_capacity(row.len());
    let mut deriv = Vec::with_capacity(row.len());
    for (k, &l) in row.iter().enumerate() {
        if k == START_TOKEN {
            out.push(f64::NEG_INFINITY);
            deriv.push(0.0);
        } else if emitted[k] {
            let f = if l > 0.0 { 1.0 / penalty } else { penalty };
            out.push(l * f);
            deriv.push(f);
        } else {
            out.push(l);
            deriv.push(1.0);
        }
    }
    (out, deriv)
}

pub fn log_softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    x.iter().map(|v| v - lse).collect()
}

fn draw(logp: &[f64], rng: &mut Stream) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = START_TOKEN;
    for (k, lp) in logp.iter().enumerate() {
        if *lp == f64::NEG_INFINITY {
            continue;
        }
        acc += lp.exp();
        last = k;
        if u < acc {
            return k;
        }
    }
    // Rounding left a sliver of mass above the cumulative sum.
    last
}

/// Draws `m` sequences of `length` tokens autoregressively. All prefixes
/// advance in lockstep through one batched forward pass per step; each
/// sequence draws from its own child stream.
pub fn sample_sequences(
    params: &PolicyParameters,
    m: usize,
    length: usize,
    penalty: f64,
    rng: &mut Stream,
) -> Result<SampledBatch> {
    if m < 2 {
        return Err(Error::Config("a batch needs at least two sequences".into()));
    }
    if length + 1 > params.config.context_len {
        return Err(Error::PrefixTooLong { len: length + 1, context: params.config.context_len });
    }
    let v = params.config.vocab_size;
    let mut streams: Vec<Stream> = (0..m).map(|i| fork(rng, &[i as u64])).collect();
    let mut prefixes = vec![vec![START_TOKEN]; m];
    let mut emitted = vec![vec![false; v]; m];
    let mut logprobs = vec![Vec::with_capacity(length); m];
    for t in 0..length {
        let refs: Vec<&[usize]> = prefixes.iter().map(|p| p.as_slice()).collect();
        let logits = params.forward_batch(&refs)?;
        for i in 0..m {
            let last: Vec<f64> = logits.row(i * (t + 1) + t).iter().copied().collect();
            let (pen, _) = penalize(&last, &emitted[i], penalty);
            let logp = log_softmax(&pen);
            let tok = draw(&logp, &mut streams[i]);
            logprobs[i].push(logp[tok]);
            emitted[i][tok] = true;
            prefixes[i].push(tok);
        }
    }
    let sequences = prefixes.into_iter().map(|mut p| p.split_off(1)).collect();
    Ok(SampledBatch { sequences, logprobs, rewards: Vec::new(), advantages: Vec::new() })
}

/// Per-step log-probs of `seq` under the penalized policy, from one
/// full-sequence forward pass.
pub fn sequence_logprobs(params: &PolicyParameters, seq: &[usize], penalty: f64) -> Result<Vec<f64>> {
    let mut input = vec![START_TOKEN];
    input.extend_from_slice(&seq[..seq.len().saturating_sub(1)]);
    let logits = params.forward(&input)?;
    let mut emitted = vec![false; params.config.vocab_size];
    let mut out = Vec::with_capacity(seq.len());
    for (t, &tok) in seq.iter().enumerate() {
        let row: Vec<f64> = logits.row(t).iter().copied().collect();
        let (pen, _) = penalize(&row, &emitted, penalty);
        out.push(log_softmax(&pen)[tok]);
        emitted[tok] = true;
    }
    Ok(out)
}
