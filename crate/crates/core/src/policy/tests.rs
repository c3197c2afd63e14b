use rand::Rng;

use super::*;
use crate::rng::stream;

fn tiny(vocab: usize, length: usize) -> PolicyConfig {
    PolicyConfig {
        vocab_size: vocab,
        context_len: length + 1,
        d_model: 8,
        n_heads: 2,
        n_layers: 2,
        d_ff: 16,
        repetition_penalty: 1.2,
        seed: 0,
    }
}

/// Random parameters with larger scale than the default init so that
/// finite-difference checks exercise every nonlinearity.
fn random_params(cfg: PolicyConfig, seed: u64) -> PolicyParameters {
    let mut rng = stream(seed, &[]);
    let mut p = PolicyParameters::zeros(cfg).unwrap();
    for x in &mut p.data {
        *x += rng.random_range(-0.5..0.5);
    }
    p
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

#[test]
fn zero_parameters_give_uniform_logits() {
    let cfg = PolicyConfig::new(5, 4, 0);
    let p = PolicyParameters::zeros(cfg).unwrap();
    let logits = p.forward(&[0, 3, 2]).unwrap();
    assert!(logits.iter().all(|&x| x == 0.0));
}

#[test]
fn prefix_validation() {
    let p = PolicyParameters::zeros(tiny(5, 3)).unwrap();
    assert!(p.forward(&[0, 1, 2]).is_ok());
    assert!(matches!(p.forward(&[0, 1, 2, 3]), Err(crate::Error::PrefixTooLong { .. })));
    assert!(p.forward(&[0, 9]).is_err());
    let mut bad = tiny(5, 3);
    bad.n_heads = 3;
    assert!(PolicyParameters::zeros(bad).is_err());
}

#[test]
fn causal_masking() {
    let p = random_params(tiny(7, 6), 1);
    let a = p.forward(&[0, 1, 2, 3, 4, 5]).unwrap();
    let b = p.forward(&[0, 1, 2, 6, 1, 1]).unwrap();
    for t in 0..3 {
        for k in 0..7 {
            assert_eq!(a[(t, k)], b[(t, k)]);
        }
    }
    assert_ne!(a[(3, 0)], b[(3, 0)]);
}

#[test]
fn logits_jacobian_matches_finite_differences() {
    let mut p = random_params(tiny(6, 4), 2);
    // Two stacked sequences exercise the block-diagonal attention.
    let tokens: [&[usize]; 2] = [&[0, 3, 1, 5], &[0, 2, 2, 4]];
    let mut rng = stream(3, &[]);
    // Random linear functional of the logits.
    let (logits, cache) = p.forward_cached(&tokens).unwrap();
    let w = nalgebra::DMatrix::from_fn(logits.nrows(), logits.ncols(), |_, _| rng.random_range(-1.0..1.0));
    let mut grad = vec![0.0; p.len()];
    p.backward(&cache, &w, &mut grad);
    let h = 1e-5;
    for k in 0..p.len() {
        let orig = p.data[k];
        p.data[k] = orig + h;
        let fp = p.forward_batch(&tokens).unwrap().component_mul(&w).sum();
        p.data[k] = orig - h;
        let fm = p.forward_batch(&tokens).unwrap().component_mul(&w).sum();
        p.data[k] = orig;
        let fd = (fp - fm) / (2.0 * h);
        assert!(rel_err(grad[k], fd) < 1e-4, "coord {k}: {} vs {fd}", grad[k]);
    }
}

#[test]
fn sampling_contracts() {
    let p = random_params(tiny(6, 5), 4);
    let a = sample_sequences(&p, 4, 5, 1.2, &mut stream(9, &[])).unwrap();
    let b = sample_sequences(&p, 4, 5, 1.2, &mut stream(9, &[])).unwrap();
    assert_eq!(a, b);
    for (s, l) in a.sequences.iter().zip(&a.logprobs) {
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(|&t| (1..6).contains(&t)));
        assert!(l.iter().all(|&x| x <= 0.0));
        let re = sequence_logprobs(&p, s, 1.2).unwrap();
        for (x, y) in l.iter().zip(&re) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    assert!(sample_sequences(&p, 1, 5, 1.2, &mut stream(9, &[])).is_err());
    // Only one poolable token: every sequence is identical.
    let one = random_params(tiny(2, 3), 5);
    let c = sample_sequences(&one, 3, 3, 1.2, &mut stream(1, &[])).unwrap();
    assert!(c.sequences.iter().all(|s| s == &vec![1, 1, 1]));
}

#[test]
fn penalty_semantics() {
    let row = [5.0, 2.0, -2.0, 1.0];
    let (out, d) = sampling::penalize(&row, &[false, true, true, false], 2.0);
    assert_eq!(out[0], f64::NEG_INFINITY);
    assert_eq!(&out[1..], &[1.0, -4.0, 1.0]);
    assert_eq!(&d[1..], &[0.5, 2.0, 1.0]);
    let (same, _) = sampling::penalize(&row, &[false, true, true, false], 1.0);
    assert_eq!(&same[1..], &row[1..]);
    let total: f64 = sampling::log_softmax(&out).iter().map(|x| x.exp()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn advantage_examples() {
    assert_eq!(compute_advantages(&[1.0, 3.0], 1e-8), vec![-1.0, 1.0]);
    assert_eq!(compute_advantages(&[2.0; 4], 1e-8), vec![0.0; 4]);
    let r = [0.3, -1.2, 4.0, 0.0, 2.2];
    let a = compute_advantages(&r, 1e-8);
    let shifted: Vec<f64> = r.iter().map(|x| 3.0 * x - 7.5).collect();
    let b = compute_advantages(&shifted, 1e-8);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
    let mean: f64 = a.iter().sum::<f64>() / 5.0;
    let var: f64 = a.iter().map(|x| x * x).sum::<f64>() / 5.0;
    assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-10);
}

fn batch_for(p: &PolicyParameters, seed: u64) -> SampledBatch {
    let mut b = sample_sequences(p, 4, 4, p.config.repetition_penalty, &mut stream(seed, &[])).unwrap();
    b.rewards = vec![1.0, -0.5, 0.25, 2.0];
    b.advantages = compute_advantages(&b.rewards, 1e-8);
    b
}

#[test]
fn loss_at_old_parameters_is_zero() {
    let p = random_params(tiny(6, 4), 6);
    let b = batch_for(&p, 1);
    let (loss, _) = grpo_loss_and_grad(&p, &b.logprobs, &b, &GrpoConfig::default()).unwrap();
    assert!(loss.abs() < 1e-12);
    let mut z = b.clone();
    z.advantages = vec![0.0; 4];
    let (loss, grad) = grpo_loss_and_grad(&p, &b.logprobs, &z, &GrpoConfig::default()).unwrap();
    assert_eq!(loss, 0.0);
    assert!(grad.iter().all(|g| *g == 0.0));
}

/// Gradient check at parameters moved away from the sampling policy so that
/// ratios differ from one and both clip branches occur.
pub(crate) fn grpo_gradient_errors(coords: usize, seed: u64) -> Vec<f64> {
    let old = random_params(tiny(6, 4), seed);
    let b = batch_for(&old, seed + 1);
    let mut p = old.clone();
    let mut rng = stream(seed + 2, &[]);
    for x in &mut p.data {
        *x += rng.random_range(-0.05..0.05);
    }
    let cfg = GrpoConfig::default();
    let (_, grad) = grpo_loss_and_grad(&p, &b.logprobs, &b, &cfg).unwrap();
    let h = 1e-5;
    let mut errs = Vec::new();
    for _ in 0..coords {
        let k = rng.random_range(0..p.len());
        let orig = p.data[k];
        p.data[k] = orig + h;
        let fp = grpo_loss_and_grad(&p, &b.logprobs, &b, &cfg).unwrap().0;
        p.data[k] = orig - h;
        let fm = grpo_loss_and_grad(&p, &b.logprobs, &b, &cfg).unwrap().0;
        p.data[k] = orig;
        errs.push(rel_err(grad[k], (fp - fm) / (2.0 * h)));
    }
    errs
}

#[test]
fn grpo_gradient_matches_finite_differences() {
    assert!(PolicyParameters::zeros(tiny(6, 4)).unwrap().len() <= 5000);
    let errs = grpo_gradient_errors(100, 10);
    let worst = errs.iter().copied().fold(0.0, f64::max);
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn small_step_does_not_increase_loss() {
    let old = random_params(tiny(6, 4), 20);
    let b = batch_for(&old, 21);
    let cfg = GrpoConfig { learning_rate: 1e-7, weight_decay: 0.0, ..GrpoConfig::default() };
    let mut p = old.clone();
    let mut rng = stream(22, &[]);
    for x in &mut p.data {
        *x += rng.random_range(-0.01..0.01);
    }
    let (l0, g) = grpo_loss_and_grad(&p, &b.logprobs, &b, &cfg).unwrap();
    let mut st = AdamState::new(p.len());
    adamw_step(&mut p, &g, 1, &cfg, &mut st).unwrap();
    let (l1, _) = grpo_loss_and_grad(&p, &b.logprobs, &b, &cfg).unwrap();
    assert!(l1 <= l0 + 1e-15, "{l1} > {l0}");
}

#[test]
fn adamw_recurrence() {
    let cfg0 = GrpoConfig { weight_decay: 0.0, ..GrpoConfig::default() };
    let mut p = random_params(tiny(4, 2), 30);
    let before = p.data.clone();
    let mut st = AdamState::new(p.len());
    let zeros = vec![0.0; p.len()];
    adamw_step(&mut p, &zeros, 1, &cfg0, &mut st).unwrap();
    assert_eq!(p.data, before);

    let cfg = GrpoConfig { learning_rate: 1e-3, weight_decay: 0.1, ..GrpoConfig::default() };
    let mask = p.layout.decay_mask();
    adamw_step(&mut p, &zeros, 1, &cfg, &mut st).unwrap();
    for k in 0..p.len() {
        let want = if mask[k] { before[k] * (1.0 - 1e-3 * 0.1) } else { before[k] };
        assert_eq!(p.data[k], want);
    }

    // Two steps with fixed gradients, unrolled by hand for one coordinate.
    let mut p = random_params(tiny(4, 2), 31);
    let k = p.layout.w_out.offset;
    let x0 = p.data[k];
    let mut st = AdamState::new(p.len());
    let (g1, g2) = (0.3, -0.7);
    let mut g = vec![0.0; p.len()];
    g[k] = g1;
    adamw_step(&mut p, &g, 1, &cfg, &mut st).unwrap();
    g[k] = g2;
    adamw_step(&mut p, &g, 2, &cfg, &mut st).unwrap();
    let (lr, wd) = (1e-3, 0.1);
    let m1 = 0.1 * g1;
    let v1 = 0.001 * g1 * g1;
    let x1 = x0 * (1.0 - lr * wd) - lr * (m1 / 0.1) / ((v1 / 0.001).sqrt() + 1e-8);
    let m2 = 0.9 * m1 + 0.1 * g2;
    let v2 = 0.999 * v1 + 0.001 * g2 * g2;
    let x2 = x1 * (1.0 - lr * wd) - lr * (m2 / (1.0 - 0.81)) / ((v2 / (1.0 - 0.999f64.powi(2))).sqrt() + 1e-8);
    assert!((p.data[k] - x2).abs() < 1e-15);
    assert!(adamw_step(&mut p, &[0.0], 3, &cfg, &mut st).is_err());
}

#[test]
fn decay_mask_excludes_gains_and_biases() {
    let p = PolicyParameters::zeros(tiny(4, 2)).unwrap();
    let mask = p.layout.decay_mask();
    let l = &p.layout.layers[0];
    assert!(mask[l.w_qkv.offset] && mask[p.layout.wte.offset] && mask[p.layout.w_out.offset]);
    assert!(!mask[l.ln1_g.offset] && !mask[l.b_fc.offset] && !mask[p.layout.b_out.offset]);
}

#[test]
fn checkpoint_roundtrip() {
    let p = random_params(tiny(5, 3), 40);
    let mut buf = Vec::new();
    write_checkpoint(&p, &mut buf).unwrap();
    let q = read_checkpoint(buf.as_slice()).unwrap();
    assert_eq!(p, q);
    buf[8] = 9;
    assert!(read_checkpoint(buf.as_slice()).is_err());
    assert!(read_checkpoint(&b"nonsense"[..]).is_err());
}
