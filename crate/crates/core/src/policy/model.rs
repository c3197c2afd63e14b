//! Pre-LN decoder-only Transformer in `f64` with hand-written backprop.
//!
//! All matrices live in one flat parameter vector, column-major so they can
//! be viewed as `nalgebra` matrices without copying. Activations are `T × d`.

use nalgebra::{DMatrix, DMatrixView};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

const LN_EPS: f64 = 1e-5;
const INIT_STD: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyConfig {
    /// Pool size plus the start token (id 0).
    pub vocab_size: usize,
    /// Circuit length plus one.
    pub context_len: usize,
    pub d_model: usize,
    pub n_heads: usize,
    pub n_layers: usize,
    pub d_ff: usize,
    pub repetition_penalty: f64,
    pub seed: u64,
}

impl PolicyConfig {
    /// Default architecture for a pool of `pool_size` tokens and circuits of
    /// length `length`.
    pub fn new(pool_size: usize, length: usize, seed: u64) -> Self {
        Self {
            vocab_size: pool_size + 1,
            context_len: length + 1,
            d_model: 128,
            n_heads: 4,
            n_layers: 4,
            d_ff: 512,
            repetition_penalty: 1.2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_heads == 0 || !self.d_model.is_multiple_of(self.n_heads) {
            return Err(Error::Config(format!("d_model {} not divisible by n_heads {}", self.d_model, self.n_heads)));
        }
        if self.context_len < 2 {
            return Err(Error::Config("context_len must be at least 2".into()));
        }
        if self.vocab_size < 2 {
            return Err(Error::Config("vocabulary needs the start token and one pool token".into()));
        }
        if !(self.repetition_penalty > 0.0) {
            return Err(Error::Config("repetition_penalty must be positive".into()));
        }
        Ok(())
    }

    pub fn length(&self) -> usize {
        self.context_len - 1
    }
}

/// A `rows × cols` block of the flat parameter vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
    /// Receives decoupled weight decay.
    pub decay: bool,
}

impl Tensor {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerLayout {
    pub ln1_g: Tensor,
    pub ln1_b: Tensor,
    pub w_qkv: Tensor,
    pub b_qkv: Tensor,
    pub w_o: Tensor,
    pub b_o: Tensor,
    pub ln2_g: Tensor,
    pub ln2_b: Tensor,
    pub w_fc: Tensor,
    pub b_fc: Tensor,
    pub w_proj: Tensor,
    pub b_proj: Tensor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub wte: Tensor,
    pub wpe: Tensor,
    pub layers: Vec<LayerLayout>,
    pub lnf_g: Tensor,
    pub lnf_b: Tensor,
    pub w_out: Tensor,
    pub b_out: Tensor,
    pub total: usize,
}

struct Alloc(usize);

impl Alloc {
    fn take(&mut self, rows: usize, cols: usize, decay: bool) -> Tensor {
        let t = Tensor { offset: self.0, rows, cols, decay };
        self.0 += rows * cols;
        t
    }
}

impl Layout {
    pub fn new(c: &PolicyConfig) -> Self {
        let (d, f, v) = (c.d_model, c.d_ff, c.vocab_size);
        let mut a = Alloc(0);
        let wte = a.take(v, d, true);
        let wpe = a.take(c.context_len, d, true);
        let layers = (0..c.n_layers)
            .map(|_| LayerLayout {
                ln1_g: a.take(1, d, false),
                ln1_b: a.take(1, d, false),
                w_qkv: a.take(d, 3 * d, true),
                b_qkv: a.take(1, 3 * d, false),
                w_o: a.take(d, d, true),
                b_o: a.take(1, d, false),
                ln2_g: a.take(1, d, false),
                ln2_b: a.take(1, d, false),
                w_fc: a.take(d, f, true),
                b_fc: a.take(1, f, false),
                w_proj: a.take(f, d, true),
                b_proj: a.take(1, d, false),
            })
            .collect();
        let lnf_g = a.take(1, d, false);
        let lnf_b = a.take(1, d, false);
        let w_out = a.take(d, v, true);
        let b_out = a.take(1, v, false);
        Self { wte, wpe, layers, lnf_g, lnf_b, w_out, b_out, total: a.0 }
    }

    pub fn tensors(&self) -> Vec<Tensor> {
        let mut out = vec![self.wte, self.wpe];
        for l in &self.layers {
            out.extend([l.ln1_g, l.ln1_b, l.w_qkv, l.b_qkv, l.w_o, l.b_o, l.ln2_g, l.ln2_b, l.w_fc, l.b_fc, l.w_proj, l.b_proj]);
        }
        out.extend([self.lnf_g, self.lnf_b, self.w_out, self.b_out]);
        out
    }

    /// Per-coordinate weight-decay mask.
    pub fn decay_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.total];
        for t in self.tensors() {
            m[t.range()].fill(t.decay);
        }
        m
    }

    fn gains(&self) -> Vec<Tensor> {
        let mut out: Vec<Tensor> = self.layers.iter().flat_map(|l| [l.ln1_g, l.ln2_g]).collect();
        out.push(self.lnf_g);
        out
    }
}

/// All policy weights as one flat vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParameters {
    pub config: PolicyConfig,
    pub layout: Layout,
    pub data: Vec<f64>,
}

impl PolicyParameters {
    /// All parameters zero except normalization gains, which are one.
    pub fn zeros(config: PolicyConfig) -> Result<Self> {
        config.validate()?;
        let layout = Layout::new(&config);
        let mut data = vec![0.0; layout.total];
        for g in layout.gains() {
            data[g.range()].fill(1.0);
        }
        Ok(Self { config, layout, data })
    }

    /// Gaussian weights (std 0.02), zero biases, unit gains.
    pub fn init<R: Rng>(config: PolicyConfig, rng: &mut R) -> Result<Self> {
        let mut p = Self::zeros(config)?;
        let normal = Normal::new(0.0, INIT_STD).expect("valid std");
        for t in p.layout.tensors() {
            if t.decay {
                for v in &mut p.data[t.range()] {
                    *v = normal.sample(rng);
                }
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn mat(&self, t: Tensor) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.data[t.range()], t.rows, t.cols)
    }

    fn vec(&self, t: Tensor) -> &[f64] {
        &self.data[t.range()]
    }

    /// Logits (`T × vocab`) for every position of `tokens`.
    pub fn forward(&self, tokens: &[usize]) -> Result<DMatrix<f64>> {
        Ok(self.forward_cached(&[tokens])?.0)
    }

    /// Logits for a batch of equal-length sequences, stacked sequence-major:
    /// row `b·T + i` is position `i` of sequence `b`.
    pub fn forward_batch(&self, seqs: &[&[usize]]) -> Result<DMatrix<f64>> {
        Ok(self.forward_cached(seqs)?.0)
    }

    pub(crate) fn forward_cached(&self, seqs: &[&[usize]]) -> Result<(DMatrix<f64>, Cache)> {
        let c = &self.config;
        let t_len = seqs.first().map_or(0, |s| s.len());
        if t_len == 0 || t_len > c.context_len - 1 {
            return Err(Error::PrefixTooLong { len: t_len, context: c.context_len });
        }
        if let Some(s) = seqs.iter().find(|s| s.len() != t_len) {
            return Err(Error::DimensionMismatch { expected: t_len, got: s.len() });
        }
        let tokens: Vec<usize> = seqs.iter().flat_map(|s| s.iter().copied()).collect();
        if let Some(&bad) = tokens.iter().find(|&&x| x >= c.vocab_size) {
            return Err(Error::Config(format!("token {bad} outside vocabulary of {}", c.vocab_size)));
        }
        let d = c.d_model;
        let wte = self.mat(self.layout.wte);
        let wpe = self.mat(self.layout.wpe);
        let mut h = DMatrix::from_fn(tokens.len(), d, |i, j| wte[(tokens[i], j)] + wpe[(i % t_len, j)]);
        let mut layers = Vec::with_capacity(c.n_layers);
        for l in &self.layout.layers {
            let (a, ln1) = layer_norm(&h, self.vec(l.ln1_g), self.vec(l.ln1_b));
            let mut qkv = &a * self.mat(l.w_qkv);
            add_bias(&mut qkv, self.vec(l.b_qkv));
            let (o, probs) = attention(&qkv, c.n_heads, t_len);
            let mut attn = &o * self.mat(l.w_o);
            add_bias(&mut attn, self.vec(l.b_o));
            let h_mid = &h + attn;
            let (m, ln2) = layer_norm(&h_mid, self.vec(l.ln2_g), self.vec(l.ln2_b));
            let mut f = &m * self.mat(l.w_fc);
            add_bias(&mut f, self.vec(l.b_fc));
            let g = f.map(gelu);
            let mut p = &g * self.mat(l.w_proj);
            add_bias(&mut p, self.vec(l.b_proj));
            h = &h_mid + p;
            layers.push(LayerCache { a, ln1, qkv, probs, o, m, ln2, f, g });
        }
        let (z, lnf) = layer_norm(&h, self.vec(self.layout.lnf_g), self.vec(self.layout.lnf_b));
        let mut logits = &z * self.mat(self.layout.w_out);
        add_bias(&mut logits, self.vec(self.layout.b_out));
        Ok((logits, Cache { tokens, t_len, layers, z, lnf }))
    }

    /// Accumulates `∂(Σ dlogits ∘ logits)/∂θ` into `grad`.
    pub(crate) fn backward(&self, cache: &Cache, dlogits: &DMatrix<f64>, grad: &mut [f64]) {
        let c = &self.config;
        let lay = &self.layout;
        acc_mat(grad, lay.w_out, &(cache.z.transpose() * dlogits));
        acc_bias(grad, lay.b_out, dlogits);
        let dz = dlogits * self.mat(lay.w_out).transpose();
        let mut dh = layer_norm_backward(&dz, &cache.lnf, self.vec(lay.lnf_g), grad, lay.lnf_g, lay.lnf_b);

        for (l, lc) in lay.layers.iter().zip(&cache.layers).rev() {
            // MLP branch.
            acc_mat(grad, l.w_proj, &(lc.g.transpose() * &dh));
            acc_bias(grad, l.b_proj, &dh);
            let dg = &dh * self.mat(l.w_proj).transpose();
            let df = dg.zip_map(&lc.f, |dg, f| dg * gelu_grad(f));
            acc_mat(grad, l.w_fc, &(lc.m.transpose() * &df));
            acc_bias(grad, l.b_fc, &df);
            let dm = &df * self.mat(l.w_fc).transpose();
            dh += layer_norm_backward(&dm, &lc.ln2, self.vec(l.ln2_g), grad, l.ln2_g, l.ln2_b);

            // Attention branch.
            acc_mat(grad, l.w_o, &(lc.o.transpose() * &dh));
            acc_bias(grad, l.b_o, &dh);
            let d_o = &dh * self.mat(l.w_o).transpose();
            let dqkv = attention_backward(&d_o, &lc.qkv, &lc.probs, c.n_heads, cache.t_len);
            acc_mat(grad, l.w_qkv, &(lc.a.transpose() * &dqkv));
            acc_bias(grad, l.b_qkv, &dqkv);
            let da = &dqkv * self.mat(l.w_qkv).transpose();
            dh += layer_norm_backward(&da, &lc.ln1, self.vec(l.ln1_g), grad, l.ln1_g, l.ln1_b);
        }

        let (v, ctx) = (c.vocab_size, c.context_len);
        for (i, &tok) in cache.tokens.iter().enumerate() {
            for j in 0..c.d_model {
                grad[lay.wte.offset + tok + v * j] += dh[(i, j)];
                grad[lay.wpe.offset + i % cache.t_len + ctx * j] += dh[(i, j)];
            }
        }
    }
}

pub(crate) struct LnCache {
    xhat: DMatrix<f64>,
    inv_std: Vec<f64>,
}

pub(crate) struct LayerCache {
    a: DMatrix<f64>,
    ln1: LnCache,
    qkv: DMatrix<f64>,
    probs: Vec<DMatrix<f64>>,
    o: DMatrix<f64>,
    m: DMatrix<f64>,
    ln2: LnCache,
    f: DMatrix<f64>,
    g: DMatrix<f64>,
}

pub(crate) struct Cache {
    tokens: Vec<usize>,
    t_len: usize,
    layers: Vec<LayerCache>,
    z: DMatrix<f64>,
    lnf: LnCache,
}

fn add_bias(x: &mut DMatrix<f64>, b: &[f64]) {
    for (j, mut col) in x.column_iter_mut().enumerate() {
        col.add_scalar_mut(b[j]);
    }
}

fn acc_mat(grad: &mut [f64], t: Tensor, g: &DMatrix<f64>) {
    debug_assert_eq!((g.nrows(), g.ncols()), (t.rows, t.cols));
    for (dst, src) in grad[t.range()].iter_mut().zip(g.as_slice()) {
        *dst += src;
    }
}

fn acc_bias(grad: &mut [f64], t: Tensor, dy: &DMatrix<f64>) {
    for (j, col) in dy.column_iter().enumerate() {
        grad[t.offset + j] += col.sum();
    }
}

fn layer_norm(x: &DMatrix<f64>, g: &[f64], b: &[f64]) -> (DMatrix<f64>, LnCache) {
    let (n, d) = x.shape();
    let mut xhat = DMatrix::zeros(n, d);
    let mut inv_std = vec![0.0; n];
    for i in 0..n {
        let row = x.row(i);
        let mean = row.sum() / d as f64;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / d as f64;
        let s = 1.0 / (var + LN_EPS).sqrt();
        inv_std[i] = s;
        for j in 0..d {
            xhat[(i, j)] = (x[(i, j)] - mean) * s;
        }
    }
    let y = DMatrix::from_fn(n, d, |i, j| xhat[(i, j)] * g[j] + b[j]);
    (y, LnCache { xhat, inv_std })
}

fn layer_norm_backward(dy: &DMatrix<f64>, c: &LnCache, g: &[f64], grad: &mut [f64], tg: Tensor, tb: Tensor) -> DMatrix<f64> {
    let (n, d) = dy.shape();
    for j in 0..d {
        let mut sg = 0.0;
        let mut sb = 0.0;
        for i in 0..n {
            sg += dy[(i, j)] * c.xhat[(i, j)];
            sb += dy[(i, j)];
        }
        grad[tg.offset + j] += sg;
        grad[tb.offset + j] += sb;
    }
    let mut dx = DMatrix::zeros(n, d);
    for i in 0..n {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for j in 0..d {
            let dxh = dy[(i, j)] * g[j];
            m1 += dxh;
            m2 += dxh * c.xhat[(i, j)];
        }
        m1 /= d as f64;
        m2 /= d as f64;
        for j in 0..d {
            let dxh = dy[(i, j)] * g[j];
            dx[(i, j)] = c.inv_std[i] * (dxh - m1 - c.xhat[(i, j)] * m2);
        }
    }
    dx
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/π)

/// Tanh-approximated GELU.
fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + 0.044715 * x * x * x)).tanh())
}

fn gelu_grad(x: f64) -> f64 {
    let th = (GELU_C * (x + 0.044715 * x * x * x)).tanh();
    0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * GELU_C * (1.0 + 3.0 * 0.044715 * x * x)
}

/// Causal multi-head attention on packed `[q | k | v]`, independently per
/// block of `t_len` rows; returns the head outputs and the attention matrix
/// of every (block, head) pair.
fn attention(qkv: &DMatrix<f64>, n_heads: usize, t_len: usize) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
    let rows = qkv.nrows();
    let d = qkv.ncols() / 3;
    let dh = d / n_heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut o = DMatrix::zeros(rows, d);
    let mut probs = Vec::with_capacity(rows / t_len * n_heads);
    for r0 in (0..rows).step_by(t_len) {
        for h in 0..n_heads {
            let q = qkv.view((r0, h * dh), (t_len, dh));
            let k = qkv.view((r0, d + h * dh), (t_len, dh));
            let v = qkv.view((r0, 2 * d + h * dh), (t_len, dh));
            let mut s = q * k.transpose() * scale;
            for i in 0..t_len {
                let max = (0..=i).map(|j| s[(i, j)]).fold(f64::NEG_INFINITY, f64::max);
                let mut z = 0.0;
                for j in 0..t_len {
                    let e = if j <= i { (s[(i, j)] - max).exp() } else { 0.0 };
                    s[(i, j)] = e;
                    z += e;
                }
                for j in 0..=i {
                    s[(i, j)] /= z;
                }
            }
            o.view_mut((r0, h * dh), (t_len, dh)).copy_from(&(&s * v));
            probs.push(s);
        }
    }
    (o, probs)
}

fn attention_backward(d_o: &DMatrix<f64>, qkv: &DMatrix<f64>, probs: &[DMatrix<f64>], n_heads: usize, t_len: usize) -> DMatrix<f64> {
    let rows = qkv.nrows();
    let d = qkv.ncols() / 3;
    let dh = d / n_heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut dqkv = DMatrix::zeros(rows, 3 * d);
    for (idx, p) in probs.iter().enumerate() {
        let (r0, h) = ((idx / n_heads) * t_len, idx % n_heads);
        let q = qkv.view((r0, h * dh), (t_len, dh));
        let k = qkv.view((r0, d + h * dh), (t_len, dh));
        let v = qkv.view((r0, 2 * d + h * dh), (t_len, dh));
        let doh = d_o.view((r0, h * dh), (t_len, dh));
        let dp = doh * v.transpose();
        let dv = p.transpose() * doh;
        let mut ds = DMatrix::zeros(t_len, t_len);
        for i in 0..t_len {
            let dot: f64 = (0..=i).map(|j| p[(i, j)] * dp[(i, j)]).sum();
            for j in 0..=i {
                ds[(i, j)] = p[(i, j)] * (dp[(i, j)] - dot) * scale;
            }
        }
        dqkv.view_mut((r0, h * dh), (t_len, dh)).copy_from(&(&ds * k));
        dqkv.view_mut((r0, d + h * dh), (t_len, dh)).copy_from(&(ds.transpose() * q));
        dqkv.view_mut((r0, 2 * d + h * dh), (t_len, dh)).copy_from(&dv);
    }
    dqkv
}
