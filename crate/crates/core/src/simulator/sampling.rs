use std::collections::BTreeMap;

use rand_distr::{Binomial, Distribution};

use super::statevector::Statevector;
use crate::rng::Stream;

/// Measurement outcomes (basis index → count).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShotHistogram {
    pub counts: BTreeMap<u64, u64>,
    pub n_shots: u64,
}

impl ShotHistogram {
    pub fn from_counts(it: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = Self::default();
        for (b, c) in it {
            h.add(b, c);
        }
        h
    }

    pub fn add(&mut self, bits: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(bits).or_insert(0) += count;
        self.n_shots += count;
    }

    /// Sums counts from another histogram.
    pub fn merge(&mut self, other: &ShotHistogram) {
        for (&b, &c) in &other.counts {
            self.add(b, c);
        }
    }

    pub fn unique(&self) -> usize {
        self.counts.len()
    }
}

/// Multinomial draw of `n_shots` outcomes from a probability vector given as
/// `(outcome, p)` pairs, by sequential conditional binomials.
pub fn sample_distribution(probs: &[(u64, f64)], n_shots: u64, rng: &mut Stream) -> ShotHistogram {
    let mut h = ShotHistogram::default();
    let mut mass: f64 = probs.iter().map(|(_, p)| p).sum();
    let mut left = n_shots;
    for (i, &(b, p)) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            h.add(b, left);
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        h.add(b, k);
        left -= k;
        mass -= p;
    }
    h
}

/// Computational-basis measurement of `n_shots` copies of `state`.
pub fn sample(state: &Statevector, n_shots: u64, rng: &mut Stream) -> ShotHistogram {
    let probs: Vec<(u64, f64)> = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(b, a)| (b as u64, a.norm_sqr()))
        .filter(|(_, p)| *p > 0.0)
        .collect();
    sample_distribution(&probs, n_shots, rng)
}
