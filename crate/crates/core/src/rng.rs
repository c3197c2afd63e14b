//! Reproducible random streams.
//!
//! Every stochastic operation takes an explicit [`Stream`]. Streams are
//! ChaCha8 generators keyed by the experiment seed, with the 64-bit stream id
//! derived from a path of integers such as `(iteration, circuit)`. ChaCha is
//! counter based, so distinct paths give independent, order-free streams and
//! parallel workers stay deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream purposes, mixed into the path so that e.g. the policy and the
/// sampler of the same iteration never share a stream.
pub mod purpose {
    pub const POLICY: u64 = 1;
    pub const SHOTS: u64 = 2;
    pub const CIRCUIT: u64 = 3;
    pub const PERTURB: u64 = 4;
    pub const INIT: u64 = 5;
    pub const REEVAL: u64 = 6;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for `seed` and a hierarchical `path`.
pub fn stream(seed: u64, path: &[u64]) -> Stream {
    let id = path
        .iter()
        .fold(0x5851_f42d_4c95_7f2d_u64, |acc, &p| splitmix(acc ^ splitmix(p)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Child stream drawn from a parent, for operations that receive one stream
/// but need to fan out.
pub fn fork(parent: &mut Stream, path: &[u64]) -> Stream {
    use rand::Rng;
    let seed: u64 = parent.random();
    stream(seed, path)
}
