//! Autoregressive Transformer policy over pool tokens, trained with GRPO.
//!
//! Vocabulary id 0 is the start token `q`; id `k + 1` is pool token `k`.

pub mod adamw;
pub mod checkpoint;
pub mod grpo;
pub mod model;
pub mod sampling;

pub use adamw::{adamw_step, AdamState};
pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use grpo::{compute_advantages, grpo_loss_and_grad, GrpoConfig};
pub use model::{Layout, PolicyConfig, PolicyParameters, Tensor};
pub use sampling::{sample_sequences, sequence_logprobs, SampledBatch, START_TOKEN};

/// Pool token index of a vocabulary id.
pub fn pool_index(vocab_id: usize) -> usize {
    debug_assert!(vocab_id != START_TOKEN);
    vocab_id - 1
}

#[cfg(test)]
mod tests;
