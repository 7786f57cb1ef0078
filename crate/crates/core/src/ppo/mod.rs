//! Clipped-surrogate PPO with generalised advantage estimation.
//!
//! Rollouts are collected under the behaviour policy, advantages are
//! computed per actor stream, and the network is optimised for `num_epoch`
//! passes of shuffled minibatches before the buffer is discarded.

mod buffer;
mod distribution;
mod gae;
mod hyperparams;
mod loss;
mod rollout;
mod update;

pub use buffer::{RolloutBuffer, Transition};
pub use distribution::BranchPolicy;
pub use gae::{compute_gae, AdvantageEstimates};
pub use hyperparams::PpoHyperparams;
pub use loss::{clipped_surrogate, minibatch_loss, probability_ratio, LossParts};
pub use rollout::{collect_rollout, ActionMode, Collector, EpisodeSummary, SweepStats};
pub use update::{normalize_advantages, ppo_update, UpdateStats};
