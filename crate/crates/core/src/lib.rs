//! Headless predator-prey reinforcement-learning simulator.
//!
//! Prey agents are trained with clipped-surrogate PPO against a rule-based
//! predator in a bounded 2D arena with barriers and reward/penalty points.
//! The crate also carries the post-training evaluation pipeline: task
//! efficiency, one-way ANOVA, Cohen's d and KDE occupancy grids.
//!
//! Module map:
//! - [`nn`]: dense actor-critic network, Adam, linear learning-rate schedule
//!   and the binary checkpoint format.
//! - [`env`]: the world (geometry, ray sensor, predator rules, rewards).
//! - [`ppo`]: rollout buffer, GAE, clipped surrogate, minibatch update.
//! - [`train`]: scenario configs and the resumable training loop.
//! - [`eval`]: evaluation runs, statistics and occupancy heatmaps.
//! - [`io`]: flat `key = value` configs, CSV schemas, replay export.

pub mod env;
pub mod error;
pub mod eval;
pub mod io;
pub mod nn;
pub mod ppo;
pub mod train;

pub use error::{Error, Result};

/// Seeded generator used for every stochastic component.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Build a [`SimRng`] from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
