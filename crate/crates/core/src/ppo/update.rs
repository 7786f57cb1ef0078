use rand::seq::SliceRandom;
use rand::Rng;

use super::{minibatch_loss, LossParts, PpoHyperparams, RolloutBuffer};
use crate::env::ActionBranches;
use crate::nn::{AdamState, DenseNet, Gradients};
use crate::{Error, Result};

/// Averages over every minibatch step of one update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStats {
    /// Magnitude of the policy loss.
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub minibatch_steps: usize,
    pub learning_rate: f64,
}

/// Normalised copy of the buffer advantages: zero mean, unit (population)
/// variance, with `1e-8` added to the standard deviation.
pub fn normalize_advantages(adv: &[f64]) -> Vec<f64> {
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let var = adv.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt() + 1e-8;
    adv.iter().map(|a| (a - mean) / std).collect()
}

/// Optimise the clipped surrogate for `num_epoch` passes of shuffled
/// minibatches of `batch_size`, then empty the buffer so the next rollout
/// is collected by the updated policy.
///
/// A partial trailing minibatch is skipped each epoch. On a non-finite loss
/// or gradient the network and optimizer are restored and the buffer kept.
pub fn ppo_update<R: Rng + ?Sized>(
    net: &mut DenseNet,
    adam: &mut AdamState,
    buffer: &mut RolloutBuffer,
    hp: &PpoHyperparams,
    branches: &ActionBranches,
    rate: f64,
    rng: &mut R,
) -> Result<UpdateStats> {
    if buffer.len() < hp.buffer_size {
        return Err(Error::Contract(format!(
            "update needs {} transitions, buffer holds {}",
            hp.buffer_size,
            buffer.len()
        )));
    }
    if hp.batch_size == 0 || hp.batch_size > buffer.len() {
        return Err(Error::Contract(format!("invalid minibatch size {}", hp.batch_size)));
    }
    let advantages = normalize_advantages(&buffer.advantages);
    let saved = (net.clone(), adam.clone());
    let mut order: Vec<usize> = (0..buffer.len()).collect();
    let mut grads = Gradients::zeros_like(net);
    let mut sum = LossParts::default();
    let mut steps = 0usize;

    let outcome: Result<()> = (|| {
        for _ in 0..hp.num_epoch {
            order.shuffle(rng);
            for batch in order.chunks_exact(hp.batch_size) {
                grads.fill_zero();
                let parts = minibatch_loss(net, buffer, batch, &advantages, hp, branches, Some(&mut grads))?;
                if !parts.total.is_finite() {
                    return Err(Error::Numeric(format!("non-finite loss {} at minibatch step {steps}", parts.total)));
                }
                adam.step(net, &grads, rate)?;
                if !net.all_finite() {
                    return Err(Error::Numeric(format!("non-finite parameters after minibatch step {steps}")));
                }
                sum.policy += parts.policy;
                sum.value += parts.value;
                sum.entropy += parts.entropy;
                sum.clip_fraction += parts.clip_fraction;
                steps += 1;
            }
        }
        Ok(())
    })();

    if let Err(e) = outcome {
        *net = saved.0;
        *adam = saved.1;
        return Err(e);
    }
    buffer.clear();
    let k = steps as f64;
    Ok(UpdateStats {
        policy_loss: (sum.policy / k).abs(),
        value_loss: sum.value / k,
        entropy: sum.entropy / k,
        clip_fraction: sum.clip_fraction / k,
        minibatch_steps: steps,
        learning_rate: rate,
    })
}
