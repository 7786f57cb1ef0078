use super::{BranchPolicy, PpoHyperparams, RolloutBuffer};
use crate::env::ActionBranches;
use crate::nn::{DenseNet, ForwardCache, Gradients};
use crate::{Error, Result};

/// `pi_theta(a|s) / pi_old(a|s)` evaluated through log-probabilities.
pub fn probability_ratio(
    net: &DenseNet,
    obs: &[f64],
    action: usize,
    log_prob_old: f64,
    branches: &ActionBranches,
) -> Result<f64> {
    if !log_prob_old.is_finite() {
        return Err(Error::Input(format!("log_prob_old {log_prob_old} is not finite")));
    }
    let out = net.forward(obs)?;
    let policy = BranchPolicy::new(&out.logits, branches)?;
    Ok((policy.log_prob(action) - log_prob_old).exp())
}

/// Pessimistic clipped objective `min(r A, clip(r, 1-eps, 1+eps) A)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let unclipped = ratio * advantage;
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon) * advantage;
    unclipped.min(clipped)
}

/// d/dr of [`clipped_surrogate`]: `A` where the unclipped branch is active,
/// zero where the clip holds the objective constant.
fn surrogate_slope(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon) * advantage;
    if ratio * advantage <= clipped {
        advantage
    } else {
        0.0
    }
}

/// Minibatch loss terms; every field is a mean over the minibatch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts {
    /// `policy + value_loss_coeff * value - beta * entropy`.
    pub total: f64,
    /// Negated clipped surrogate.
    pub policy: f64,
    /// Squared error against the GAE returns.
    pub value: f64,
    pub entropy: f64,
    /// Fraction of samples whose ratio lies outside the clip range.
    pub clip_fraction: f64,
}

/// Loss over `indices` of `buffer`, with `advantages` indexed like the
/// buffer. When `grads` is given the loss gradient is accumulated into it.
pub fn minibatch_loss(
    net: &DenseNet,
    buffer: &RolloutBuffer,
    indices: &[usize],
    advantages: &[f64],
    hp: &PpoHyperparams,
    branches: &ActionBranches,
    mut grads: Option<&mut Gradients>,
) -> Result<LossParts> {
    if indices.is_empty() {
        return Err(Error::Contract("empty minibatch".into()));
    }
    if advantages.len() != buffer.len() {
        return Err(Error::Structural("advantages do not match buffer length".into()));
    }
    let scale = 1.0 / indices.len() as f64;
    let mut parts = LossParts::default();
    let mut cache = ForwardCache::default();
    let mut dlogits = vec![0.0; net.policy_dim()];
    for &i in indices {
        let out = net.forward_cached(buffer.obs(i), &mut cache)?;
        let policy = BranchPolicy::new(&out.logits, branches)?;
        let action = buffer.actions[i];
        let ratio = (policy.log_prob(action) - buffer.log_probs[i]).exp();
        let adv = advantages[i];
        let entropy = policy.entropy();
        let err = out.value - buffer.returns[i];

        parts.policy -= clipped_surrogate(ratio, adv, hp.epsilon) * scale;
        parts.value += err * err * scale;
        parts.entropy += entropy * scale;
        if (ratio - 1.0).abs() > hp.epsilon {
            parts.clip_fraction += scale;
        }

        if let Some(g) = grads.as_deref_mut() {
            dlogits.iter_mut().for_each(|v| *v = 0.0);
            let slope = surrogate_slope(ratio, adv, hp.epsilon);
            // d(-surrogate)/d logp = -slope * r
            policy.log_prob_grad(action, -slope * ratio * scale, &mut dlogits);
            policy.entropy_grad(-hp.beta * scale, &mut dlogits);
            let dvalue = 2.0 * hp.value_loss_coeff * err * scale;
            net.accumulate_backward(&cache, &dlogits, dvalue, g)?;
        }
    }
    parts.total = parts.policy + hp.value_loss_coeff * parts.value - hp.beta * parts.entropy;
    Ok(parts)
}
