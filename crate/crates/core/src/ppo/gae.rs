use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageEstimates {
    pub advantages: Vec<f64>,
    /// Value targets, `advantage + value`.
    pub returns: Vec<f64>,
}

/// Generalised advantage estimation over one actor stream.
///
/// `dones[t]` marks that the episode ended after transition `t`; no value is
/// bootstrapped across it. `bootstrap_value` is `V(s_T)` for the state after
/// the last transition and is used only if that transition is not terminal.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap_value: f64,
    gamma: f64,
    lambda: f64,
) -> Result<AdvantageEstimates> {
    let n = rewards.len();
    if values.len() != n || dones.len() != n {
        return Err(Error::Structural(format!(
            "GAE inputs misaligned: {} rewards, {} values, {} boundaries",
            n,
            values.len(),
            dones.len()
        )));
    }
    let mut advantages = vec![0.0; n];
    let mut next_value = bootstrap_value;
    let mut running = 0.0;
    for t in (0..n).rev() {
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * live - values[t];
        running = delta + gamma * lambda * live * running;
        advantages[t] = running;
        next_value = values[t];
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok(AdvantageEstimates { advantages, returns })
}
