use serde::{Deserialize, Serialize};

use super::compute_gae;
use crate::{Error, Result};

/// One step of one actor stream as seen by the behaviour policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: usize,
    /// `log pi_old(a|s)` recorded at collection time.
    pub log_prob: f64,
    pub reward: f64,
    pub value: f64,
    /// The episode ended after this step.
    pub done: bool,
}

/// Column-oriented experience store with advantages attached on insert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutBuffer {
    obs_dim: usize,
    observations: Vec<f64>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl RolloutBuffer {
    pub fn new(obs_dim: usize) -> Self {
        Self {
            obs_dim,
            observations: Vec::new(),
            actions: Vec::new(),
            log_probs: Vec::new(),
            rewards: Vec::new(),
            values: Vec::new(),
            dones: Vec::new(),
            advantages: Vec::new(),
            returns: Vec::new(),
        }
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn obs(&self, i: usize) -> &[f64] {
        &self.observations[i * self.obs_dim..(i + 1) * self.obs_dim]
    }

    pub fn clear(&mut self) {
        self.observations.clear();
        self.actions.clear();
        self.log_probs.clear();
        self.rewards.clear();
        self.values.clear();
        self.dones.clear();
        self.advantages.clear();
        self.returns.clear();
    }

    /// Append one actor stream's segment, computing its GAE advantages with
    /// `bootstrap_value = V(s_T)` for a truncated final step.
    pub fn push_segment(&mut self, segment: &[Transition], bootstrap_value: f64, gamma: f64, lambda: f64) -> Result<()> {
        if let Some(bad) = segment.iter().find(|t| t.obs.len() != self.obs_dim) {
            return Err(Error::Structural(format!(
                "transition observation has {} entries, buffer expects {}",
                bad.obs.len(),
                self.obs_dim
            )));
        }
        let rewards: Vec<f64> = segment.iter().map(|t| t.reward).collect();
        let values: Vec<f64> = segment.iter().map(|t| t.value).collect();
        let dones: Vec<bool> = segment.iter().map(|t| t.done).collect();
        let est = compute_gae(&rewards, &values, &dones, bootstrap_value, gamma, lambda)?;
        for t in segment {
            self.observations.extend_from_slice(&t.obs);
            self.actions.push(t.action);
            self.log_probs.push(t.log_prob);
        }
        self.rewards.extend(rewards);
        self.values.extend(values);
        self.dones.extend(dones);
        self.advantages.extend(est.advantages);
        self.returns.extend(est.returns);
        Ok(())
    }
}
