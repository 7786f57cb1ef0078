use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Trainer knobs. Field names follow the usual ml-agents spellings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpoHyperparams {
    /// Minibatch size M.
    pub batch_size: usize,
    /// Transitions gathered before an update (NT).
    pub buffer_size: usize,
    /// Clip range.
    pub epsilon: f64,
    /// Entropy regularisation strength.
    pub beta: f64,
    pub gamma: f64,
    /// GAE lambda.
    pub lambda: f64,
    /// Passes over the buffer per update (K).
    pub num_epoch: usize,
    /// Steps per actor stream before GAE and buffering (T).
    pub time_horizon: usize,
    pub learning_rate: f64,
    pub max_steps: u64,
    pub value_loss_coeff: f64,
    pub summary_freq: u64,
    pub hidden_units: usize,
    pub num_layers: usize,
}

impl Default for PpoHyperparams {
    fn default() -> Self {
        Self {
            batch_size: 1024,
            buffer_size: 10240,
            epsilon: 0.2,
            beta: 1.0e-2,
            gamma: 0.99,
            lambda: 0.95,
            num_epoch: 3,
            time_horizon: 64,
            learning_rate: 3.0e-4,
            max_steps: 1_000_000,
            value_loss_coeff: 0.5,
            summary_freq: 10_000,
            hidden_units: 128,
            num_layers: 2,
        }
    }
}

impl PpoHyperparams {
    pub fn hidden_layers(&self) -> Vec<usize> {
        vec![self.hidden_units; self.num_layers]
    }

    /// Hard errors for values the algorithm cannot run with.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.batch_size == 0 || self.buffer_size == 0 || self.num_epoch == 0 || self.time_horizon == 0 {
            return err("batch_size, buffer_size, num_epoch and time_horizon must be positive".into());
        }
        if self.buffer_size % self.batch_size != 0 {
            return err(format!(
                "batch_size {} must divide buffer_size {}",
                self.batch_size, self.buffer_size
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return err(format!("epsilon must be in (0, 1), got {}", self.epsilon));
        }
        for (name, v) in [("gamma", self.gamma), ("lambda", self.lambda)] {
            if !(0.0..=1.0).contains(&v) {
                return err(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        for (name, v) in [
            ("beta", self.beta),
            ("learning_rate", self.learning_rate),
            ("value_loss_coeff", self.value_loss_coeff),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if self.summary_freq == 0 || self.hidden_units == 0 {
            return err("summary_freq and hidden_units must be positive".into());
        }
        Ok(())
    }

    /// Values outside the recommended ranges. These are reported, never
    /// rejected.
    pub fn range_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, v: f64, lo: f64, hi: f64| {
            if v < lo || v > hi {
                out.push(format!("{name} = {v} is outside the recommended range [{lo}, {hi}]"));
            }
        };
        check("epsilon", self.epsilon, 0.1, 0.3);
        check("lambda", self.lambda, 0.9, 0.95);
        check("gamma", self.gamma, 0.8, 0.995);
        check("beta", self.beta, 1e-4, 1e-2);
        check("learning_rate", self.learning_rate, 1e-5, 1e-3);
        check("num_epoch", self.num_epoch as f64, 3.0, 10.0);
        check("time_horizon", self.time_horizon as f64, 32.0, 2048.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_quiet() {
        let hp = PpoHyperparams::default();
        hp.validate().unwrap();
        assert!(hp.range_warnings().is_empty());
        assert_eq!(hp.buffer_size / hp.batch_size, 10);
    }

    #[test]
    fn batch_must_divide_buffer() {
        let hp = PpoHyperparams {
            batch_size: 1000,
            ..PpoHyperparams::default()
        };
        assert!(hp.validate().is_err());
    }

    #[test]
    fn out_of_range_warns_not_fails() {
        let hp = PpoHyperparams {
            epsilon: 0.5,
            lambda: 0.99,
            ..PpoHyperparams::default()
        };
        hp.validate().unwrap();
        assert_eq!(hp.range_warnings().len(), 2);
    }
}
