use serde::{Deserialize, Serialize};

use crate::env::WorldConfig;
use crate::ppo::PpoHyperparams;
use crate::{Error, Result};

/// One training scenario: hyperparameters, world and run plumbing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario_id: u8,
    /// Whether the predator exists in the training world. Overrides
    /// `world.predator_present` when the world is built.
    pub predator_in_training: bool,
    /// `hyperparams.max_steps` is the run length in global steps.
    pub hyperparams: PpoHyperparams,
    pub world: WorldConfig,
    pub seed: u64,
    /// Parallel worlds (actors).
    pub n_worlds: usize,
    /// Global steps between checkpoints; a final checkpoint is always written.
    pub checkpoint_interval: u64,
}

impl ScenarioConfig {
    /// Preset for scenario 1, 2 or 3. The presets differ only in run length
    /// and predator presence.
    pub fn for_scenario(scenario_id: u8) -> Result<Self> {
        let (max_steps, predator_in_training) = Self::preset(scenario_id)?;
        Ok(Self {
            scenario_id,
            predator_in_training,
            hyperparams: PpoHyperparams {
                max_steps,
                ..PpoHyperparams::default()
            },
            world: WorldConfig::default(),
            seed: 0,
            n_worlds: 1,
            checkpoint_interval: 50_000,
        })
    }

    /// `(max_steps, predator_in_training)` of a scenario.
    pub fn preset(scenario_id: u8) -> Result<(u64, bool)> {
        match scenario_id {
            1 => Ok((580_000, true)),
            2 => Ok((1_000_000, true)),
            3 => Ok((1_000_000, false)),
            other => Err(Error::Config(format!("scenario_id must be 1, 2 or 3, got {other}"))),
        }
    }

    pub fn max_steps(&self) -> u64 {
        self.hyperparams.max_steps
    }

    /// World used for training, with predator presence taken from the
    /// scenario.
    pub fn training_world(&self) -> WorldConfig {
        WorldConfig {
            predator_present: self.predator_in_training,
            ..self.world.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::preset(self.scenario_id)?;
        self.hyperparams.validate()?;
        self.training_world().validate()?;
        if self.n_worlds == 0 {
            return Err(Error::Config("n_worlds must be at least 1".into()));
        }
        if self.checkpoint_interval == 0 {
            return Err(Error::Config("checkpoint_interval must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let s1 = ScenarioConfig::for_scenario(1).unwrap();
        assert_eq!(s1.max_steps(), 580_000);
        assert!(s1.training_world().predator_present);
        let s3 = ScenarioConfig::for_scenario(3).unwrap();
        assert_eq!(s3.max_steps(), 1_000_000);
        assert!(!s3.training_world().predator_present);
        assert!(ScenarioConfig::for_scenario(4).is_err());
    }

    #[test]
    fn presets_differ_only_in_length_and_predator() {
        let mut a = ScenarioConfig::for_scenario(1).unwrap();
        let b = ScenarioConfig::for_scenario(2).unwrap();
        let c = ScenarioConfig::for_scenario(3).unwrap();
        for other in [&b, &c] {
            a.scenario_id = other.scenario_id;
            a.hyperparams.max_steps = other.hyperparams.max_steps;
            a.predator_in_training = other.predator_in_training;
            assert_eq!(&a, other);
        }
    }
}
