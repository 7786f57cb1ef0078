use std::path::{Path, PathBuf};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{write_episodes, write_metrics, EpisodeRecord, MetricsRow, ScenarioConfig};
use crate::env::{prey_action_space, ActionBranches};
use crate::nn::{AdamState, Checkpoint, DenseNet, LrSchedule};
use crate::ppo::{collect_rollout, ppo_update, ActionMode, Collector, RolloutBuffer, SweepStats, UpdateStats};
use crate::{rng_from_seed, Error, Result, SimRng};

pub const CHECKPOINT_FILE: &str = "checkpoint.ckpt";
pub const STATE_FILE: &str = "trainer_state.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const EPISODES_FILE: &str = "episodes.csv";

/// Sums over the current summary period.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct Period {
    transitions: u64,
    reward_sum: f64,
    value_sum: f64,
    episode_return_sum: f64,
    episodes: u64,
    policy_loss_sum: f64,
    value_loss_sum: f64,
    entropy_sum: f64,
    updates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct LossSnapshot {
    policy: f64,
    value: f64,
    entropy: f64,
}

/// Everything besides the network and optimizer needed to continue a run
/// exactly where it stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TrainerState {
    config: ScenarioConfig,
    global_step: u64,
    updates: u64,
    collector: Collector,
    rng: SimRng,
    buffer: RolloutBuffer,
    period: Period,
    next_summary: u64,
    next_checkpoint: u64,
    last_episode_reward: Option<f64>,
    last_losses: Option<LossSnapshot>,
    metrics: Vec<MetricsRow>,
    episodes: Vec<EpisodeRecord>,
}

/// Collect/update loop for one scenario.
///
/// Stops, summaries and checkpoints happen at sweep boundaries, so the
/// global step of a row or checkpoint may overshoot its nominal value by
/// less than one sweep.
#[derive(Debug)]
pub struct Trainer {
    net: DenseNet,
    adam: AdamState,
    schedule: LrSchedule,
    branches: ActionBranches,
    state: TrainerState,
    out_dir: Option<PathBuf>,
}

impl Trainer {
    /// Fresh run. With `out_dir` set, checkpoints, metrics and episode logs
    /// are written there.
    pub fn new(config: ScenarioConfig, out_dir: Option<&Path>) -> Result<Self> {
        config.validate()?;
        for w in config.hyperparams.range_warnings() {
            log::warn!("{w}");
        }
        let branches = prey_action_space();
        let world = config.training_world();
        let hp = &config.hyperparams;
        let mut rng = rng_from_seed(config.seed);
        let net = DenseNet::new(world.observation_dim(), &hp.hidden_layers(), branches.total_logits(), &mut rng)?;
        let collector = Collector::new(&world, config.n_worlds, rng.next_u64())?;
        let adam = AdamState::new(&net);
        let state = TrainerState {
            global_step: 0,
            updates: 0,
            collector,
            rng,
            buffer: RolloutBuffer::new(world.observation_dim()),
            period: Period::default(),
            next_summary: hp.summary_freq,
            next_checkpoint: config.checkpoint_interval,
            last_episode_reward: None,
            last_losses: None,
            metrics: Vec::new(),
            episodes: Vec::new(),
            config,
        };
        if let Some(d) = out_dir {
            std::fs::create_dir_all(d).map_err(|e| Error::io(d.display().to_string(), e))?;
        }
        Ok(Self {
            schedule: LrSchedule::linear(state.config.hyperparams.learning_rate, state.config.max_steps()),
            net,
            adam,
            branches,
            state,
            out_dir: out_dir.map(Path::to_path_buf),
        })
    }

    /// Continue a run from the checkpoint and state files in `dir`; later
    /// output goes to the same directory.
    pub fn resume(dir: &Path) -> Result<Self> {
        let ck = Checkpoint::load(&dir.join(CHECKPOINT_FILE))?;
        let state_path = dir.join(STATE_FILE);
        let text = std::fs::read_to_string(&state_path).map_err(|e| Error::io(state_path.display().to_string(), e))?;
        let state: TrainerState = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", state_path.display())))?;
        if state.global_step != ck.global_step || state.config.seed != ck.seed {
            return Err(Error::Checkpoint(format!(
                "state file (step {}, seed {}) does not match checkpoint (step {}, seed {})",
                state.global_step, state.config.seed, ck.global_step, ck.seed
            )));
        }
        let world = state.config.training_world();
        if ck.net.input_dim() != world.observation_dim() {
            return Err(Error::Structural(format!(
                "checkpoint expects {} inputs, world produces {}",
                ck.net.input_dim(),
                world.observation_dim()
            )));
        }
        Ok(Self {
            schedule: LrSchedule::linear(state.config.hyperparams.learning_rate, state.config.max_steps()),
            net: ck.net,
            adam: ck.adam,
            branches: prey_action_space(),
            state,
            out_dir: Some(dir.to_path_buf()),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.state.config
    }

    pub fn net(&self) -> &DenseNet {
        &self.net
    }

    pub fn global_step(&self) -> u64 {
        self.state.global_step
    }

    pub fn updates(&self) -> u64 {
        self.state.updates
    }

    pub fn metrics(&self) -> &[MetricsRow] {
        &self.state.metrics
    }

    pub fn episodes(&self) -> &[EpisodeRecord] {
        &self.state.episodes
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            net: self.net.clone(),
            adam: self.adam.clone(),
            seed: self.state.config.seed,
            global_step: self.state.global_step,
        }
    }

    /// Train to `max_steps` and write the final checkpoint.
    pub fn run(&mut self) -> Result<()> {
        self.run_until(self.state.config.max_steps())?;
        if let Some(d) = self.out_dir.clone() {
            self.save(&d)?;
        }
        Ok(())
    }

    /// Train until the global step reaches `limit`. The learning-rate
    /// schedule still runs over the configured `max_steps`.
    pub fn run_until(&mut self, limit: u64) -> Result<()> {
        while self.state.global_step < limit {
            self.sweep()?;
        }
        Ok(())
    }

    fn sweep(&mut self) -> Result<()> {
        let hp = self.state.config.hyperparams.clone();
        let st = &mut self.state;
        let stats = collect_rollout(
            &self.net,
            &mut st.collector,
            hp.time_horizon,
            &self.branches,
            ActionMode::Sample,
            &mut st.rng,
            hp.gamma,
            hp.lambda,
            &mut st.buffer,
        )?;
        st.global_step += stats.transitions as u64;
        self.absorb(&stats);

        let st = &mut self.state;
        if st.buffer.len() >= hp.buffer_size {
            let rate = self.schedule.rate_at(st.global_step);
            let u = ppo_update(&mut self.net, &mut self.adam, &mut st.buffer, &hp, &self.branches, rate, &mut st.rng)?;
            self.absorb_update(&u);
        }

        while self.state.global_step >= self.state.next_summary {
            self.push_summary();
        }
        if self.state.global_step >= self.state.next_checkpoint {
            while self.state.next_checkpoint <= self.state.global_step {
                self.state.next_checkpoint += self.state.config.checkpoint_interval;
            }
            if let Some(d) = self.out_dir.clone() {
                self.save(&d)?;
            }
        }
        Ok(())
    }

    fn absorb(&mut self, stats: &SweepStats) {
        let st = &mut self.state;
        let p = &mut st.period;
        p.transitions += stats.transitions as u64;
        p.reward_sum += stats.reward_sum;
        p.value_sum += stats.value_sum;
        for e in &stats.episodes {
            p.episode_return_sum += e.mean_return;
            p.episodes += 1;
            st.episodes.push(EpisodeRecord {
                global_step: st.global_step,
                world: e.world,
                mean_return: e.mean_return,
                positive: e.positive,
                negative: e.negative,
                caught: e.caught,
            });
        }
    }

    fn absorb_update(&mut self, u: &UpdateStats) {
        let st = &mut self.state;
        st.updates += 1;
        st.period.policy_loss_sum += u.policy_loss;
        st.period.value_loss_sum += u.value_loss;
        st.period.entropy_sum += u.entropy;
        st.period.updates += 1;
        log::debug!(
            "update {} at step {}: policy {:.4} value {:.4} entropy {:.4} lr {:.2e}",
            st.updates,
            st.global_step,
            u.policy_loss,
            u.value_loss,
            u.entropy,
            u.learning_rate
        );
    }

    fn push_summary(&mut self) {
        let st = &mut self.state;
        let p = std::mem::take(&mut st.period);
        if p.episodes > 0 {
            st.last_episode_reward = Some(p.episode_return_sum / p.episodes as f64);
        }
        if p.updates > 0 {
            let k = p.updates as f64;
            st.last_losses = Some(LossSnapshot {
                policy: p.policy_loss_sum / k,
                value: p.value_loss_sum / k,
                entropy: p.entropy_sum / k,
            });
        }
        let per_transition = |sum: f64| {
            if p.transitions > 0 {
                sum / p.transitions as f64
            } else {
                f64::NAN
            }
        };
        let losses = st.last_losses;
        let row = MetricsRow {
            global_step: st.next_summary,
            mean_cumulative_episode_reward: st.last_episode_reward.unwrap_or(f64::NAN),
            policy_loss: losses.map_or(f64::NAN, |l| l.policy),
            value_loss: losses.map_or(f64::NAN, |l| l.value),
            entropy: losses.map_or(f64::NAN, |l| l.entropy),
            extrinsic_reward_mean: per_transition(p.reward_sum),
            mean_value_estimate: per_transition(p.value_sum),
        };
        log::info!(
            "step {}: episode reward {:.3}, entropy {:.4}",
            row.global_step,
            row.mean_cumulative_episode_reward,
            row.entropy
        );
        st.metrics.push(row);
        st.next_summary += st.config.hyperparams.summary_freq;
    }

    /// Write checkpoint, resume state, metrics and episode log to `dir`.
    /// The state file is written before the checkpoint, each atomically.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let json = serde_json::to_vec(&self.state).map_err(|e| Error::Checkpoint(format!("serialising state: {e}")))?;
        let state_path = dir.join(STATE_FILE);
        let tmp = state_path.with_extension("tmp");
        std::fs::write(&tmp, json).map_err(|e| Error::io(tmp.display().to_string(), e))?;
        std::fs::rename(&tmp, &state_path).map_err(|e| Error::io(state_path.display().to_string(), e))?;
        self.checkpoint().save(&dir.join(CHECKPOINT_FILE))?;
        write_metrics(&dir.join(METRICS_FILE), &self.state.metrics)?;
        write_episodes(&dir.join(EPISODES_FILE), &self.state.episodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::train::read_metrics;

    fn small_config(seed: u64) -> ScenarioConfig {
        let mut c = ScenarioConfig::for_scenario(3).unwrap();
        c.seed = seed;
        c.world.n_prey = 2;
        c.hyperparams.hidden_units = 16;
        c.hyperparams.buffer_size = 512;
        c.hyperparams.batch_size = 128;
        c.hyperparams.time_horizon = 32;
        c.hyperparams.summary_freq = 256;
        c.hyperparams.max_steps = 4_000;
        c.checkpoint_interval = 1_000;
        c
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut straight = Trainer::new(small_config(5), None).unwrap();
        straight.run_until(2_000).unwrap();

        let mut first = Trainer::new(small_config(5), Some(dir.path())).unwrap();
        first.run_until(1_000).unwrap();
        first.save(dir.path()).unwrap();
        drop(first);
        let mut resumed = Trainer::resume(dir.path()).unwrap();
        resumed.run_until(2_000).unwrap();

        assert_eq!(resumed.global_step(), straight.global_step());
        assert_eq!(resumed.metrics(), straight.metrics());
        assert_eq!(resumed.net(), straight.net());
        assert_eq!(resumed.checkpoint().to_bytes(), straight.checkpoint().to_bytes());
    }

    #[test]
    fn rows_follow_summary_cadence() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Trainer::new(small_config(1), Some(dir.path())).unwrap();
        t.run().unwrap();
        let rows = read_metrics(&dir.path().join(METRICS_FILE)).unwrap();
        assert_eq!(rows.len() as u64, 4_000 / 256);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.global_step, 256 * (i as u64 + 1));
        }
        assert_eq!(rows, t.metrics());
        assert!(t.global_step() >= 4_000);
        assert!(t.updates() > 0);
        let ck = Checkpoint::load(&dir.path().join(CHECKPOINT_FILE)).unwrap();
        assert_eq!(ck.global_step, t.global_step());
    }

    #[test]
    fn identical_configs_give_identical_metrics() {
        let mut a = Trainer::new(small_config(9), None).unwrap();
        let mut b = Trainer::new(small_config(9), None).unwrap();
        a.run_until(2_000).unwrap();
        b.run_until(2_000).unwrap();
        assert_eq!(a.metrics(), b.metrics());
    }

    #[test]
    fn mismatched_state_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Trainer::new(small_config(2), Some(dir.path())).unwrap();
        t.run_until(200).unwrap();
        t.save(dir.path()).unwrap();
        let mut ck = Checkpoint::load(&dir.path().join(CHECKPOINT_FILE)).unwrap();
        ck.global_step += 1;
        ck.save(&dir.path().join(CHECKPOINT_FILE)).unwrap();
        assert!(matches!(Trainer::resume(dir.path()), Err(Error::Checkpoint(_))));
    }

    #[test]
    fn scenario_world_follows_predator_flag() {
        let mut c = small_config(0);
        c.world.predator_present = true;
        let t = Trainer::new(c, None).unwrap();
        assert!(t.state.collector.worlds[0].predator.is_none());
        let mut c = small_config(0);
        c.scenario_id = 1;
        c.predator_in_training = true;
        let t = Trainer::new(c, None).unwrap();
        assert!(t.state.collector.worlds[0].predator.is_some());
    }
}
