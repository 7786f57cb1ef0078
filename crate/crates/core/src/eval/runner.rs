use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::env::trajectory::{snapshot, TrajectoryRow};
use crate::env::{prey_action_space, EventKind, WorldConfig, WorldState};
use crate::nn::DenseNet;
use crate::ppo::{ActionMode, BranchPolicy};
use crate::{rng_from_seed, Error, Result};

/// Event totals of one test run, summed over all prey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub pos_total: u64,
    pub neg_total: u64,
    pub caught_total: u64,
    pub duration_steps: u64,
    /// Sum of every reward the world paid out during the run.
    pub total_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub n_runs: usize,
    /// Ticks per run. Episodes are not reset during a test run.
    pub duration: u64,
    pub mode: ActionMode,
    pub seed: u64,
    /// Trajectories are logged for the first this-many runs.
    pub trajectory_runs: usize,
    /// Log every this-many ticks (tick 0 included).
    pub trajectory_stride: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            n_runs: 50,
            duration: 5_000,
            mode: ActionMode::Sample,
            seed: 0,
            trajectory_runs: 0,
            trajectory_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub records: Vec<RunRecord>,
    pub trajectories: Vec<TrajectoryRow>,
}

/// Run `net` in `n_runs` independently seeded copies of `world`.
pub fn evaluate_condition(net: &DenseNet, world: &WorldConfig, opts: &EvalOptions) -> Result<EvalOutcome> {
    let branches = prey_action_space();
    if net.input_dim() != world.observation_dim() || net.policy_dim() != branches.total_logits() {
        return Err(Error::Structural(format!(
            "network maps {} inputs to {} logits; world needs {} inputs and {} logits",
            net.input_dim(),
            net.policy_dim(),
            world.observation_dim(),
            branches.total_logits()
        )));
    }
    if opts.n_runs == 0 || opts.duration == 0 || opts.trajectory_stride == 0 {
        return Err(Error::Config("n_runs, duration and trajectory_stride must be positive".into()));
    }
    let mut seeder = rng_from_seed(opts.seed);
    let mut records = Vec::with_capacity(opts.n_runs);
    let mut trajectories = Vec::new();
    for run in 0..opts.n_runs {
        let run_id = run as u64;
        let mut state = WorldState::reset(world, seeder.next_u64())?;
        let mut policy_rng = rng_from_seed(seeder.next_u64());
        let log = run < opts.trajectory_runs;
        if log {
            trajectories.extend(snapshot(&state, run_id));
        }
        let mut rec = RunRecord {
            run_id,
            pos_total: 0,
            neg_total: 0,
            caught_total: 0,
            duration_steps: opts.duration,
            total_reward: 0.0,
        };
        let mut obs: Vec<Vec<f64>> = state.observe_all()?.iter().map(|o| o.to_vector()).collect();
        let mut actions = vec![0; state.prey.len()];
        for _ in 0..opts.duration {
            for (a, o) in actions.iter_mut().zip(&obs) {
                let out = net.forward(o)?;
                let policy = BranchPolicy::new(&out.logits, &branches)?;
                *a = match opts.mode {
                    ActionMode::Sample => policy.sample(&mut policy_rng),
                    ActionMode::Greedy => policy.greedy(),
                };
            }
            let outcome = state.step(&actions)?;
            rec.total_reward += outcome.rewards.iter().sum::<f64>();
            for e in &outcome.events {
                match e.kind {
                    EventKind::PositiveCollected => rec.pos_total += 1,
                    EventKind::NegativeCollected => rec.neg_total += 1,
                    EventKind::PreyCaught => rec.caught_total += 1,
                }
            }
            obs = outcome.observations.iter().map(|o| o.to_vector()).collect();
            if log && state.tick % opts.trajectory_stride == 0 {
                trajectories.extend(snapshot(&state, run_id));
            }
        }
        records.push(rec);
    }
    Ok(EvalOutcome { records, trajectories })
}
