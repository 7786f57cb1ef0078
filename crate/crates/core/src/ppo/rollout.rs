use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{BranchPolicy, RolloutBuffer, Transition};
use crate::env::{ActionBranches, EventKind, WorldConfig, WorldState};
use crate::nn::DenseNet;
use crate::{rng_from_seed, Error, Result};

/// How actions are chosen from the policy distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionMode {
    Sample,
    Greedy,
}

/// Totals for one finished episode of one world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub world: usize,
    /// Episode return averaged over the world's prey.
    pub mean_return: f64,
    pub positive: u64,
    pub negative: u64,
    pub caught: u64,
}

/// Parallel worlds plus the per-episode bookkeeping needed to report
/// returns across rollout boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collector {
    pub worlds: Vec<WorldState>,
    /// Running return of the current episode, per world and prey.
    pub episode_returns: Vec<Vec<f64>>,
    /// Running event counts (positive, negative, caught) per world.
    pub episode_events: Vec<[u64; 3]>,
}

impl Collector {
    /// `n_worlds` worlds whose seeds are drawn from a generator seeded
    /// with `seed`.
    pub fn new(config: &WorldConfig, n_worlds: usize, seed: u64) -> Result<Self> {
        if n_worlds == 0 {
            return Err(Error::Config("at least one world is required".into()));
        }
        let mut seeder = rng_from_seed(seed);
        let worlds = (0..n_worlds)
            .map(|_| WorldState::reset(config, seeder.next_u64()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            episode_returns: worlds.iter().map(|w| vec![0.0; w.prey.len()]).collect(),
            episode_events: vec![[0; 3]; n_worlds],
            worlds,
        })
    }

    /// Number of independent actor streams (prey summed over worlds).
    pub fn streams(&self) -> usize {
        self.worlds.iter().map(|w| w.prey.len()).sum()
    }
}

/// Aggregates over one collection sweep.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepStats {
    pub transitions: usize,
    pub reward_sum: f64,
    pub value_sum: f64,
    pub episodes: Vec<EpisodeSummary>,
}

/// Step every world `horizon` times, appending one segment per prey to
/// `buffer`. Worlds whose episode reaches `episode_length` are reset and
/// the final transition flagged as a boundary; unfinished segments
/// bootstrap from the value of the state after the horizon.
#[allow(clippy::too_many_arguments)]
pub fn collect_rollout<R: Rng + ?Sized>(
    net: &DenseNet,
    collector: &mut Collector,
    horizon: usize,
    branches: &ActionBranches,
    mode: ActionMode,
    rng: &mut R,
    gamma: f64,
    lambda: f64,
    buffer: &mut RolloutBuffer,
) -> Result<SweepStats> {
    if net.input_dim() != buffer.obs_dim() {
        return Err(Error::Structural(format!(
            "network expects {} inputs, buffer stores {}",
            net.input_dim(),
            buffer.obs_dim()
        )));
    }
    let mut stats = SweepStats::default();
    let mut obs: Vec<Vec<Vec<f64>>> = collector
        .worlds
        .iter()
        .map(|w| w.observe_all().map(|o| o.iter().map(|r| r.to_vector()).collect()))
        .collect::<Result<_>>()?;
    let mut segments: Vec<Vec<Vec<Transition>>> = collector
        .worlds
        .iter()
        .map(|w| (0..w.prey.len()).map(|_| Vec::with_capacity(horizon)).collect())
        .collect();

    for _ in 0..horizon {
        for (wi, world) in collector.worlds.iter_mut().enumerate() {
            let n = world.prey.len();
            let mut actions = Vec::with_capacity(n);
            for p in 0..n {
                let out = net.forward(&obs[wi][p])?;
                let policy = BranchPolicy::new(&out.logits, branches)?;
                let a = match mode {
                    ActionMode::Sample => policy.sample(rng),
                    ActionMode::Greedy => policy.greedy(),
                };
                segments[wi][p].push(Transition {
                    obs: std::mem::take(&mut obs[wi][p]),
                    action: a,
                    log_prob: policy.log_prob(a),
                    reward: 0.0,
                    value: out.value,
                    done: false,
                });
                stats.value_sum += out.value;
                actions.push(a);
            }
            let outcome = world.step(&actions)?;
            for e in &outcome.events {
                let slot = match e.kind {
                    EventKind::PositiveCollected => 0,
                    EventKind::NegativeCollected => 1,
                    EventKind::PreyCaught => 2,
                };
                collector.episode_events[wi][slot] += 1;
            }
            for (p, &r) in outcome.rewards.iter().enumerate() {
                segments[wi][p].last_mut().unwrap().reward = r;
                collector.episode_returns[wi][p] += r;
                stats.reward_sum += r;
            }
            stats.transitions += n;

            if world.tick >= world.config.episode_length {
                for seg in segments[wi].iter_mut() {
                    seg.last_mut().unwrap().done = true;
                }
                let returns = &mut collector.episode_returns[wi];
                let ev = collector.episode_events[wi];
                stats.episodes.push(EpisodeSummary {
                    world: wi,
                    mean_return: returns.iter().sum::<f64>() / n as f64,
                    positive: ev[0],
                    negative: ev[1],
                    caught: ev[2],
                });
                returns.iter_mut().for_each(|r| *r = 0.0);
                collector.episode_events[wi] = [0; 3];
                world.reset_episode()?;
                obs[wi] = world.observe_all()?.iter().map(|r| r.to_vector()).collect();
            } else {
                obs[wi] = outcome.observations.iter().map(|r| r.to_vector()).collect();
            }
        }
    }

    for (wi, world_segments) in segments.iter().enumerate() {
        for (p, seg) in world_segments.iter().enumerate() {
            let bootstrap = if seg.last().is_some_and(|t| t.done) {
                0.0
            } else {
                net.forward(&obs[wi][p])?.value
            };
            buffer.push_segment(seg, bootstrap, gamma, lambda)?;
        }
    }
    Ok(stats)
}
