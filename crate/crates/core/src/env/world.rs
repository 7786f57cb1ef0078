use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{normalize_heading, Vec2};
use super::{PreyAction, RayObservation, WorldConfig, CAUGHT_REWARD, NEGATIVE_REWARD, POSITIVE_REWARD};
use crate::{rng_from_seed, Error, Result, SimRng};

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentBody {
    pub id: usize,
    pub position: Vec2,
    /// Degrees in [0, 360), counter-clockwise from +x.
    pub heading: f64,
    /// Displacement over the last tick divided by `tick_dt`.
    pub velocity: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredatorMode {
    Patrol,
    Chase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredatorState {
    pub body: AgentBody,
    pub mode: PredatorMode,
    /// Present exactly when `mode` is `Chase`.
    pub target_prey_id: Option<usize>,
    pub patrol_waypoint: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointObject {
    pub position: Vec2,
    pub polarity: Polarity,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    PositiveCollected,
    NegativeCollected,
    PreyCaught,
}

impl EventKind {
    pub fn reward(self) -> f64 {
        match self {
            EventKind::PositiveCollected => POSITIVE_REWARD,
            EventKind::NegativeCollected => NEGATIVE_REWARD,
            EventKind::PreyCaught => CAUGHT_REWARD,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::PositiveCollected => "positive_collected",
            EventKind::NegativeCollected => "negative_collected",
            EventKind::PreyCaught => "prey_caught",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "positive_collected" => Some(EventKind::PositiveCollected),
            "negative_collected" => Some(EventKind::NegativeCollected),
            "prey_caught" => Some(EventKind::PreyCaught),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
    pub prey_id: usize,
}

/// Result of advancing the world one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// One reward per prey, indexed by prey id.
    pub rewards: Vec<f64>,
    pub observations: Vec<RayObservation>,
    pub events: Vec<Event>,
}

/// Complete mutable simulation state. Owns its generator, so independent
/// worlds never share randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub config: WorldConfig,
    pub tick: u64,
    pub prey: Vec<AgentBody>,
    pub predator: Option<PredatorState>,
    pub points: Vec<PointObject>,
    pub rng: SimRng,
    /// Events emitted by the most recent step.
    pub events: Vec<Event>,
}

impl WorldState {
    /// Fresh world with uniformly random, non-overlapping placements.
    pub fn reset(config: &WorldConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut state = Self {
            config: config.clone(),
            tick: 0,
            prey: Vec::new(),
            predator: None,
            points: Vec::new(),
            rng: rng_from_seed(seed),
            events: Vec::new(),
        };
        state.place_all()?;
        Ok(state)
    }

    /// Redistribute every entity using the world's own generator and
    /// restart the tick counter.
    pub fn reset_episode(&mut self) -> Result<()> {
        self.tick = 0;
        self.events.clear();
        self.place_all()
    }

    fn place_all(&mut self) -> Result<()> {
        let cfg = self.config.clone();
        self.prey.clear();
        self.points.clear();
        self.predator = None;
        for id in 0..cfg.n_prey {
            let position = self.sample_free(cfg.prey_radius, None)?;
            let heading = self.rng.random_range(0.0..360.0);
            self.prey.push(AgentBody {
                id,
                position,
                heading,
                velocity: Vec2::default(),
            });
        }
        if cfg.predator_present {
            let position = self.sample_free(cfg.predator_radius, None)?;
            let heading = self.rng.random_range(0.0..360.0);
            let patrol_waypoint = self.sample_waypoint()?;
            self.predator = Some(PredatorState {
                body: AgentBody {
                    id: 0,
                    position,
                    heading,
                    velocity: Vec2::default(),
                },
                mode: PredatorMode::Patrol,
                target_prey_id: None,
                patrol_waypoint,
            });
        }
        let polarities = std::iter::repeat_n(Polarity::Positive, cfg.n_positive_points)
            .chain(std::iter::repeat_n(Polarity::Negative, cfg.n_negative_points));
        for polarity in polarities {
            let position = self.sample_free(cfg.point_radius, None)?;
            self.points.push(PointObject {
                position,
                polarity,
                radius: cfg.point_radius,
            });
        }
        Ok(())
    }

    /// Occupied discs: prey, predator, points. `skip` excludes one entity
    /// (by the same index order) from the list.
    fn occupied(&self) -> Vec<(Vec2, f64)> {
        let cfg = &self.config;
        let mut occ: Vec<(Vec2, f64)> = self.prey.iter().map(|p| (p.position, cfg.prey_radius)).collect();
        if let Some(pred) = &self.predator {
            occ.push((pred.body.position, cfg.predator_radius));
        }
        occ.extend(self.points.iter().map(|p| (p.position, p.radius)));
        occ
    }

    /// Uniform position whose disc avoids walls, barriers and every other
    /// entity. `skip` names an index into [`Self::occupied`] to ignore.
    fn sample_free(&mut self, radius: f64, skip: Option<usize>) -> Result<Vec2> {
        let occ = self.occupied();
        let h = self.config.half_side() - radius;
        if h <= 0.0 {
            return Err(Error::Config("arena too small for entity radius".into()));
        }
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = Vec2::new(self.rng.random_range(-h..h), self.rng.random_range(-h..h));
            if self.blocked(p, radius) {
                continue;
            }
            let clear = occ
                .iter()
                .enumerate()
                .all(|(i, (q, r))| Some(i) == skip || p.dist(*q) >= radius + r);
            if clear {
                return Ok(p);
            }
        }
        Err(Error::Config(format!(
            "could not place an entity of radius {radius} without overlap after {MAX_PLACEMENT_ATTEMPTS} attempts; arena too crowded"
        )))
    }

    pub(super) fn sample_waypoint(&mut self) -> Result<Vec2> {
        let r = self.config.predator_radius;
        let h = self.config.half_side() - r;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = Vec2::new(self.rng.random_range(-h..h), self.rng.random_range(-h..h));
            if !self.blocked(p, r) {
                return Ok(p);
            }
        }
        Err(Error::Config("no reachable waypoint outside barriers".into()))
    }

    /// True if a disc at `p` would overlap a wall or barrier.
    pub fn blocked(&self, p: Vec2, radius: f64) -> bool {
        let h = self.config.half_side() - radius;
        p.x < -h || p.x > h || p.y < -h || p.y > h || self.config.barrier_layout.iter().any(|b| b.blocks(p, radius))
    }

    /// Axis-separated move: each component is applied only if it keeps the
    /// disc clear of walls and barriers, so bodies slide along obstacles.
    pub(super) fn slide(&self, from: Vec2, delta: Vec2, radius: f64) -> Vec2 {
        let h = self.config.half_side() - radius;
        let mut p = from;
        let cx = Vec2::new((p.x + delta.x).clamp(-h, h), p.y);
        if !self.blocked(cx, radius) {
            p = cx;
        }
        let cy = Vec2::new(p.x, (p.y + delta.y).clamp(-h, h));
        if !self.blocked(cy, radius) {
            p = cy;
        }
        p
    }

    /// Advance one tick: prey motion, point pickups, predator rules, catches.
    pub fn step(&mut self, prey_actions: &[usize]) -> Result<StepOutcome> {
        if prey_actions.len() != self.prey.len() {
            return Err(Error::Input(format!(
                "expected {} prey actions, got {}",
                self.prey.len(),
                prey_actions.len()
            )));
        }
        let actions = prey_actions
            .iter()
            .enumerate()
            .map(|(id, &a)| PreyAction::from_joint(a).map_err(|_| Error::Input(format!("prey {id}: action {a} out of range 0..6"))))
            .collect::<Result<Vec<_>>>()?;

        let cfg = self.config.clone();
        self.tick += 1;
        self.events.clear();
        let mut rewards = vec![0.0; self.prey.len()];

        for (i, action) in actions.iter().enumerate() {
            let turn = match action.rotation {
                super::Rotation::None => 0.0,
                super::Rotation::Left => cfg.prey_turn_speed * cfg.tick_dt,
                super::Rotation::Right => -cfg.prey_turn_speed * cfg.tick_dt,
            };
            let body = &self.prey[i];
            let heading = normalize_heading(body.heading + turn);
            let from = body.position;
            let to = match action.movement {
                super::Movement::None => from,
                super::Movement::Forward => {
                    let delta = Vec2::from_heading(heading).scale(cfg.prey_move_speed * cfg.tick_dt);
                    self.slide(from, delta, cfg.prey_radius)
                }
            };
            let body = &mut self.prey[i];
            body.heading = heading;
            body.position = to;
            body.velocity = to.sub(from).scale(1.0 / cfg.tick_dt);
        }

        let n_prey = self.prey.len();
        for i in 0..n_prey {
            for k in 0..self.points.len() {
                let pt = &self.points[k];
                if self.prey[i].position.dist(pt.position) > cfg.prey_radius + pt.radius {
                    continue;
                }
                let kind = match pt.polarity {
                    Polarity::Positive => EventKind::PositiveCollected,
                    Polarity::Negative => EventKind::NegativeCollected,
                };
                rewards[i] += kind.reward();
                self.events.push(Event {
                    tick: self.tick,
                    kind,
                    prey_id: i,
                });
                let skip = n_prey + usize::from(self.predator.is_some()) + k;
                self.points[k].position = self.sample_free(cfg.point_radius, Some(skip))?;
            }
        }

        if self.predator.is_some() {
            self.predator_step()?;
            for i in 0..n_prey {
                let pred_pos = self.predator.as_ref().map(|p| p.body.position).unwrap();
                if self.prey[i].position.dist(pred_pos) > cfg.prey_radius + cfg.predator_radius {
                    continue;
                }
                rewards[i] += CAUGHT_REWARD;
                self.events.push(Event {
                    tick: self.tick,
                    kind: EventKind::PreyCaught,
                    prey_id: i,
                });
                let pos = self.sample_free(cfg.prey_radius, Some(i))?;
                let prey = &mut self.prey[i];
                prey.position = pos;
                prey.velocity = Vec2::default();
            }
        }

        let observations = (0..n_prey).map(|i| self.ray_cast(i)).collect::<Result<Vec<_>>>()?;
        Ok(StepOutcome {
            rewards,
            observations,
            events: self.events.clone(),
        })
    }

    /// Current observation of every prey.
    pub fn observe_all(&self) -> Result<Vec<RayObservation>> {
        (0..self.prey.len()).map(|i| self.ray_cast(i)).collect()
    }

    pub fn count_points(&self, polarity: Polarity) -> usize {
        self.points.iter().filter(|p| p.polarity == polarity).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Rect, HIT_KINDS};

    fn quiet_config() -> WorldConfig {
        WorldConfig {
            n_prey: 1,
            n_positive_points: 1,
            n_negative_points: 1,
            predator_present: false,
            barrier_layout: vec![],
            ..WorldConfig::default()
        }
    }

    #[test]
    fn reset_is_deterministic() {
        let cfg = WorldConfig::default();
        let a = WorldState::reset(&cfg, 99).unwrap();
        let b = WorldState::reset(&cfg, 99).unwrap();
        assert_eq!(a, b);
        let c = WorldState::reset(&cfg, 100).unwrap();
        assert_ne!(a.prey, c.prey);
    }

    #[test]
    fn predator_absent_when_disabled() {
        let cfg = WorldConfig {
            predator_present: false,
            ..WorldConfig::default()
        };
        assert!(WorldState::reset(&cfg, 1).unwrap().predator.is_none());
    }

    #[test]
    fn crowded_arena_is_config_error() {
        let cfg = WorldConfig {
            n_positive_points: 5000,
            ..WorldConfig::default()
        };
        assert!(matches!(WorldState::reset(&cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn resets_never_place_inside_barriers() {
        let cfg = WorldConfig::default();
        for seed in 0..10_000u64 {
            let s = WorldState::reset(&cfg, seed).unwrap();
            let mut centres: Vec<Vec2> = s.prey.iter().map(|p| p.position).collect();
            centres.extend(s.points.iter().map(|p| p.position));
            centres.extend(s.predator.iter().map(|p| p.body.position));
            for c in centres {
                for b in &cfg.barrier_layout {
                    assert!(!b.contains(c), "seed {seed}: entity at {c:?} inside {b:?}");
                }
            }
        }
    }

    #[test]
    fn overlapping_positive_point_is_collected() {
        let cfg = quiet_config();
        let mut s = WorldState::reset(&cfg, 3).unwrap();
        s.prey[0].position = Vec2::new(0.0, 0.0);
        s.points[0].position = Vec2::new(0.1, 0.0);
        s.points[1].position = Vec2::new(-4.0, -4.0);
        let out = s.step(&[0]).unwrap();
        assert_eq!(out.rewards, vec![1.0]);
        assert_eq!(out.events[0].kind, EventKind::PositiveCollected);
        assert_ne!(s.points[0].position, Vec2::new(0.1, 0.0));
        assert_eq!(s.points[0].polarity, Polarity::Positive);
        assert!(s.points[0].position.dist(s.prey[0].position) > cfg.prey_radius + cfg.point_radius);
    }

    #[test]
    fn noop_far_from_everything_is_quiet() {
        let cfg = quiet_config();
        let mut s = WorldState::reset(&cfg, 3).unwrap();
        s.prey[0].position = Vec2::new(0.0, 0.0);
        s.points[0].position = Vec2::new(4.0, 4.0);
        s.points[1].position = Vec2::new(-4.0, -4.0);
        let before = s.prey.clone();
        let out = s.step(&[0]).unwrap();
        assert_eq!(out.rewards, vec![0.0]);
        assert!(out.events.is_empty());
        assert_eq!(s.prey[0].position, before[0].position);
        assert_eq!(s.prey[0].heading, before[0].heading);
    }

    #[test]
    fn forward_closes_half_step_gap_to_negative_point() {
        let cfg = quiet_config();
        let step_len = cfg.prey_move_speed * cfg.tick_dt;
        let contact = cfg.prey_radius + cfg.point_radius;
        // Surface gap of half a step straight ahead.
        let setup = || {
            let mut s = WorldState::reset(&cfg, 4).unwrap();
            s.prey[0].position = Vec2::new(0.0, 0.0);
            s.prey[0].heading = 0.0;
            s.points[0].position = Vec2::new(4.0, 4.0);
            s.points[1].position = Vec2::new(contact + step_len / 2.0, 0.0);
            s
        };
        let mut idle = setup();
        assert_eq!(idle.step(&[0]).unwrap().rewards, vec![0.0]);
        let mut s = setup();
        let forward = PreyAction::from_joint(3).unwrap().joint();
        let out = s.step(&[forward]).unwrap();
        assert_eq!(out.rewards, vec![-0.2]);
        assert_eq!(out.events[0].kind, EventKind::NegativeCollected);
    }

    #[test]
    fn rotation_and_motion() {
        let cfg = quiet_config();
        let mut s = WorldState::reset(&cfg, 5).unwrap();
        s.prey[0].position = Vec2::new(0.0, 0.0);
        s.prey[0].heading = 90.0;
        s.points[0].position = Vec2::new(4.0, -4.0);
        s.points[1].position = Vec2::new(-4.0, -4.0);
        s.step(&[1]).unwrap(); // left
        assert!((s.prey[0].heading - 105.0).abs() < 1e-9);
        s.step(&[2]).unwrap(); // right
        assert!((s.prey[0].heading - 90.0).abs() < 1e-9);
        s.step(&[3]).unwrap();
        assert!((s.prey[0].position.y - 0.1).abs() < 1e-12);
        assert!(s.prey[0].position.x.abs() < 1e-12);
        let obs = s.ray_cast(0).unwrap().to_vector();
        let ego = &obs[cfg.ray_count * (HIT_KINDS + 1)..];
        assert!(ego[0].abs() < 1e-9 && (ego[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn walls_and_barriers_stop_motion() {
        let cfg = WorldConfig {
            barrier_layout: vec![Rect::new(1.0, -1.0, 2.0, 1.0)],
            ..quiet_config()
        };
        let mut s = WorldState::reset(&cfg, 6).unwrap();
        s.points[0].position = Vec2::new(-4.0, 4.0);
        s.points[1].position = Vec2::new(-4.0, -4.0);
        s.prey[0].position = Vec2::new(0.0, 0.0);
        s.prey[0].heading = 0.0;
        for _ in 0..50 {
            s.step(&[3]).unwrap();
        }
        assert!(s.prey[0].position.x <= 1.0 - cfg.prey_radius + 1e-12);
        s.prey[0].position = Vec2::new(4.0, -4.0);
        s.prey[0].heading = 0.0;
        for _ in 0..50 {
            s.step(&[3]).unwrap();
        }
        assert!((s.prey[0].position.x - (cfg.half_side() - cfg.prey_radius)).abs() < 1e-12);
    }

    #[test]
    fn bad_action_names_agent() {
        let mut s = WorldState::reset(&WorldConfig::default(), 1).unwrap();
        let mut acts = vec![0; 6];
        acts[4] = 9;
        let err = s.step(&acts).unwrap_err().to_string();
        assert!(err.contains("prey 4"), "{err}");
        assert!(s.step(&[0, 0]).is_err());
    }
}
