//! Rule-based predator: chase the nearest visible prey, otherwise patrol
//! between random waypoints.

use super::geometry::{angle_diff, segment_hits_rect};
use super::{PredatorMode, WorldState};
use crate::{Error, Result};

impl WorldState {
    /// Vision-cone test: within the view radius, within half the view angle
    /// of the predator heading, and not occluded by any barrier.
    pub fn predator_can_see(&self, prey_id: usize) -> Result<bool> {
        let pred = self
            .predator
            .as_ref()
            .ok_or_else(|| Error::Contract("predator_can_see called on a world without a predator".into()))?;
        let prey = self
            .prey
            .get(prey_id)
            .ok_or_else(|| Error::Input(format!("unknown prey id {prey_id}")))?;
        let cfg = &self.config;
        let from = pred.body.position;
        let to = prey.position;
        let offset = to.sub(from);
        let dist = offset.norm();
        if dist > cfg.predator_view_radius {
            return Ok(false);
        }
        if dist > 0.0 && angle_diff(pred.body.heading, offset.heading()).abs() > cfg.predator_view_angle / 2.0 {
            return Ok(false);
        }
        Ok(!cfg.barrier_layout.iter().any(|b| segment_hits_rect(from, to, b)))
    }

    /// Nearest visible prey, ties broken by the lower id.
    pub fn predator_target(&self) -> Result<Option<usize>> {
        let pred = self
            .predator
            .as_ref()
            .ok_or_else(|| Error::Contract("predator_target called on a world without a predator".into()))?;
        let mut best: Option<(f64, usize)> = None;
        for prey in &self.prey {
            if !self.predator_can_see(prey.id)? {
                continue;
            }
            let d = prey.position.dist(pred.body.position);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, prey.id));
            }
        }
        Ok(best.map(|(_, id)| id))
    }

    /// Advance the predator by one tick.
    pub fn predator_step(&mut self) -> Result<()> {
        let target = self.predator_target()?;
        let cfg = self.config.clone();
        let reach = cfg.predator_move_speed * cfg.tick_dt;
        let mut pred = self.predator.take().expect("checked by predator_target");
        let from = pred.body.position;
        match target {
            Some(id) => {
                let goal = self.prey[id].position;
                let offset = goal.sub(from);
                let dist = offset.norm();
                pred.mode = PredatorMode::Chase;
                pred.target_prey_id = Some(id);
                if dist > 0.0 {
                    pred.body.heading = offset.heading();
                    let delta = offset.scale(reach.min(dist) / dist);
                    pred.body.position = self.slide(from, delta, cfg.predator_radius);
                }
            }
            None => {
                pred.mode = PredatorMode::Patrol;
                pred.target_prey_id = None;
                let offset = pred.patrol_waypoint.sub(from);
                let dist = offset.norm();
                if dist > 0.0 {
                    pred.body.heading = offset.heading();
                    let delta = offset.scale(reach.min(dist) / dist);
                    pred.body.position = self.slide(from, delta, cfg.predator_radius);
                }
                let moved = pred.body.position.dist(from);
                let arrived = pred.body.position.dist(pred.patrol_waypoint) < 1e-9;
                // Stuck against a barrier counts as arrival.
                if arrived || moved < 1e-9 {
                    pred.patrol_waypoint = self.sample_waypoint()?;
                }
            }
        }
        pred.body.velocity = pred.body.position.sub(from).scale(1.0 / cfg.tick_dt);
        self.predator = Some(pred);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::env::{PredatorMode, Rect, Vec2, WorldConfig, WorldState};

    fn world(n_prey: usize, barriers: Vec<Rect>) -> WorldState {
        let cfg = WorldConfig {
            n_prey,
            n_positive_points: 1,
            n_negative_points: 1,
            barrier_layout: barriers,
            ..WorldConfig::default()
        };
        let mut s = WorldState::reset(&cfg, 17).unwrap();
        let pred = s.predator.as_mut().unwrap();
        pred.body.position = Vec2::new(-4.5, 0.0);
        pred.body.heading = 0.0;
        s.points[0].position = Vec2::new(-4.5, 4.5);
        s.points[1].position = Vec2::new(-4.5, -4.5);
        s
    }

    #[test]
    fn sees_prey_dead_ahead() {
        let mut s = world(1, vec![]);
        s.prey[0].position = Vec2::new(0.5, 0.0);
        assert!(s.predator_can_see(0).unwrap());
    }

    #[test]
    fn radius_limits_sight() {
        let cfg = WorldConfig {
            arena_side: 30.0,
            n_prey: 1,
            barrier_layout: vec![],
            ..WorldConfig::default()
        };
        let mut s = WorldState::reset(&cfg, 1).unwrap();
        let pred = s.predator.as_mut().unwrap();
        pred.body.position = Vec2::new(0.0, 0.0);
        pred.body.heading = 0.0;
        s.prey[0].position = Vec2::new(11.0, 0.0);
        assert!(!s.predator_can_see(0).unwrap());
        s.prey[0].position = Vec2::new(10.3, 0.0);
        assert!(s.predator_can_see(0).unwrap());
    }

    #[test]
    fn cone_and_occlusion() {
        let mut s = world(1, vec![Rect::new(-2.0, -0.5, -1.5, 0.5)]);
        s.prey[0].position = Vec2::new(0.5, 0.0);
        assert!(!s.predator_can_see(0).unwrap(), "barrier occludes");
        s.prey[0].position = Vec2::new(-4.5, 3.0);
        assert!(!s.predator_can_see(0).unwrap(), "outside 40 degree half-angle");
    }

    #[test]
    fn absent_predator_is_contract_error() {
        let cfg = WorldConfig {
            predator_present: false,
            ..WorldConfig::default()
        };
        let s = WorldState::reset(&cfg, 1).unwrap();
        assert!(s.predator_can_see(0).is_err());
    }

    #[test]
    fn chases_single_visible_prey() {
        let mut s = world(1, vec![]);
        s.prey[0].position = Vec2::new(0.0, 1.0);
        s.predator_step().unwrap();
        let pred = s.predator.as_ref().unwrap();
        assert_eq!(pred.mode, PredatorMode::Chase);
        assert_eq!(pred.target_prey_id, Some(0));
        let expect = Vec2::new(4.5, 1.0).heading();
        assert!((pred.body.heading - expect).abs() < 1e-9);
    }

    #[test]
    fn nearest_visible_prey_wins() {
        let mut s = world(2, vec![]);
        s.prey[0].position = Vec2::new(2.5, 0.0); // distance 7
        s.prey[1].position = Vec2::new(-1.5, 0.0); // distance 3
        assert_eq!(s.predator_target().unwrap(), Some(1));
        s.prey[1].position = Vec2::new(2.5, 0.3);
        s.prey[0].position = Vec2::new(-1.5, 0.1);
        assert_eq!(s.predator_target().unwrap(), Some(0));
    }

    #[test]
    fn patrol_draws_new_waypoint_on_arrival() {
        let mut s = world(1, vec![]);
        s.prey[0].position = Vec2::new(4.5, -4.5); // behind the cone
        let pred = s.predator.as_mut().unwrap();
        pred.body.heading = 180.0;
        pred.patrol_waypoint = Vec2::new(-4.2, 0.0);
        s.predator_step().unwrap();
        let pred = s.predator.as_ref().unwrap();
        assert_eq!(pred.mode, PredatorMode::Patrol);
        assert_eq!(pred.body.position, Vec2::new(-4.2, 0.0));
        assert_ne!(pred.patrol_waypoint, Vec2::new(-4.2, 0.0));
        let h = s.config.half_side();
        assert!(pred.patrol_waypoint.x.abs() < h && pred.patrol_waypoint.y.abs() < h);
    }
}
