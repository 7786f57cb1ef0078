//! Prey ray-cast perception.

use super::geometry::{ray_arena, ray_circle, ray_rect, Vec2};
use super::{Polarity, WorldState};
use crate::{Error, Result};

/// Number of hit categories in the one-hot encoding.
pub const HIT_KINDS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitKind {
    PositivePoint = 0,
    NegativePoint = 1,
    /// Arena wall or interior barrier.
    Wall = 2,
    Predator = 3,
    Prey = 4,
    Nothing = 5,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub kind: HitKind,
    /// Hit distance over ray length, 1 when nothing is hit.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayObservation {
    pub rays: Vec<RayHit>,
    /// Velocity divided by the prey move speed.
    pub ego: [f64; 2],
}

impl RayObservation {
    /// Flat encoding: per ray six one-hot values then the distance, then the
    /// two ego features.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.rays.len() * (HIT_KINDS + 1) + 2);
        self.write_into(&mut v);
        v
    }

    pub fn write_into(&self, v: &mut Vec<f64>) {
        v.clear();
        for ray in &self.rays {
            let mut onehot = [0.0; HIT_KINDS];
            onehot[ray.kind as usize] = 1.0;
            v.extend_from_slice(&onehot);
            v.push(ray.distance);
        }
        v.extend_from_slice(&self.ego);
    }
}

impl WorldState {
    /// Angles of the sensor fan relative to the heading, left to right.
    pub fn ray_offsets(&self) -> Vec<f64> {
        let n = self.config.ray_count;
        let fan = self.config.ray_fan_angle;
        if n == 1 {
            return vec![0.0];
        }
        (0..n).map(|k| -fan / 2.0 + fan * k as f64 / (n - 1) as f64).collect()
    }

    /// Cast the sensor fan for one prey. Each ray reports its nearest hit;
    /// barriers occlude whatever lies behind them.
    pub fn ray_cast(&self, prey_id: usize) -> Result<RayObservation> {
        let me = self
            .prey
            .get(prey_id)
            .ok_or_else(|| Error::Input(format!("unknown prey id {prey_id}")))?;
        let cfg = &self.config;
        let rays = self
            .ray_offsets()
            .into_iter()
            .map(|off| {
                let dir = Vec2::from_heading(me.heading + off);
                let mut best = (ray_arena(me.position, dir, cfg.half_side()), HitKind::Wall);
                let mut consider = |t: Option<f64>, kind: HitKind| {
                    if let Some(t) = t {
                        if t < best.0 {
                            best = (t, kind);
                        }
                    }
                };
                for b in &cfg.barrier_layout {
                    consider(ray_rect(me.position, dir, b), HitKind::Wall);
                }
                for p in &self.points {
                    let kind = match p.polarity {
                        Polarity::Positive => HitKind::PositivePoint,
                        Polarity::Negative => HitKind::NegativePoint,
                    };
                    consider(ray_circle(me.position, dir, p.position, p.radius), kind);
                }
                if let Some(pred) = &self.predator {
                    consider(ray_circle(me.position, dir, pred.body.position, cfg.predator_radius), HitKind::Predator);
                }
                for other in self.prey.iter().filter(|o| o.id != me.id) {
                    consider(ray_circle(me.position, dir, other.position, cfg.prey_radius), HitKind::Prey);
                }
                if best.0 > cfg.ray_length {
                    RayHit {
                        kind: HitKind::Nothing,
                        distance: 1.0,
                    }
                } else {
                    RayHit {
                        kind: best.1,
                        distance: best.0 / cfg.ray_length,
                    }
                }
            })
            .collect();
        let speed = cfg.prey_move_speed;
        Ok(RayObservation {
            rays,
            ego: [me.velocity.x / speed, me.velocity.y / speed],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Rect, WorldConfig};

    fn lone_prey(barriers: Vec<Rect>) -> WorldState {
        let cfg = WorldConfig {
            n_prey: 1,
            n_positive_points: 1,
            n_negative_points: 1,
            predator_present: false,
            barrier_layout: barriers,
            ..WorldConfig::default()
        };
        let mut s = WorldState::reset(&cfg, 8).unwrap();
        s.prey[0].position = Vec2::new(0.0, 0.0);
        s.prey[0].heading = 0.0;
        // Park the points in a corner behind the prey.
        s.points[0].position = Vec2::new(-4.8, -4.8);
        s.points[1].position = Vec2::new(-4.8, -4.3);
        s
    }

    #[test]
    fn centred_prey_sees_walls() {
        let s = lone_prey(vec![]);
        let obs = s.ray_cast(0).unwrap();
        for (ray, off) in obs.rays.iter().zip(s.ray_offsets()) {
            let dir = Vec2::from_heading(off);
            let expect = ray_arena(Vec2::new(0.0, 0.0), dir, 5.11) / 10.0;
            assert_eq!(ray.kind, HitKind::Wall);
            assert!((ray.distance - expect).abs() < 1e-12);
        }
        assert_eq!(obs.to_vector().len(), 79);
    }

    #[test]
    fn point_ahead_at_half_length() {
        let mut s = lone_prey(vec![]);
        s.config.arena_side = 30.0;
        s.points[0].position = Vec2::new(5.0 + 0.2, 0.0);
        let obs = s.ray_cast(0).unwrap();
        let mid = obs.rays[5];
        assert_eq!(mid.kind, HitKind::PositivePoint);
        // Analytic: front face of a radius-0.2 circle centred at 5.2.
        assert!((mid.distance - 0.5).abs() < 1e-12);
    }

    #[test]
    fn barrier_occludes_point() {
        let mut s = lone_prey(vec![Rect::new(2.0, -0.5, 2.5, 0.5)]);
        s.points[0].position = Vec2::new(4.0, 0.0);
        let mid = s.ray_cast(0).unwrap().rays[5];
        assert_eq!(mid.kind, HitKind::Wall);
        assert!((mid.distance - 0.2).abs() < 1e-12);
    }

    #[test]
    fn nothing_beyond_ray_length() {
        let mut s = lone_prey(vec![]);
        s.config.arena_side = 40.0;
        let obs = s.ray_cast(0).unwrap();
        assert!(obs.rays.iter().all(|r| r.kind == HitKind::Nothing && r.distance == 1.0));
    }
}
