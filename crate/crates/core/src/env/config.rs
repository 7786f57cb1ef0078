use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::{Error, Result};

/// Axis-aligned rectangle in arena coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self { x_min, y_min, x_max, y_max }
    }

    /// Closed containment.
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Open-interior test against the rectangle grown by `margin` on every
    /// side: a disc of radius `margin` centred at `p` overlaps the barrier.
    pub fn blocks(&self, p: Vec2, margin: f64) -> bool {
        p.x > self.x_min - margin && p.x < self.x_max + margin && p.y > self.y_min - margin && p.y < self.y_max + margin
    }
}

/// Static description of a world. Distances are arena units, angles degrees,
/// speeds per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    /// Side of the square arena, centred on the origin.
    pub arena_side: f64,
    pub barrier_layout: Vec<Rect>,
    pub n_prey: usize,
    pub n_positive_points: usize,
    pub n_negative_points: usize,
    pub predator_present: bool,
    pub prey_move_speed: f64,
    pub prey_turn_speed: f64,
    pub predator_move_speed: f64,
    pub predator_view_radius: f64,
    /// Full cone angle; the predator sees +-half of it around its heading.
    pub predator_view_angle: f64,
    pub tick_dt: f64,
    pub episode_length: u64,
    pub prey_radius: f64,
    pub predator_radius: f64,
    pub point_radius: f64,
    pub ray_count: usize,
    /// Full fan angle of the prey ray sensor.
    pub ray_fan_angle: f64,
    pub ray_length: f64,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            arena_side: 10.22,
            barrier_layout: Self::default_barriers(),
            n_prey: 6,
            n_positive_points: 10,
            n_negative_points: 10,
            predator_present: true,
            prey_move_speed: 2.0,
            prey_turn_speed: 300.0,
            predator_move_speed: 20.0,
            predator_view_radius: 10.33,
            predator_view_angle: 80.0,
            tick_dt: 0.05,
            episode_length: 2000,
            prey_radius: 0.25,
            predator_radius: 0.4,
            point_radius: 0.2,
            ray_count: 11,
            ray_fan_angle: 140.0,
            ray_length: 10.0,
            seed: 0,
        }
    }
}

impl WorldConfig {
    /// Two vertical slabs mirrored about the centre.
    pub fn default_barriers() -> Vec<Rect> {
        vec![Rect::new(-2.7, -1.5, -2.3, 1.5), Rect::new(2.3, -1.5, 2.7, 1.5)]
    }

    pub fn half_side(&self) -> f64 {
        self.arena_side / 2.0
    }

    /// Length of the prey observation vector: 7 values per ray plus 2 ego
    /// velocity features.
    pub fn observation_dim(&self) -> usize {
        self.ray_count * (super::HIT_KINDS + 1) + 2
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("arena_side", self.arena_side),
            ("prey_move_speed", self.prey_move_speed),
            ("prey_turn_speed", self.prey_turn_speed),
            ("predator_move_speed", self.predator_move_speed),
            ("predator_view_radius", self.predator_view_radius),
            ("tick_dt", self.tick_dt),
            ("prey_radius", self.prey_radius),
            ("predator_radius", self.predator_radius),
            ("point_radius", self.point_radius),
            ("ray_length", self.ray_length),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.predator_view_angle > 0.0 && self.predator_view_angle <= 360.0) {
            return Err(Error::Config(format!(
                "predator_view_angle must be in (0, 360], got {}",
                self.predator_view_angle
            )));
        }
        if !(self.ray_fan_angle >= 0.0 && self.ray_fan_angle <= 360.0) {
            return Err(Error::Config(format!("ray_fan_angle must be in [0, 360], got {}", self.ray_fan_angle)));
        }
        for (name, v) in [
            ("n_prey", self.n_prey),
            ("n_positive_points", self.n_positive_points),
            ("n_negative_points", self.n_negative_points),
            ("ray_count", self.ray_count),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.episode_length == 0 {
            return Err(Error::Config("episode_length must be at least 1".into()));
        }
        let h = self.half_side();
        for (i, b) in self.barrier_layout.iter().enumerate() {
            let finite = [b.x_min, b.y_min, b.x_max, b.y_max].iter().all(|v| v.is_finite());
            if !finite || b.x_min >= b.x_max || b.y_min >= b.y_max {
                return Err(Error::Config(format!("barrier {i} is degenerate")));
            }
            if b.x_min <= -h || b.x_max >= h || b.y_min <= -h || b.y_max >= h {
                return Err(Error::Config(format!("barrier {i} is not strictly inside the arena")));
            }
        }
        Ok(())
    }
}
