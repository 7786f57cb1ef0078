//! Deterministic 2D predator-prey world.
//!
//! A square arena bounded by walls, axis-aligned interior barriers, reward
//! and penalty points that respawn when collected, prey bodies driven by
//! discrete actions and a rule-based predator with a vision cone.

mod actions;
mod config;
pub mod geometry;
mod predator;
mod sensor;
pub mod trajectory;
mod world;

pub use actions::{prey_action_space, ActionBranches, Movement, PreyAction, Rotation};
pub use config::{Rect, WorldConfig};
pub use geometry::Vec2;
pub use sensor::{HitKind, RayHit, RayObservation, HIT_KINDS};
pub use world::{AgentBody, Event, EventKind, PointObject, Polarity, PredatorMode, PredatorState, StepOutcome, WorldState};

/// Reward for collecting a positive point.
pub const POSITIVE_REWARD: f64 = 1.0;
/// Penalty for collecting a negative point.
pub const NEGATIVE_REWARD: f64 = -0.2;
/// Penalty for being caught by the predator.
pub const CAUGHT_REWARD: f64 = -1.0;
