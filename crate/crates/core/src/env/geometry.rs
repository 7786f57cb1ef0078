//! Plane geometry: vectors, ray intersections, segment occlusion.

use serde::{Deserialize, Serialize};

use super::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector for a heading in degrees, counter-clockwise from +x.
    pub fn from_heading(deg: f64) -> Self {
        let r = deg.to_radians();
        Self::new(r.cos(), r.sin())
    }

    pub fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        self.sub(o).norm()
    }

    /// Heading of this vector in degrees, normalised to [0, 360).
    pub fn heading(self) -> f64 {
        normalize_heading(self.y.atan2(self.x).to_degrees())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

pub fn normalize_heading(deg: f64) -> f64 {
    let h = deg.rem_euclid(360.0);
    // rem_euclid can return 360.0 for tiny negative inputs.
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

/// Signed smallest difference `to - from` in degrees, in (-180, 180].
pub fn angle_diff(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Distance along a unit-direction ray to a circle, `Some(0)` when the
/// origin is already inside.
pub fn ray_circle(origin: Vec2, dir: Vec2, center: Vec2, radius: f64) -> Option<f64> {
    let oc = origin.sub(center);
    let c = oc.dot(oc) - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = oc.dot(dir);
    if b > 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    Some(-b - disc.sqrt())
}

/// Slab test. Distance along the ray to the rectangle, `Some(0)` when the
/// origin is inside.
pub fn ray_rect(origin: Vec2, dir: Vec2, rect: &Rect) -> Option<f64> {
    let mut t_min = 0.0f64;
    let mut t_max = f64::INFINITY;
    for (o, d, lo, hi) in [
        (origin.x, dir.x, rect.x_min, rect.x_max),
        (origin.y, dir.y, rect.y_min, rect.y_max),
    ] {
        if d.abs() < 1e-15 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let (mut t0, mut t1) = ((lo - o) / d, (hi - o) / d);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_min = t_min.max(t0);
            t_max = t_max.min(t1);
            if t_min > t_max {
                return None;
            }
        }
    }
    Some(t_min)
}

/// Distance from a point inside `[-half, half]^2` to the boundary along `dir`.
pub fn ray_arena(origin: Vec2, dir: Vec2, half: f64) -> f64 {
    let axis = |o: f64, d: f64| {
        if d > 1e-15 {
            (half - o) / d
        } else if d < -1e-15 {
            (-half - o) / d
        } else {
            f64::INFINITY
        }
    };
    axis(origin.x, dir.x).min(axis(origin.y, dir.y)).max(0.0)
}

/// True when the closed segment `a -> b` touches the rectangle.
pub fn segment_hits_rect(a: Vec2, b: Vec2, rect: &Rect) -> bool {
    let d = b.sub(a);
    let len = d.norm();
    if len == 0.0 {
        return rect.contains(a);
    }
    matches!(ray_rect(a, d.scale(1.0 / len), rect), Some(t) if t <= len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headings_normalise() {
        assert_eq!(normalize_heading(-90.0), 270.0);
        assert_eq!(normalize_heading(720.0), 0.0);
        assert!((angle_diff(350.0, 10.0) - 20.0).abs() < 1e-12);
        assert!((angle_diff(10.0, 350.0) + 20.0).abs() < 1e-12);
        assert!((Vec2::new(0.0, -1.0).heading() - 270.0).abs() < 1e-12);
    }

    #[test]
    fn ray_circle_hits_front_face() {
        let t = ray_circle(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(5.0, 0.0), 1.0).unwrap();
        assert!((t - 4.0).abs() < 1e-12);
        assert!(ray_circle(Vec2::new(0.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(5.0, 0.0), 1.0).is_none());
        assert!(ray_circle(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(5.0, 1.5), 1.0).is_none());
    }

    #[test]
    fn ray_rect_slab() {
        let r = Rect::new(2.0, -1.0, 3.0, 1.0);
        let t = ray_rect(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), &r).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
        assert!(ray_rect(Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), &r).is_none());
        assert_eq!(ray_rect(Vec2::new(2.5, 0.0), Vec2::new(0.0, 1.0), &r), Some(0.0));
    }

    #[test]
    fn arena_distance() {
        let t = ray_arena(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), 5.0);
        assert!((t - 4.0).abs() < 1e-12);
        let d = Vec2::from_heading(45.0);
        let t = ray_arena(Vec2::new(0.0, 0.0), d, 5.0);
        assert!((t - 5.0 * 2f64.sqrt()).abs() < 1e-9);
    }
}
