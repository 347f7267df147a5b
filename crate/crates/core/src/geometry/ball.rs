use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::Point;

/// A closed Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return invalid(format!("ball radius must be positive and finite, got {radius}"));
        }
        Ok(Ball { center, radius })
    }

    pub fn interval(center: f64, radius: f64) -> Result<Self> {
        Ball::new(Point(vec![center]), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// ρB: same centre, radius scaled by ρ.
    pub fn dilate(&self, rho: f64) -> Ball {
        Ball { center: self.center.clone(), radius: self.radius * rho }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist(&self.center.0, x) <= self.radius
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        self.center.dist(&other.center) + other.radius <= self.radius * (1.0 + 1e-12)
    }

    /// Smallest admissibility scale of this ball: r_B / min(1, 1/|c_B|).
    pub fn admissibility_scale(&self) -> f64 {
        self.radius / maximal_radius(self.center.norm())
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// min(1, 1/|c|).
#[inline]
pub fn maximal_radius(center_norm: f64) -> f64 {
    if center_norm <= 1.0 {
        1.0
    } else {
        1.0 / center_norm
    }
}

/// r_B <= s · min(1, 1/|c_B|).
pub fn is_admissible(ball: &Ball, scale: f64) -> bool {
    ball.radius <= scale * maximal_radius(ball.center.norm())
}

pub fn maximal_admissible_ball(center: Point) -> Ball {
    let r = maximal_radius(center.norm());
    Ball { center, radius: r }
}

/// The ball B(c_B, 4 min(1, 1/|c_B|)) outside of which the local grand
/// maximal function of anything supported in B vanishes.
pub fn support_bound(ball: &Ball) -> Result<Ball> {
    if !is_admissible(ball, 1.0) {
        return invalid("support bound requires a ball admissible at scale 1");
    }
    Ok(Ball {
        center: ball.center.clone(),
        radius: 4.0 * maximal_radius(ball.center.norm()),
    })
}
