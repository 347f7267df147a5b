use std::collections::HashMap;

use super::ball::{dist, Ball};

/// Cubic smoothstep u²(3 − 2u) clamped to [0, 1]; C¹ with slope at most 3/2.
#[inline]
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

#[inline]
fn smoothstep_slope(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        6.0 * u * (1.0 - u)
    }
}

/// The radial profile ψ(d) of a ball weight before normalization: 1 for
/// d <= inner·r, smooth ramp down to 0 at d = r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProfile {
    pub inner: f64,
}

impl Default for WeightProfile {
    fn default() -> Self {
        WeightProfile { inner: 0.5 }
    }
}

impl WeightProfile {
    pub fn eval(&self, d: f64, r: f64) -> f64 {
        1.0 - smoothstep((d / r - self.inner) / (1.0 - self.inner))
    }
}

/// Uniform hash of ball centres, cell size 1 (every covering radius is <= 1).
#[derive(Debug, Clone, Default)]
pub struct CenterIndex {
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl CenterIndex {
    pub fn key(x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| v.floor() as i64).collect()
    }

    pub fn insert(&mut self, x: &[f64], id: usize) {
        self.cells.entry(Self::key(x)).or_default().push(id);
    }

    /// Ids whose centre lies within `reach` cells of x (reach in whole cells).
    pub fn near(&self, x: &[f64], reach: i64) -> Vec<usize> {
        let base = Self::key(x);
        let n = base.len();
        let mut out = Vec::new();
        let span = (2 * reach + 1) as usize;
        let total = span.pow(n as u32);
        let mut key = vec![0i64; n];
        for code in 0..total {
            let mut c = code;
            for i in 0..n {
                key[i] = base[i] + (c % span) as i64 - reach;
                c /= span;
            }
            if let Some(ids) = self.cells.get(&key) {
                out.extend_from_slice(ids);
            }
        }
        out
    }
}

/// A partition of unity {η_j} subordinate to a covering.
#[derive(Debug, Clone)]
pub enum PartitionOfUnity {
    /// One-dimensional hat-type weights on nodes t_k = sign(k)√|k|,
    /// |k| <= J. η_k rises on [t_{k−1}, t_k] and falls on [t_k, t_{k+1}],
    /// so supp η_k is the closure of I_k = (t_{k−1}, t_{k+1}). The two end
    /// weights stay equal to 1 up to the domain boundary ±t_J.
    Nodes1D { nodes: Vec<f64> },
    /// Normalized ball weights η_j = ψ_j / Σ_k ψ_k.
    Balls {
        balls: Vec<Ball>,
        profile: WeightProfile,
        index: CenterIndex,
    },
}

impl PartitionOfUnity {
    pub(crate) fn from_balls(balls: Vec<Ball>, profile: WeightProfile) -> Self {
        let mut index = CenterIndex::default();
        for (i, b) in balls.iter().enumerate() {
            index.insert(&b.center.0, i);
        }
        PartitionOfUnity::Balls { balls, profile, index }
    }

    pub fn len(&self) -> usize {
        match self {
            PartitionOfUnity::Nodes1D { nodes } => nodes.len(),
            PartitionOfUnity::Balls { balls, .. } => balls.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            PartitionOfUnity::Nodes1D { .. } => 1,
            PartitionOfUnity::Balls { balls, .. } => balls.first().map_or(1, |b| b.dim()),
        }
    }

    /// The interval [lo, hi] outside of which η_j vanishes (1D only).
    pub fn support_interval(&self, j: usize) -> Option<(f64, f64)> {
        match self {
            PartitionOfUnity::Nodes1D { nodes } => {
                let lo = if j == 0 { nodes[0] } else { nodes[j - 1] };
                let hi = if j + 1 == nodes.len() { nodes[j] } else { nodes[j + 1] };
                Some((lo, hi))
            }
            PartitionOfUnity::Balls { .. } => None,
        }
    }

    /// All (j, η_j(x)) with η_j(x) > 0.
    pub fn weights_at(&self, x: &[f64]) -> Vec<(usize, f64)> {
        match self {
            PartitionOfUnity::Nodes1D { nodes } => {
                let t = x[0];
                let n = nodes.len();
                if n == 1 {
                    return vec![(0, 1.0)];
                }
                if t <= nodes[0] {
                    return vec![(0, 1.0)];
                }
                if t >= nodes[n - 1] {
                    return vec![(n - 1, 1.0)];
                }
                // segment [nodes[k], nodes[k+1]] containing t
                let k = nodes.partition_point(|&v| v <= t) - 1;
                let u = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
                let up = smoothstep(u);
                let mut out = Vec::with_capacity(2);
                if up < 1.0 {
                    out.push((k, 1.0 - up));
                }
                if up > 0.0 {
                    out.push((k + 1, up));
                }
                out
            }
            PartitionOfUnity::Balls { balls, profile, index } => {
                let mut raw: Vec<(usize, f64)> = index
                    .near(x, 1)
                    .into_iter()
                    .filter_map(|i| {
                        let b = &balls[i];
                        let w = profile.eval(dist(&b.center.0, x), b.radius);
                        (w > 0.0).then_some((i, w))
                    })
                    .collect();
                let total: f64 = raw.iter().map(|(_, w)| w).sum();
                if total > 0.0 {
                    for (_, w) in raw.iter_mut() {
                        *w /= total;
                    }
                }
                raw.sort_by_key(|(i, _)| *i);
                raw
            }
        }
    }

    pub fn weight(&self, j: usize, x: &[f64]) -> f64 {
        self.weights_at(x)
            .into_iter()
            .find(|(i, _)| *i == j)
            .map_or(0.0, |(_, w)| w)
    }

    /// Analytic bound on |η_j'| for the 1D weights: 3/2 divided by the
    /// shorter ramp length.
    pub fn slope_bound_1d(&self, j: usize) -> Option<f64> {
        match self {
            PartitionOfUnity::Nodes1D { nodes } => {
                let mut m: f64 = 0.0;
                if j > 0 {
                    m = m.max(1.5 / (nodes[j] - nodes[j - 1]));
                }
                if j + 1 < nodes.len() {
                    m = m.max(1.5 / (nodes[j + 1] - nodes[j]));
                }
                Some(m)
            }
            PartitionOfUnity::Balls { .. } => None,
        }
    }

    /// Derivative of η_j at t (1D only; used by tests of the slope bound).
    pub fn derivative_1d(&self, j: usize, t: f64) -> Option<f64> {
        match self {
            PartitionOfUnity::Nodes1D { nodes } => {
                let n = nodes.len();
                if t <= nodes[0] || t >= nodes[n - 1] {
                    return Some(0.0);
                }
                let k = nodes.partition_point(|&v| v <= t) - 1;
                let len = nodes[k + 1] - nodes[k];
                let s = smoothstep_slope((t - nodes[k]) / len) / len;
                Some(if j == k + 1 {
                    s
                } else if j == k {
                    -s
                } else {
                    0.0
                })
            }
            PartitionOfUnity::Balls { .. } => None,
        }
    }
}
