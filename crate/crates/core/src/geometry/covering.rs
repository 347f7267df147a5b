use serde::Serialize;

use super::ball::{dist, maximal_admissible_ball, maximal_radius, Ball};
use super::partition::{CenterIndex, PartitionOfUnity, WeightProfile};
use crate::error::{invalid, Error, Result};
use crate::measure::{Point, CLIP};

/// A covering of the clipped domain by admissible balls.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleCovering {
    pub dim: usize,
    pub scale: f64,
    pub extent: f64,
    pub balls: Vec<Ball>,
    /// Largest number of dilated balls 4B_j containing a sample point.
    pub overlap_4b: usize,
    /// min over sample points of max_j (1 − |x − c_j| / r_j).
    pub coverage_margin: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CoveringOptions {
    /// Candidate lattice spacing relative to min(1, 1/extent).
    pub candidate_step: f64,
    /// Sample points per unit of local radius used for the diagnostics.
    pub check_density: f64,
    pub max_overlap: usize,
    pub min_margin: f64,
    pub profile: WeightProfile,
}

impl Default for CoveringOptions {
    fn default() -> Self {
        CoveringOptions {
            candidate_step: 0.25,
            check_density: 4.0,
            max_overlap: 1000,
            min_margin: 0.05,
            profile: WeightProfile::default(),
        }
    }
}

/// The interval covering I_0 = (−1, 1), I_j = (√(j−1), √(j+1)), I_{−j} = −I_j
/// for 1 <= j <= J = ⌈extent²⌉, with its hat-type partition of unity. The
/// outermost intervals are cut at ±√J.
pub fn covering_1d(extent: f64) -> Result<(AdmissibleCovering, PartitionOfUnity)> {
    if !(extent > 0.0) || extent > CLIP {
        return invalid(format!("extent must lie in (0, {CLIP}], got {extent}"));
    }
    let big_j = (extent * extent).ceil().max(1.0) as i64;
    let node = |k: i64| (k.signum() as f64) * (k.unsigned_abs() as f64).sqrt();
    let nodes: Vec<f64> = (-big_j..=big_j).map(node).collect();
    let balls: Vec<Ball> = (0..nodes.len())
        .map(|j| {
            let lo = if j == 0 { nodes[0] } else { nodes[j - 1] };
            let hi = if j + 1 == nodes.len() { nodes[j] } else { nodes[j + 1] };
            Ball::interval(0.5 * (lo + hi), 0.5 * (hi - lo)).expect("positive length")
        })
        .collect();
    let overlap_4b = overlap_count_1d(&balls);
    let cov = AdmissibleCovering {
        dim: 1,
        scale: 1.0,
        extent: node(big_j),
        balls,
        overlap_4b,
        coverage_margin: 0.0,
    };
    Ok((cov, PartitionOfUnity::Nodes1D { nodes }))
}

fn overlap_count_1d(balls: &[Ball]) -> usize {
    // sweep over the endpoints of the dilated intervals
    let mut events: Vec<(f64, i32)> = balls
        .iter()
        .flat_map(|b| {
            let c = b.center.0[0];
            let r = 4.0 * b.radius;
            [(c - r, 1), (c + r, -1)]
        })
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut cur = 0i32;
    let mut best = 0i32;
    for (_, d) in events {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// Greedy covering of the cube [−extent, extent]ⁿ by maximal admissible
/// balls whose halves are pairwise disjoint.
///
/// Candidates on a fine lattice are visited by increasing |x|; a
/// candidate becomes a centre unless its half ball meets an existing half
/// ball. Radii are nonincreasing in |x|, so any rejected candidate lies in
/// the closed ball of the centre that blocked it.
pub fn covering_nd(
    extent: f64,
    dim: usize,
    opts: &CoveringOptions,
) -> Result<(AdmissibleCovering, PartitionOfUnity)> {
    if !(1..=3).contains(&dim) {
        return invalid(format!("covering_nd supports dimensions 1..=3, got {dim}"));
    }
    if !(extent > 0.0) || extent > CLIP {
        return invalid(format!("extent must lie in (0, {CLIP}], got {extent}"));
    }
    let reach = extent + 0.5;
    let step = opts.candidate_step * maximal_radius(reach * (dim as f64).sqrt());
    let per_axis = (2.0 * reach / step).ceil() as usize + 1;
    let axis: Vec<f64> = (0..per_axis).map(|i| -reach + i as f64 * step).collect();

    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(per_axis.pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        candidates.push(idx.iter().map(|&i| axis[i]).collect());
        let mut d = 0;
        while d < dim {
            idx[d] += 1;
            if idx[d] < per_axis {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == dim {
            break;
        }
    }
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    candidates.sort_by(|a, b| norm(a).total_cmp(&norm(b)));

    let mut balls: Vec<Ball> = Vec::new();
    let mut index = CenterIndex::default();
    for x in candidates {
        let r = maximal_radius(norm(&x));
        let blocked = index.near(&x, 1).into_iter().any(|i| {
            let b = &balls[i];
            dist(&b.center.0, &x) <= 0.5 * (b.radius + r)
        });
        if !blocked {
            index.insert(&x, balls.len());
            balls.push(maximal_admissible_ball(Point(x)));
        }
    }

    let (overlap_4b, coverage_margin) = diagnostics(&balls, &index, extent, dim, opts);
    if overlap_4b > opts.max_overlap {
        return Err(Error::Construction(format!(
            "overlap of dilated balls {overlap_4b} exceeds cap {}",
            opts.max_overlap
        )));
    }
    if coverage_margin < opts.min_margin {
        return Err(Error::Construction(format!(
            "coverage margin {coverage_margin:.4} below required {}",
            opts.min_margin
        )));
    }
    let cov = AdmissibleCovering {
        dim,
        scale: 1.0,
        extent,
        balls: balls.clone(),
        overlap_4b,
        coverage_margin,
    };
    Ok((cov, PartitionOfUnity::from_balls(balls, opts.profile)))
}

fn diagnostics(
    balls: &[Ball],
    index: &CenterIndex,
    extent: f64,
    dim: usize,
    opts: &CoveringOptions,
) -> (usize, f64) {
    let step = maximal_radius(extent * (dim as f64).sqrt()) / opts.check_density;
    let per_axis = (2.0 * extent / step).ceil() as usize + 1;
    let h = 2.0 * extent / (per_axis - 1) as f64;
    let total = per_axis.pow(dim as u32);
    let mut overlap = 0usize;
    let mut margin = f64::INFINITY;
    let mut x = vec![0.0; dim];
    for code in 0..total {
        let mut c = code;
        for v in x.iter_mut() {
            *v = -extent + (c % per_axis) as f64 * h;
            c /= per_axis;
        }
        let near = index.near(&x, 4);
        let mut count = 0;
        let mut best = f64::NEG_INFINITY;
        for i in near {
            let b = &balls[i];
            let d = dist(&b.center.0, &x);
            if d <= 4.0 * b.radius {
                count += 1;
            }
            best = best.max(1.0 - d / b.radius);
        }
        overlap = overlap.max(count);
        margin = margin.min(best);
    }
    (overlap, margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_admissible;

    #[test]
    fn first_interval_is_zero_to_sqrt_two() {
        let (cov, _) = covering_1d(3.0).unwrap();
        // indices: 0 ↔ k = −9, so k = 1 sits at position 10
        let b = &cov.balls[10];
        let lo = b.center.0[0] - b.radius;
        let hi = b.center.0[0] + b.radius;
        assert!(lo.abs() < 1e-15);
        assert!((hi - 2f64.sqrt()).abs() < 1e-15);
        let i0 = &cov.balls[9];
        assert_eq!((i0.center.0[0], i0.radius), (0.0, 1.0));
    }

    #[test]
    fn every_point_in_at_most_two_intervals() {
        let (cov, _) = covering_1d(5.0).unwrap();
        for i in 0..20_000 {
            let x = -5.0 + 10.0 * (i as f64 + 0.37) / 20_000.0;
            let count = cov
                .balls
                .iter()
                .filter(|b| (x - b.center.0[0]).abs() < b.radius)
                .count();
            assert!((1..=2).contains(&count), "x={x} in {count} intervals");
        }
    }

    #[test]
    fn interval_lengths_scale_like_admissible_radius() {
        // |I_j| (1 + |c_{I_j}|) bounded above and below for j <= 400
        let (cov, _) = covering_1d(20.0).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for b in &cov.balls[1..cov.balls.len() - 1] {
            let v = 2.0 * b.radius * (1.0 + b.center.norm());
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(lo > 0.9 && hi < 4.1, "band [{lo}, {hi}]");
        assert!(cov.balls.iter().all(|b| is_admissible(b, 1.0)));
    }

    #[test]
    fn covering_nd_half_balls_disjoint_and_admissible() {
        let (cov, _) = covering_nd(3.0, 2, &CoveringOptions::default()).unwrap();
        for (i, a) in cov.balls.iter().enumerate() {
            assert!((a.radius - maximal_radius(a.center.norm())).abs() < 1e-15);
            for b in &cov.balls[i + 1..] {
                assert!(a.center.dist(&b.center) > 0.5 * (a.radius + b.radius));
            }
        }
        assert!(cov.coverage_margin >= 0.05);
    }

    #[test]
    fn covering_nd_covers_dense_grid_in_2d() {
        let (cov, _) = covering_nd(5.0, 2, &CoveringOptions::default()).unwrap();
        let m = 201;
        for i in 0..m {
            for j in 0..m {
                let x = [-5.0 + 10.0 * i as f64 / (m - 1) as f64, -5.0 + 10.0 * j as f64 / (m - 1) as f64];
                assert!(cov.balls.iter().any(|b| b.contains(&x)), "{x:?} uncovered");
            }
        }
    }

    #[test]
    fn covering_nd_in_1d_grows_like_extent_squared() {
        let count = |e: f64| covering_nd(e, 1, &CoveringOptions::default()).unwrap().0.balls.len();
        let ratio = count(8.0) as f64 / count(4.0) as f64;
        // ~ e² growth: doubling the extent roughly quadruples the count
        assert!((2.5..6.0).contains(&ratio), "ratio {ratio}");
        let c1 = covering_1d(8.0).unwrap().0.balls.len() as f64;
        let ratio_1d = count(8.0) as f64 / c1;
        assert!((0.3..3.0).contains(&ratio_1d), "nd/1d count ratio {ratio_1d}");
    }

    #[test]
    fn covering_nd_rejects_large_dimension() {
        assert!(covering_nd(2.0, 4, &CoveringOptions::default()).is_err());
    }
}
