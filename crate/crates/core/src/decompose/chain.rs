//! Chains of maximal admissible balls from the unit ball out to a target
//! ball.

use serde::Serialize;

use super::cz::Local;
use super::scale_for;
use crate::atoms::{AtomicDecomposition, GaussianAtom};
use crate::error::{invalid, Result};
use crate::func_repr::{BoxSumFunctionND, Func, StepFunction1D};
use crate::geometry::{is_admissible, maximal_radius, Ball};
use crate::measure::{box_gauss_measure, AxisBox, Point};

/// ρ_0 = 0, ρ_1 = 1 and ρ_j − 1/ρ_j = ρ_{j−1}, up to the first ball
/// B(ρ_j, min(1, 1/ρ_j)) that contains `c_norm`. Returns (radii, N) with
/// N − 1 the index of that ball.
pub fn build_chain_radii(c_norm: f64) -> (Vec<f64>, usize) {
    let mut rho = vec![0.0];
    loop {
        let j = rho.len() - 1;
        let r = rho[j];
        if (c_norm - r).abs() <= maximal_radius(r) {
            return (rho, j + 1);
        }
        let next = if j == 0 { 1.0 } else { 0.5 * (r + (r * r + 4.0).sqrt()) };
        rho.push(next);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainSpec {
    pub target: Ball,
    /// ρ_0..ρ_{N−1}.
    pub radii: Vec<f64>,
    /// B̃_0..B̃_N; the last one is the target.
    pub links: Vec<Ball>,
    /// B_1..B_N, B_j ⊂ B̃_{j−1} ∩ B̃_j.
    pub inner: Vec<Ball>,
    pub n: usize,
    /// min_j γ(B_j)/γ(B̃_j).
    pub mass_ratio: f64,
}

impl ChainSpec {
    pub fn new(target: &Ball) -> Result<ChainSpec> {
        if !is_admissible(target, 1.0 + 1e-12) {
            return invalid("chain target must be admissible at scale 1");
        }
        let dim = target.dim();
        let c_norm = target.center.norm();
        let dir: Vec<f64> = if c_norm > 0.0 {
            target.center.0.iter().map(|v| v / c_norm).collect()
        } else {
            let mut e = vec![0.0; dim];
            e[0] = 1.0;
            e
        };
        let along = |t: f64| Point(dir.iter().map(|d| d * t).collect());
        let (radii, n) = build_chain_radii(c_norm);
        let mut links: Vec<Ball> = radii.iter().map(|&r| Ball { center: along(r), radius: maximal_radius(r) }).collect();
        links.push(target.clone());
        // each B_j has for diameter the overlap of the two links on the axis
        let axial = |b: &Ball| {
            let t: f64 = b.center.0.iter().zip(&dir).map(|(x, d)| x * d).sum();
            (t - b.radius, t + b.radius)
        };
        let mut inner = Vec::with_capacity(n);
        let mut mass_ratio = f64::INFINITY;
        for j in 1..=n {
            let (a0, b0) = axial(&links[j - 1]);
            let (a1, b1) = axial(&links[j]);
            let (lo, hi) = (a0.max(a1), b0.min(b1));
            if hi <= lo {
                return invalid("consecutive chain balls do not overlap");
            }
            let b = Ball { center: along(0.5 * (lo + hi)), radius: 0.5 * (hi - lo) };
            let ratio = inscribed_mass(&b) / crate::measure::ball_gauss_measure(&links[j])?;
            mass_ratio = mass_ratio.min(ratio);
            inner.push(b);
        }
        Ok(ChainSpec { target: target.clone(), radii, links, inner, n, mass_ratio })
    }
}

/// Cube inscribed in the ball.
fn inscribed_cube(b: &Ball) -> AxisBox {
    let h = b.radius / (b.dim() as f64).sqrt();
    AxisBox::cube(&b.center.0, h)
}

fn inscribed_mass(b: &Ball) -> f64 {
    box_gauss_measure(&inscribed_cube(b))
}

/// γ-normalized indicator of the cube inscribed in the ball.
pub fn normalized_indicator(b: &Ball) -> Result<Func> {
    let q = inscribed_cube(b);
    let m = box_gauss_measure(&q);
    if !(m > 0.0) {
        return invalid("ball has no γ-mass in floating point");
    }
    Ok(if b.dim() == 1 {
        Func::Step(StepFunction1D::indicator(q.lo[0], q.hi[0], 1.0 / m))
    } else {
        Func::BoxSum(BoxSumFunctionND::new(b.dim(), vec![(q, 1.0 / m)])?)
    })
}

/// φ₀: normalized indicator of the cube inscribed in B(0, 1).
pub fn phi_zero(dim: usize) -> Result<Func> {
    normalized_indicator(&Ball { center: Point::origin(dim), radius: 1.0 })
}

fn box_inside_ball(b: &AxisBox, ball: &Ball) -> bool {
    let far: f64 = (0..b.dim())
        .map(|d| {
            let c = ball.center.0[d];
            (b.lo[d] - c).abs().max((b.hi[d] - c).abs())
        })
        .map(|v| v * v)
        .sum();
    far.sqrt() <= ball.radius * (1.0 + 1e-12)
}

/// Decompose g − (∫g dγ)·φ₀ into atoms along the chain from the unit ball
/// to `ball`: the pieces (∫g dγ)(φ_j − φ_{j−1}) live in B̃_{j−1}, and
/// g − (∫g dγ)φ_N lives in the target.
pub fn chain_decompose(g: &Func, ball: &Ball) -> Result<(ChainSpec, AtomicDecomposition)> {
    let dim = ball.dim();
    if g.dim() != dim {
        return invalid("function and ball dimensions differ");
    }
    let outside = g.to_boxsum().cells().nonzero_cells().into_iter().any(|(b, _)| !box_inside_ball(&b, ball));
    if outside {
        return invalid("g is not supported in the ball");
    }
    let spec = ChainSpec::new(ball)?;
    let total = g.integrate_gauss();
    let phi0 = phi_zero(dim)?;
    let target = g.add(&phi0.scale(-total))?;
    let window = AxisBox::cube(&vec![0.0; dim], ball.center.norm() + ball.radius + 1.0);
    let mut out = AtomicDecomposition::new(target, window);
    let mut prev = phi0;
    for j in 1..=spec.n {
        let phi = normalized_indicator(&spec.inner[j - 1])?;
        if total != 0.0 {
            let diff = phi.add(&prev.scale(-1.0))?;
            let support = &spec.links[j - 1];
            push_normalized(&mut out, diff.scale(total), support)?;
        }
        prev = phi;
    }
    let last = g.add(&prev.scale(-total))?;
    push_normalized(&mut out, last, ball)?;
    Ok((spec, out))
}

fn push_normalized(out: &mut AtomicDecomposition, f: Func, ball: &Ball) -> Result<()> {
    let f = simplify(f)?;
    let (coeff, atom) = GaussianAtom::from_bounded(f, ball.clone(), scale_for(ball))?;
    out.push(coeff, atom);
    Ok(())
}

/// Merge overlapping boxes into disjoint cells.
fn simplify(f: Func) -> Result<Func> {
    match f {
        Func::Step(s) => Ok(Func::Step(s.canonical())),
        other => {
            let region = match other.support() {
                Some(b) => b,
                None => return Ok(other),
            };
            Local::from_func(&other, &region).to_func()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{atomic_norm, validate_gaussian_atom};
    use crate::geometry::maximal_admissible_ball;

    #[test]
    fn golden_ratio_and_small_chains() {
        let (rho, n) = build_chain_radii(100.0);
        assert!((rho[2] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(n as f64 <= 100.0f64.powi(2) + 1.0);
        assert_eq!(build_chain_radii(0.0).1, 1);
        assert_eq!(build_chain_radii(3.0).1, 6);
        for w in rho.windows(2).skip(1) {
            assert!((w[1] - 1.0 / w[1] - w[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_balls_sit_in_both_links() {
        for c in [0.0, 0.7, 2.0, 3.0, 6.5] {
            let spec = ChainSpec::new(&maximal_admissible_ball(Point(vec![c, 0.0]))).unwrap();
            for j in 1..=spec.n {
                assert!(spec.links[j - 1].contains_ball(&spec.inner[j - 1]), "c={c} j={j}");
                assert!(spec.links[j].contains_ball(&spec.inner[j - 1]), "c={c} j={j}");
            }
            assert!(spec.mass_ratio > 0.0);
        }
    }

    #[test]
    fn centred_ball_gives_one_term() {
        let b = maximal_admissible_ball(Point(vec![0.0]));
        let g = Func::Step(StepFunction1D::indicator(-0.5, 0.25, 2.0));
        let (spec, d) = chain_decompose(&g, &b).unwrap();
        assert_eq!(spec.n, 1);
        assert_eq!(d.terms.len(), 1);
    }

    #[test]
    fn indicator_far_out_reconstructs() {
        let b = maximal_admissible_ball(Point(vec![2.0]));
        let g = Func::Step(StepFunction1D::indicator(1.5, 2.5, 1.0));
        let (_, d) = chain_decompose(&g, &b).unwrap();
        let err = d.reconstruction_error(10_000, None);
        assert!(err.max_abs < 1e-9, "{err:?}");
        for t in &d.terms {
            assert!(validate_gaussian_atom(&t.atom).valid);
        }
        let mass = crate::measure::ball_gauss_measure(&b).unwrap();
        assert!(atomic_norm(&d).unwrap() <= 20.0 * 5.0 * mass);
        assert!(d.target.integrate_gauss().abs() < 1e-15);
        assert!(chain_decompose(&Func::Step(StepFunction1D::indicator(1.0, 2.5, 1.0)), &b).is_err());
    }
}
