//! Gaussian and Lebesgue atoms, their validators, and atomic decompositions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::func_repr::{for_each_index, Func};
use crate::geometry::{is_admissible, Ball};
use crate::measure::{ball_gauss_measure, ball_lebesgue_measure, AxisBox};

pub const MEAN_ZERO_TOL: f64 = 1e-10;
pub const SIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Exceptional,
    BallSupported,
}

/// A Gaussian (1, r)-atom. `exponent` is r in (1, ∞]; `scale` is the
/// admissibility scale the ball is claimed at.
#[derive(Debug, Clone)]
pub struct GaussianAtom {
    pub kind: AtomKind,
    pub payload: Func,
    pub ball: Option<Ball>,
    pub exponent: f64,
    pub scale: f64,
}

impl GaussianAtom {
    pub fn exceptional(dim: usize) -> Self {
        GaussianAtom {
            kind: AtomKind::Exceptional,
            payload: Func::constant(dim, 1.0),
            ball: None,
            exponent: f64::INFINITY,
            scale: 1.0,
        }
    }

    pub fn ball_supported(payload: Func, ball: Ball, exponent: f64, scale: f64) -> Self {
        GaussianAtom { kind: AtomKind::BallSupported, payload, ball: Some(ball), exponent, scale }
    }

    /// Normalize a mean-zero function supported in `ball` into an
    /// (1, ∞)-atom; returns (coefficient, atom) with g = coefficient · atom.
    pub fn from_bounded(g: Func, ball: Ball, scale: f64) -> Result<(f64, Self)> {
        let sup = g.sup_norm();
        let mass = ball_gauss_measure(&ball)?;
        if sup == 0.0 {
            return Ok((0.0, GaussianAtom::ball_supported(g, ball, f64::INFINITY, scale)));
        }
        let coeff = sup * mass;
        // two steps: sup * mass can be subnormal far out
        let atom = GaussianAtom::ball_supported(g.scale(1.0 / sup).scale(1.0 / mass), ball, f64::INFINITY, scale);
        Ok((coeff, atom))
    }

    pub fn dim(&self) -> usize {
        self.payload.dim()
    }
}

/// A Lebesgue (1, ∞)-atom.
#[derive(Debug, Clone)]
pub struct LebesgueAtom {
    pub payload: Func,
    pub ball: Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Positive when the condition holds with room to spare.
    pub slack: f64,
    /// Informational checks do not affect validity.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let valid = checks.iter().all(|c| c.passed || c.informational);
        ValidationReport { valid, checks }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Smallest slack among the conditions that count for validity.
    pub fn min_slack(&self) -> f64 {
        self.checks.iter().filter(|c| !c.informational).map(|c| c.slack).fold(f64::INFINITY, f64::min)
    }
}

fn check(name: &'static str, slack: f64, tol: f64) -> Check {
    Check { name, passed: slack >= -tol, slack, informational: false }
}

/// Largest distance from the ball centre to a point of the payload's
/// support, scaled by the radius (≤ 1 means contained).
fn support_ratio(payload: &Func, ball: &Ball) -> f64 {
    let c = &ball.center.0;
    let far = |b: &AxisBox| -> f64 {
        (0..b.dim())
            .map(|d| {
                let m = (b.lo[d] - c[d]).abs().max((b.hi[d] - c[d]).abs());
                m * m
            })
            .sum::<f64>()
            .sqrt()
    };
    let worst = match payload {
        Func::Step(f) => f
            .cells()
            .filter(|(_, _, v)| *v != 0.0)
            .map(|(a, b, _)| (a - c[0]).abs().max((b - c[0]).abs()))
            .fold(0.0, f64::max),
        Func::BoxSum(f) => f.terms().iter().map(|(b, _)| far(b)).fold(0.0, f64::max),
        Func::Grid(g) => {
            let mut m = 0.0f64;
            g.for_each_cell(|idx, v| {
                if v != 0.0 {
                    m = m.max(far(&g.lattice().cell_box(idx)));
                }
            });
            m
        }
    };
    worst / ball.radius
}

/// Relative support tolerance: payload breakpoints and ball endpoints are
/// computed separately and may differ in the last bits.
const SUPPORT_TOL: f64 = 1e-12;

pub fn validate_gaussian_atom(atom: &GaussianAtom) -> ValidationReport {
    let integral = atom.payload.integrate_gauss();
    match atom.kind {
        AtomKind::Exceptional => {
            let sup = atom.payload.sup_norm();
            ValidationReport::from_checks(vec![
                check("payload_is_one", 1e-12 - (integral - 1.0).abs().max((sup - 1.0).abs()), 0.0),
            ])
        }
        AtomKind::BallSupported => {
            let Some(ball) = &atom.ball else {
                return ValidationReport::from_checks(vec![check("ball_present", -1.0, 0.0)]);
            };
            let mut checks = vec![check("support", 1.0 - support_ratio(&atom.payload, ball), SUPPORT_TOL)];
            let own_scale = ball.admissibility_scale();
            checks.push(Check {
                name: "admissible_scale_1",
                passed: is_admissible(ball, 1.0 + 1e-12),
                slack: 1.0 - own_scale,
                informational: true,
            });
            checks.push(check("admissible_at_scale", (atom.scale - own_scale) / atom.scale, 1e-12));
            checks.push(check("mean_zero", MEAN_ZERO_TOL - integral.abs(), 0.0));
            let size_slack = match ball_gauss_measure(ball) {
                Ok(mass) if mass > 0.0 => {
                    let r = atom.exponent;
                    let norm = atom.payload.lp_norm_gauss(r);
                    // ‖a‖_r ≤ γ(B)^{1/r − 1}, compared in a form that avoids overflow
                    let bound_ln = if r.is_infinite() { -mass.ln() } else { (1.0 / r - 1.0) * mass.ln() };
                    if norm == 0.0 {
                        1.0
                    } else {
                        1.0 - (norm.ln() - bound_ln).exp()
                    }
                }
                _ => -1.0,
            };
            checks.push(check("size", size_slack, SIZE_TOL));
            ValidationReport::from_checks(checks)
        }
    }
}

pub fn validate_lebesgue_atom(atom: &LebesgueAtom) -> ValidationReport {
    let ball = &atom.ball;
    let integral = atom.payload.integrate_lebesgue();
    let vol = ball_lebesgue_measure(ball);
    ValidationReport::from_checks(vec![
        check("support", 1.0 - support_ratio(&atom.payload, ball), SUPPORT_TOL),
        check("mean_zero", MEAN_ZERO_TOL - integral.abs(), 0.0),
        check("size", 1.0 - atom.payload.sup_norm() * vol, SIZE_TOL),
    ])
}

#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: f64,
    pub atom: GaussianAtom,
}

/// target = Σ coeff · atom + residual.
#[derive(Debug, Clone)]
pub struct AtomicDecomposition {
    pub target: Func,
    pub terms: Vec<Term>,
    pub residual: Option<Func>,
    /// Region on which the reconstruction is claimed.
    pub window: AxisBox,
}

/// Summary of a reconstruction check on a point grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionError {
    pub points: usize,
    pub max_abs: f64,
    /// max_abs / max(1, ‖target‖_∞).
    pub max_rel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomRecord {
    pub coeff: f64,
    pub kind: AtomKind,
    pub ball: Option<Ball>,
    pub scale: f64,
    /// None encodes r = ∞.
    pub exponent: Option<f64>,
    pub payload_ref: String,
    pub payload_pieces: usize,
}

impl AtomicDecomposition {
    pub fn new(target: Func, window: AxisBox) -> Self {
        AtomicDecomposition { target, terms: Vec::new(), residual: None, window }
    }

    pub fn push(&mut self, coeff: f64, atom: GaussianAtom) {
        if coeff != 0.0 {
            self.terms.push(Term { coeff, atom });
        }
    }

    pub fn extend(&mut self, other: AtomicDecomposition) {
        self.terms.extend(other.terms);
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn exceptional_coefficient(&self) -> f64 {
        self.terms.iter().filter(|t| t.atom.kind == AtomKind::Exceptional).map(|t| t.coeff).sum()
    }

    /// Σ coeff · atom(x) + residual(x).
    pub fn reconstruct_at(&self, x: &[f64]) -> f64 {
        let s: f64 = self.terms.iter().map(|t| t.coeff * t.atom.payload.eval(x)).sum();
        s + self.residual.as_ref().map_or(0.0, |r| r.eval(x))
    }

    /// Compare target and reconstruction on a tensor grid of `per_axis`
    /// cell midpoints over `region` (default: the window).
    pub fn reconstruction_error(&self, per_axis: usize, region: Option<&AxisBox>) -> ReconstructionError {
        let region = region.unwrap_or(&self.window);
        let n = region.dim();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                let (a, b) = (region.lo[d], region.hi[d]);
                (0..per_axis).map(|i| a + (b - a) * (i as f64 + 0.5) / per_axis as f64).collect()
            })
            .collect();
        let shape = vec![per_axis; n];
        let total = per_axis.pow(n as u32);
        let mut recon = vec![0.0; total];
        let strides = crate::func_repr::strides(&shape);
        let add = |recon: &mut Vec<f64>, f: &Func, c: f64| {
            let Some(sup) = f.support() else { return };
            let ranges: Vec<(usize, usize)> = (0..n)
                .map(|d| {
                    let lo = axes[d].partition_point(|&v| v < sup.lo[d]);
                    let hi = axes[d].partition_point(|&v| v <= sup.hi[d]);
                    (lo, hi.max(lo))
                })
                .collect();
            let sub: Vec<usize> = ranges.iter().map(|(a, b)| b - a).collect();
            let mut x = vec![0.0; n];
            for_each_index(&sub, |idx| {
                let mut k = 0;
                for d in 0..n {
                    let i = ranges[d].0 + idx[d];
                    x[d] = axes[d][i];
                    k += i * strides[d];
                }
                recon[k] += c * f.eval(&x);
            });
        };
        for t in &self.terms {
            match t.atom.kind {
                AtomKind::Exceptional => {
                    recon.iter_mut().for_each(|v| *v += t.coeff);
                }
                AtomKind::BallSupported => add(&mut recon, &t.atom.payload, t.coeff),
            }
        }
        if let Some(r) = &self.residual {
            add(&mut recon, r, 1.0);
        }
        let mut max_abs = 0.0f64;
        let mut tmax = 0.0f64;
        let mut k = 0;
        let mut x = vec![0.0; n];
        for_each_index(&shape, |idx| {
            for d in 0..n {
                x[d] = axes[d][idx[d]];
            }
            let t = self.target.eval(&x);
            tmax = tmax.max(t.abs());
            max_abs = max_abs.max((t - recon[k]).abs());
            k += 1;
        });
        let scale = tmax.max(self.target.sup_norm()).max(1.0);
        ReconstructionError { points: total, max_abs, max_rel: max_abs / scale }
    }

    pub fn records(&self) -> Vec<AtomRecord> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| AtomRecord {
                coeff: t.coeff,
                kind: t.atom.kind,
                ball: t.atom.ball.clone(),
                scale: t.atom.scale,
                exponent: t.atom.exponent.is_finite().then_some(t.atom.exponent),
                payload_ref: format!("atom-{i}"),
                payload_pieces: t.atom.payload.pieces(),
            })
            .collect()
    }
}

/// Σ|λ_j| after validating every atom.
pub fn atomic_norm(d: &AtomicDecomposition) -> Result<f64> {
    for (i, t) in d.terms.iter().enumerate() {
        let report = validate_gaussian_atom(&t.atom);
        if !report.valid {
            let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed && !c.informational).map(|c| c.name).collect();
            return Err(Error::InvalidInput(format!("atom {i} is invalid: {}", failed.join(", "))));
        }
    }
    Ok(d.coefficient_sum())
}
