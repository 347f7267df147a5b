//! The global functionals E and E₊, mean-oscillation estimates over
//! admissible balls, and the γ-pairing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::random_admissible_interval;
use crate::error::{invalid, Result};
use crate::func_repr::{box_second_moment, Func, StepFunction1D};
use crate::geometry::{covering_1d, covering_nd, maximal_radius, Ball, CoveringOptions};
use crate::measure::{box_gauss_measure, interval_mass, interval_second_moment, AxisBox, Point, CLIP};
use crate::special::{gauss_legendre, FRAC_1_SQRT_PI};

/// Truncation extents 2^m, m = 2..=5.
pub const TRUNCATIONS: [f64; 4] = [4.0, 8.0, 16.0, 32.0];
/// Relative growth at the last doubling above which a series is called divergent.
pub const GROWTH_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesDiagnostics {
    pub extents: Vec<f64>,
    pub values: Vec<f64>,
    /// (v_last − v_prev) / v_prev; 0 when both vanish.
    pub last_growth: f64,
    pub divergent: bool,
}

impl SeriesDiagnostics {
    pub fn from_values(extents: &[f64], values: Vec<f64>) -> Self {
        let n = values.len();
        let last_growth = if n < 2 {
            0.0
        } else {
            relative_growth(values[n - 2], values[n - 1])
        };
        SeriesDiagnostics {
            extents: extents.to_vec(),
            values,
            last_growth,
            divergent: last_growth > GROWTH_THRESHOLD,
        }
    }
}

pub(crate) fn relative_growth(prev: f64, last: f64) -> f64 {
    let d = last - prev;
    if d.abs() <= 1e-14 * last.abs().max(prev.abs()) {
        0.0
    } else if prev == 0.0 {
        f64::INFINITY
    } else {
        d / prev.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalConditionReport {
    /// E(f); None outside one dimension.
    pub e_value: Option<f64>,
    pub e_plus_value: f64,
    pub e_diagnostics: Option<SeriesDiagnostics>,
    pub e_plus_diagnostics: SeriesDiagnostics,
    /// Bound on the part of E beyond the clip (zero for represented data).
    pub clipped_tail_bound: f64,
}

impl GlobalConditionReport {
    pub fn e_divergent(&self) -> bool {
        self.e_diagnostics.as_ref().is_some_and(|d| d.divergent)
    }

    pub fn e_plus_divergent(&self) -> bool {
        self.e_plus_diagnostics.divergent
    }
}

fn as_step(f: &Func) -> Result<StepFunction1D> {
    match f {
        Func::Step(s) => Ok(s.clone()),
        other if other.dim() == 1 => {
            let cells = other.to_boxsum().cells();
            let breaks = cells.axes[0].clone();
            if breaks.len() < 2 {
                return Ok(StepFunction1D::zero());
            }
            StepFunction1D::new(breaks, cells.values)
        }
        other => invalid(format!("E is defined in one dimension, got n = {}", other.dim())),
    }
}

/// ∫_p^q (y² − p²) γ₀(y) dy.
fn shifted_second_moment(p: f64, q: f64) -> f64 {
    if q <= p {
        return 0.0;
    }
    if (q - p) * (1.0 + p.abs().max(q.abs())) < 0.5 {
        static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
        let (x, w) = RULE.get_or_init(|| gauss_legendre(16));
        let (mid, half) = (0.5 * (p + q), 0.5 * (q - p));
        let s: f64 = x
            .iter()
            .zip(w)
            .map(|(t, w)| {
                let y = mid + half * t;
                w * (y - p) * (y + p) * (-y * y).exp()
            })
            .sum();
        return FRAC_1_SQRT_PI * half * s;
    }
    interval_second_moment(p, q) - p * p * interval_mass(p, q)
}

/// ∫_p^q x T(x) dx with T(x) = t_b + v·γ(x, b) on [p, q] ⊂ [a, b].
fn tail_moment(p: f64, q: f64, b: f64, t_b: f64, v: f64) -> f64 {
    let sq = 0.5 * (q * q - p * p);
    t_b * sq + v * (0.5 * shifted_second_moment(p, q) + sq * interval_mass(q, b))
}

/// ∫_0^L x |∫_x^∞ f dγ| dx, exact up to special-function error.
fn half_line_e(f: &StepFunction1D, extent: f64) -> f64 {
    let cells: Vec<(f64, f64, f64)> = f.canonical().cells().collect();
    if cells.is_empty() {
        return 0.0;
    }
    // T at the left end of every cell, from the right
    let mut t_right = vec![0.0; cells.len()];
    let mut acc = 0.0;
    for (i, &(a, b, v)) in cells.iter().enumerate().rev() {
        t_right[i] = acc;
        acc += v * interval_mass(a, b);
    }
    let t_first = acc;
    let mut total = 0.0;
    // constant part left of the support
    let first_lo = cells[0].0;
    if first_lo > 0.0 {
        let hi = first_lo.min(extent);
        total += t_first.abs() * 0.5 * hi * hi;
    }
    for (i, &(a, b, v)) in cells.iter().enumerate() {
        let (lo, hi) = (a.max(0.0), b.min(extent));
        if hi <= lo {
            continue;
        }
        let t_b = t_right[i];
        let t_at = |x: f64| t_b + v * interval_mass(x, b);
        let (t_lo, t_hi) = (t_at(lo), t_at(hi));
        if v == 0.0 || t_lo.signum() == t_hi.signum() || t_lo == 0.0 || t_hi == 0.0 {
            total += tail_moment(lo, hi, b, t_b, v).abs();
            continue;
        }
        // T is monotone on the cell: bisect for its zero
        let (mut l, mut r) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            if t_at(m).signum() == t_lo.signum() {
                l = m;
            } else {
                r = m;
            }
        }
        total += tail_moment(lo, l, b, t_b, v).abs() + tail_moment(l, hi, b, t_b, v).abs();
    }
    total
}

/// E restricted to 0 <= x <= extent.
pub fn e_truncated(f: &Func, extent: f64) -> Result<f64> {
    let s = as_step(f)?;
    Ok(half_line_e(&s, extent) + half_line_e(&s.reflect(), extent))
}

/// E₊ restricted to the cube [−L, L]ⁿ.
pub fn e_plus_truncated(f: &Func, extent: f64) -> f64 {
    let form = f.to_boxsum().cells();
    form.nonzero_cells()
        .iter()
        .map(|(b, v)| {
            let lo: Vec<f64> = b.lo.iter().map(|x| x.max(-extent)).collect();
            let hi: Vec<f64> = b.hi.iter().map(|x| x.min(extent)).collect();
            if lo.iter().zip(&hi).any(|(a, c)| c <= a) {
                0.0
            } else {
                v.abs() * box_second_moment(&lo, &hi)
            }
        })
        .sum()
}

/// E(f) = ∫_0^∞ x(|∫_x^∞ f dγ| + |∫_{−∞}^{−x} f dγ|) dx in one dimension.
pub fn e_global(f: &Func) -> Result<GlobalConditionReport> {
    let s = as_step(f)?;
    let fs = Func::Step(s.clone());
    let e = e_truncated(&fs, CLIP)?;
    let values = TRUNCATIONS.iter().map(|&l| e_truncated(&fs, l)).collect::<Result<Vec<_>>>()?;
    let mut report = e_plus_report(&fs);
    report.e_value = Some(e);
    report.e_diagnostics = Some(SeriesDiagnostics::from_values(&TRUNCATIONS, values));
    Ok(report)
}

fn e_plus_report(f: &Func) -> GlobalConditionReport {
    let values = TRUNCATIONS.iter().map(|&l| e_plus_truncated(f, l)).collect();
    GlobalConditionReport {
        e_value: None,
        e_plus_value: e_plus(f),
        e_diagnostics: None,
        e_plus_diagnostics: SeriesDiagnostics::from_values(&TRUNCATIONS, values),
        clipped_tail_bound: 0.0,
    }
}

/// E for n = 1 and E₊ in every dimension.
pub fn global_condition_report(f: &Func) -> Result<GlobalConditionReport> {
    if f.dim() == 1 {
        e_global(f)
    } else {
        Ok(e_plus_report(f))
    }
}

/// E₊(f) = ∫ |x|² |f| dγ.
pub fn e_plus(f: &Func) -> f64 {
    f.second_moment_abs()
}

/// Something whose mean oscillation can be measured.
pub enum Integrand<'a> {
    Represented(&'a Func),
    Closure { dim: usize, f: &'a (dyn Fn(&[f64]) -> f64 + Sync) },
}

impl Integrand<'_> {
    fn dim(&self) -> usize {
        match self {
            Integrand::Represented(f) => f.dim(),
            Integrand::Closure { dim, .. } => *dim,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Integrand::Represented(f) => f.eval(x),
            Integrand::Closure { f, .. } => f(x),
        }
    }
}

/// (1/γ(B)) ∫_B |f − f_B| dγ.
pub fn mean_oscillation(f: &Integrand, ball: &Ball) -> Result<f64> {
    if ball.dim() != f.dim() {
        return invalid("ball and function dimensions differ");
    }
    // quadrature nodes and γ-weights on the ball
    let (nodes, weights) = ball_quadrature(ball);
    let mass: f64 = weights.iter().sum();
    if !(mass > 0.0) {
        return invalid("ball has no γ-mass in floating point");
    }
    let vals: Vec<f64> = nodes.iter().map(|x| f.eval(x)).collect();
    let mean = vals.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / mass;
    Ok(vals.iter().zip(&weights).map(|(v, w)| (v - mean).abs() * w).sum::<f64>() / mass)
}

fn ball_quadrature(ball: &Ball) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = ball.dim();
    let (gx, gw) = gauss_legendre(8);
    let panels = if n == 1 { 64 } else if n == 2 { 24 } else { 8 };
    let c = &ball.center.0;
    let r = ball.radius;
    let h = 2.0 * r / panels as f64;
    let axis: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let mid = -r + (p as f64 + 0.5) * h;
            gx.iter().zip(&gw).map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w)).collect::<Vec<_>>()
        })
        .collect();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    crate::func_repr::for_each_index(&vec![axis.len(); n], |idx| {
        let off: Vec<f64> = idx.iter().map(|&i| axis[i].0).collect();
        if off.iter().map(|v| v * v).sum::<f64>() > r * r {
            return;
        }
        let x: Vec<f64> = off.iter().zip(c).map(|(o, c)| o + c).collect();
        let w: f64 = idx.iter().map(|&i| axis[i].1).product::<f64>() * crate::measure::density_at(&x);
        nodes.push(x);
        weights.push(w);
    });
    (nodes, weights)
}

/// Maximum mean oscillation over the sampled balls (a lower bound for the
/// supremum over all admissible balls).
pub fn bmo_seminorm_estimate(f: &Integrand, balls: &[Ball]) -> Result<f64> {
    if balls.is_empty() {
        return invalid("the ball sampler produced no balls");
    }
    let mut best = 0.0f64;
    for b in balls {
        best = best.max(mean_oscillation(f, b)?);
    }
    Ok(best)
}

/// ‖f‖_{L¹(γ)} plus the sampled oscillation supremum.
pub fn bmo_norm_estimate(f: &Func, balls: &[Ball]) -> Result<f64> {
    Ok(f.lp_norm_gauss(1.0) + bmo_seminorm_estimate(&Integrand::Represented(f), balls)?)
}

/// Covering balls over [−extent, extent]ⁿ plus `random` random maximal
/// admissible balls, seeded.
pub fn default_ball_sampler(dim: usize, extent: f64, random: usize, seed: u64) -> Result<Vec<Ball>> {
    let mut balls = if dim == 1 {
        covering_1d(extent)?.0.balls
    } else {
        covering_nd(extent, dim, &CoveringOptions::default())?.0.balls
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        if dim == 1 {
            balls.push(random_admissible_interval(&mut rng, extent));
        } else {
            use rand::Rng;
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-extent..=extent)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            balls.push(Ball::new(Point(c), maximal_radius(norm))?);
        }
    }
    Ok(balls)
}

/// ∫ f g dγ with g evaluated by Gauss–Legendre quadrature on panels of
/// width at most 1/8 in every cell.
pub fn pairing(f: &Func, g: &dyn Fn(&[f64]) -> f64) -> f64 {
    let (gx, gw) = gauss_legendre(6);
    let form = f.to_boxsum().cells();
    let mut total = 0.0;
    for (b, v) in form.nonzero_cells() {
        let n = b.dim();
        // per-axis nodes and weights; γ₀ underflows beyond 27
        let axes: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|d| {
                let (lo, hi) = (b.lo[d].max(-27.0), b.hi[d].min(27.0));
                if hi <= lo {
                    return Vec::new();
                }
                let panels = ((hi - lo) * 8.0).ceil().max(1.0) as usize;
                let h = (hi - lo) / panels as f64;
                (0..panels)
                    .flat_map(|p| {
                        let mid = lo + (p as f64 + 0.5) * h;
                        gx.iter().zip(&gw).map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
                    })
                    .collect()
            })
            .collect();
        if axes.iter().any(Vec::is_empty) {
            continue;
        }
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let mut acc = 0.0;
        crate::func_repr::for_each_index(&shape, |idx| {
            let x: Vec<f64> = (0..n).map(|d| axes[d][idx[d]].0).collect();
            let w: f64 = (0..n).map(|d| axes[d][idx[d]].1).product();
            acc += w * g(&x) * crate::measure::density_at(&x);
        });
        total += v * acc;
    }
    total
}

/// ∫ f · min(|x|², k) dγ, exact in 1D and by adaptive cell splitting in nD.
pub fn pairing_min_square(f: &Func, k: f64) -> f64 {
    let form = f.to_boxsum().cells();
    form.nonzero_cells().iter().map(|(b, v)| v * min_square_on_box(b, k, 0)).sum()
}

fn min_square_on_box(b: &AxisBox, k: f64, depth: usize) -> f64 {
    let n = b.dim();
    let near: f64 = (0..n).map(|d| if b.lo[d] > 0.0 { b.lo[d] } else if b.hi[d] < 0.0 { -b.hi[d] } else { 0.0 }).map(|v| v * v).sum();
    let far: f64 = (0..n).map(|d| b.lo[d].abs().max(b.hi[d].abs())).map(|v| v * v).sum();
    if far <= k {
        return box_second_moment(&b.lo, &b.hi);
    }
    if near >= k {
        return k * box_gauss_measure(b);
    }
    if n == 1 {
        let s = k.sqrt();
        let (lo, hi) = (b.lo[0], b.hi[0]);
        let inside = interval_second_moment(lo.max(-s), hi.min(s));
        let outside = interval_mass(lo, hi.min(-s)) + interval_mass(lo.max(s), hi);
        return inside + k * outside;
    }
    let widest = (0..n).map(|d| b.hi[d] - b.lo[d]).fold(0.0, f64::max);
    if widest <= 1.0 / 16.0 || depth >= 60 {
        // small box crossing the sphere: tensor Gauss–Legendre
        let (gx, gw) = gauss_legendre(8);
        let mut acc = 0.0;
        crate::func_repr::for_each_index(&vec![gx.len(); n], |idx| {
            let x: Vec<f64> =
                (0..n).map(|d| 0.5 * (b.lo[d] + b.hi[d]) + 0.5 * (b.hi[d] - b.lo[d]) * gx[idx[d]]).collect();
            let w: f64 = (0..n).map(|d| 0.5 * (b.hi[d] - b.lo[d]) * gw[idx[d]]).product();
            let r2: f64 = x.iter().map(|v| v * v).sum();
            acc += w * r2.min(k) * crate::measure::density_at(&x);
        });
        return acc;
    }
    let d = (0..n).max_by(|&i, &j| (b.hi[i] - b.lo[i]).total_cmp(&(b.hi[j] - b.lo[j]))).unwrap();
    let mid = 0.5 * (b.lo[d] + b.hi[d]);
    let mut left = b.clone();
    left.hi[d] = mid;
    let mut right = b.clone();
    right.lo[d] = mid;
    min_square_on_box(&left, k, depth + 1) + min_square_on_box(&right, k, depth + 1)
}
