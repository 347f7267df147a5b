//! Constructive atomic decompositions.
//!
//! A function f is split as f = c·1 + Σ_Q (f − b_Q)1_Q + Σ_Q b_Q 1_Q over a
//! partition of a window into boxes Q, each inside an admissible ball.
//! The local parts are split further by [`cz::cz_split`] with respect to
//! γ. The tail Σ β_Q 1_Q/γ(Q), β_Q = b_Q γ(Q), is summed by parts along a
//! tree on the partition whose edges join adjacent boxes.

pub mod chain;
pub mod cz;
mod partition;

use rayon::prelude::*;
use serde::Serialize;

pub use chain::{build_chain_radii, chain_decompose, ChainSpec};
pub use cz::{CzOptions, Weight};

use crate::atoms::{validate_gaussian_atom, AtomicDecomposition, GaussianAtom, LebesgueAtom};
use crate::error::{invalid, Error, Result};
use crate::func_repr::{BoxSumFunctionND, Func, StepFunction1D};
use crate::functionals::global_condition_report;
use crate::geometry::Ball;
use crate::measure::{ball_lebesgue_measure, AxisBox, CLIP};
use cz::{circumscribed_ball, cz_split, Local};
use partition::TreePartition;

/// Beyond this radius γ-masses of unit cells are subnormal or zero.
pub const MAX_WINDOW_1D: f64 = 26.0;

/// Smallest power of two s ≥ 1 at which the ball is admissible.
pub fn scale_for(ball: &Ball) -> f64 {
    let s = ball.admissibility_scale() * (1.0 - 1e-12);
    let mut k = 1.0;
    while k < s {
        k *= 2.0;
    }
    k
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    /// Subdivision depth cap of the stopping-time search.
    pub max_depth: usize,
    /// Refuse when the truncated global functional is flagged divergent.
    pub refuse_divergent: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { max_depth: 48, refuse_divergent: true }
    }
}

/// Counts reported next to a decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DecomposeStats {
    pub partition_cells: usize,
    pub local_atoms: usize,
    pub tail_atoms: usize,
    pub exceptional: f64,
    pub max_scale: f64,
    /// |Σ β_Q| left at the tree root (rounding only).
    pub root_defect: f64,
    /// ‖f − Σλa‖ in L¹(γ): the part of f outside the window.
    pub residual_l1: f64,
}

/// Lebesgue atomic decomposition of a mean-zero step function supported
/// in the interval `ball`.
pub fn cz_lebesgue_1d(g: &StepFunction1D, ball: &Ball) -> Result<Vec<(f64, LebesgueAtom)>> {
    if ball.dim() != 1 {
        return invalid("cz_lebesgue_1d works on intervals");
    }
    let (c, r) = (ball.center.0[0], ball.radius);
    let region = AxisBox { lo: vec![c - r], hi: vec![c + r] };
    if let Some((a, b)) = g.support() {
        if a < c - r - 1e-12 * r || b > c + r + 1e-12 * r {
            return invalid("g is not supported in the interval");
        }
    }
    let total = g.integrate_lebesgue();
    if total.abs() > 1e-12 * g.l1_lebesgue().max(f64::MIN_POSITIVE) {
        return invalid(format!("g must have integral zero, got {total:e}"));
    }
    let local = Local::from_func(&Func::Step(g.clone()), &region);
    let pieces = cz_split(&local, CzOptions { weight: Weight::Lebesgue, max_depth: 48 });
    let mut out = Vec::with_capacity(pieces.len());
    for p in pieces {
        let f = p.payload.to_func()?;
        let ball = circumscribed_ball(&p.region);
        let coeff = f.sup_norm() * ball_lebesgue_measure(&ball);
        out.push((coeff, LebesgueAtom { payload: f.scale(1.0 / coeff), ball }));
    }
    Ok(out)
}

/// Pieces of a local part as Gaussian atoms on circumscribed balls.
fn local_atoms(g: &Local, max_depth: usize) -> Result<Vec<(f64, GaussianAtom)>> {
    let pieces = cz_split(g, CzOptions { weight: Weight::Gauss, max_depth });
    pieces
        .into_iter()
        .map(|p| {
            let ball = circumscribed_ball(&p.region);
            let scale = scale_for(&ball);
            GaussianAtom::from_bounded(p.payload.to_func()?, ball, scale)
        })
        .collect()
}

/// Rewrite a Gaussian (1, r)-atom as a combination of (1, ∞)-atoms.
pub fn gaussian_atom_expand(a: &GaussianAtom) -> Result<AtomicDecomposition> {
    let report = validate_gaussian_atom(a);
    if !report.valid {
        return invalid("input is not a valid Gaussian atom");
    }
    let Some(ball) = &a.ball else {
        let mut d = AtomicDecomposition::new(a.payload.clone(), AxisBox::cube(&vec![0.0; a.dim()], CLIP));
        d.push(1.0, a.clone());
        return Ok(d);
    };
    let region = AxisBox::cube(&ball.center.0, ball.radius);
    let mut d = AtomicDecomposition::new(a.payload.clone(), region.clone());
    if a.exponent.is_infinite() {
        d.push(1.0, a.clone());
        return Ok(d);
    }
    let local = Local::from_func(&a.payload, &region);
    for (c, atom) in local_atoms(&local, DecomposeOptions::default().max_depth)? {
        d.push(c, atom);
    }
    Ok(d)
}

/// Value of f far out, if f is constant beyond `MAX_WINDOW_1D`.
fn value_at_infinity(f: &Func) -> Result<f64> {
    let n = f.dim();
    let probe = 0.5 * (CLIP + MAX_WINDOW_1D);
    let mut v = None;
    for mask in 0..(1usize << n) {
        let x: Vec<f64> = (0..n).map(|d| if mask >> d & 1 == 1 { probe } else { -probe }).collect();
        let y = f.eval(&x);
        match v {
            None => v = Some(y),
            Some(w) if w != y => return invalid("f is not constant far from the origin"),
            _ => {}
        }
    }
    Ok(v.unwrap_or(0.0))
}

/// Largest |x_d| over the nonzero cells.
fn support_extent(f: &Func) -> f64 {
    f.to_boxsum()
        .cells()
        .nonzero_cells()
        .iter()
        .flat_map(|(b, _)| b.lo.iter().chain(&b.hi).map(|v| v.abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

fn refuse_if_divergent(f: &Func) -> Result<()> {
    let report = global_condition_report(f)?;
    if let Some(d) = &report.e_diagnostics {
        if d.divergent {
            return Err(Error::NotInHardySpace(format!(
                "E grows by {:.1}% at the last doubling (truncations {:?})",
                100.0 * d.last_growth,
                d.values
            )));
        }
    }
    if f.dim() > 1 && report.e_plus_diagnostics.divergent {
        return Err(Error::NotInHardySpace(format!(
            "E+ grows by {:.1}% at the last doubling",
            100.0 * report.e_plus_diagnostics.last_growth
        )));
    }
    Ok(())
}

/// The decomposition of a one-dimensional step function along the
/// intervals between the nodes sign(k)√|k|.
pub fn decompose_h1_gamma_1d(f: &StepFunction1D, opts: &DecomposeOptions) -> Result<(AtomicDecomposition, DecomposeStats)> {
    let func = Func::Step(f.clone());
    if opts.refuse_divergent {
        refuse_if_divergent(&func)?;
    }
    let far = value_at_infinity(&func)?;
    let rest = Func::Step(f.sub(&StepFunction1D::constant(far)).canonical());
    let s = support_extent(&rest);
    if s > MAX_WINDOW_1D {
        return invalid(format!("support reaches {s}, beyond the representable window ±{MAX_WINDOW_1D}"));
    }
    let extent = (s + 2.0).clamp(6.0, MAX_WINDOW_1D);
    let tree = TreePartition::intervals(extent)?;
    run(&func, &rest, far, tree, opts)
}

/// Dispatches to the one-dimensional construction when `f` lives on the line.
pub fn decompose(f: &Func, opts: &DecomposeOptions) -> Result<(AtomicDecomposition, DecomposeStats)> {
    match f {
        Func::Step(s) => decompose_h1_gamma_1d(s, opts),
        other if other.dim() == 1 => {
            let form = other.to_boxsum().cells();
            let s = StepFunction1D::new(form.axes[0].clone(), form.values)?;
            decompose_h1_gamma_1d(&s, opts)
        }
        other => decompose_nd(other, opts),
    }
}

/// The decomposition in dimensions 1..=3 over a dyadic partition into
/// cubes whose circumscribed balls are admissible.
pub fn decompose_nd(f: &Func, opts: &DecomposeOptions) -> Result<(AtomicDecomposition, DecomposeStats)> {
    let n = f.dim();
    if !(1..=3).contains(&n) {
        return invalid(format!("decompose_nd supports n <= 3, got {n}"));
    }
    if opts.refuse_divergent {
        refuse_if_divergent(f)?;
    }
    let far = value_at_infinity(f)?;
    let rest = f.add(&Func::constant(n, -far))?;
    let s = support_extent(&rest);
    // keeps products of per-axis masses normal and the cell count modest
    let limit = match n {
        1 => 16.0,
        2 => 16.0,
        _ => 8.0,
    };
    // γ outside the window: about 1e−29 for n = 2, 5e−8 for n = 3
    let mut extent = if n == 3 { 4.0 } else { 8.0 };
    while extent < s + 1.0 {
        extent *= 2.0;
    }
    if extent > limit {
        return invalid(format!("support reaches {s}; the window is capped at ±{limit} in dimension {n}"));
    }
    let tree = TreePartition::dyadic(n, extent)?;
    run(f, &rest, far, tree, opts)
}

fn run(
    target: &Func,
    rest: &Func,
    far: f64,
    tree: TreePartition,
    opts: &DecomposeOptions,
) -> Result<(AtomicDecomposition, DecomposeStats)> {
    let n = target.dim();
    let cells = &tree.cells;
    let masses: Vec<f64> = cells.iter().map(|c| Weight::Gauss.boxed(c)).collect();
    if masses.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::Construction("a partition cell has no γ-mass".into()));
    }
    // β_Q for f, local parts and their splitting, in parallel
    let locals: Vec<(f64, Vec<(f64, GaussianAtom)>)> = cells
        .par_iter()
        .zip(masses.par_iter())
        .map(|(c, &m)| {
            let local = Local::from_func(rest, c);
            let beta = local_integral(&local);
            let atoms = if local.values.iter().all(|v| *v == local.values[0]) {
                Vec::new()
            } else {
                local_atoms(&local.shifted(beta / m), opts.max_depth)?
            };
            Ok((beta, atoms))
        })
        .collect::<Result<Vec<_>>>()?;
    let total_mass: f64 = masses.iter().sum();
    let total_beta: f64 = locals.iter().map(|(b, _)| b).sum();
    let c = total_beta / total_mass;
    let window = tree.window.clone();
    let mut d = AtomicDecomposition::new(target.clone(), window.clone());
    if far + c != 0.0 {
        d.push(far + c, GaussianAtom::exceptional(n));
    }
    // outside the window f = far while the sum above gives far + c
    let outside = window_complement_mass(&window);
    if c != 0.0 {
        d.residual = Some(outside_window(&window, -c)?);
    }
    let mut local_count = 0;
    let mut max_scale: f64 = 0.0;
    for (_, atoms) in &locals {
        for (coeff, atom) in atoms {
            max_scale = max_scale.max(atom.scale);
            local_count += 1;
            d.push(*coeff, atom.clone());
        }
    }
    let beta: Vec<f64> = locals.iter().zip(&masses).map(|((b, _), m)| b - c * m).collect();
    let (tail, root_defect) = tree.sum_by_parts(&beta, &masses)?;
    let tail_count = tail.len();
    for (coeff, atom) in tail {
        max_scale = max_scale.max(atom.scale);
        d.push(coeff, atom);
    }
    let stats = DecomposeStats {
        partition_cells: cells.len(),
        local_atoms: local_count,
        tail_atoms: tail_count,
        exceptional: far + c,
        max_scale,
        root_defect,
        residual_l1: c.abs() * outside,
    };
    Ok((d, stats))
}

/// γ(ℝⁿ ∖ W) without cancellation.
fn window_complement_mass(w: &AxisBox) -> f64 {
    let log_inside: f64 = (0..w.dim())
        .map(|d| {
            let (a, b) = (w.lo[d], w.hi[d]);
            let out = 0.5 * (crate::special::erfc(b) + crate::special::erfc(-a));
            (-out).ln_1p()
        })
        .sum();
    -log_inside.exp_m1()
}

/// v on the clip cube minus the window.
fn outside_window(w: &AxisBox, v: f64) -> Result<Func> {
    let n = w.dim();
    if n == 1 {
        let s = StepFunction1D::new(vec![-CLIP, w.lo[0], w.hi[0], CLIP], vec![v, 0.0, v])?;
        return Ok(Func::Step(s));
    }
    let clip = AxisBox::new(vec![-CLIP; n], vec![CLIP; n])?;
    Ok(Func::BoxSum(BoxSumFunctionND::new(n, vec![(clip, v), (w.clone(), -v)])?))
}

fn local_integral(g: &Local) -> f64 {
    let mut s = 0.0;
    let shape = g.shape();
    let mut k = 0;
    crate::func_repr::for_each_index(&shape, |idx| {
        let v = g.values[k];
        k += 1;
        if v != 0.0 {
            let m: f64 = (0..g.dim()).map(|d| Weight::Gauss.interval(g.axes[d][idx[d]], g.axes[d][idx[d] + 1])).product();
            s += v * m;
        }
    });
    s
}

#[cfg(test)]
mod tests;
