use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measure::{box_gauss_measure, interval_mass, interval_second_moment, AxisBox, CLIP};

use super::{for_each_index, StepFunction1D};

/// A finite sum Σ c_i 1_{box_i} on ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSumFunctionND {
    dim: usize,
    terms: Vec<(AxisBox, f64)>,
}

/// Disjoint cell form of a box sum: a rectilinear grid and one value per
/// cell (row-major, last axis fastest).
#[derive(Debug, Clone)]
pub struct CellForm {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl CellForm {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len().saturating_sub(1)).collect()
    }

    /// (box, value) for every cell with a nonzero value.
    pub fn nonzero_cells(&self) -> Vec<(AxisBox, f64)> {
        let mut out = Vec::new();
        let shape = self.shape();
        let mut k = 0;
        for_each_index(&shape, |idx| {
            let v = self.values[k];
            k += 1;
            if v != 0.0 {
                let lo = idx.iter().enumerate().map(|(d, &i)| self.axes[d][i]).collect();
                let hi = idx.iter().enumerate().map(|(d, &i)| self.axes[d][i + 1]).collect();
                out.push((AxisBox { lo, hi }, v));
            }
        });
        out
    }
}

impl BoxSumFunctionND {
    pub fn new(dim: usize, terms: Vec<(AxisBox, f64)>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        for (b, c) in &terms {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
            }
            if b.is_degenerate() {
                return invalid("boxes must have positive volume");
            }
            if !c.is_finite() {
                return invalid("box coefficients must be finite");
            }
            if b.lo.iter().chain(&b.hi).any(|v| v.abs() > CLIP) {
                return invalid(format!("boxes must lie in [-{CLIP}, {CLIP}]^n"));
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(BoxSumFunctionND { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        BoxSumFunctionND { dim, terms: Vec::new() }
    }

    /// The constant c on the clipped cube [−CLIP, CLIP]ⁿ.
    pub fn constant(dim: usize, c: f64) -> Self {
        let b = AxisBox { lo: vec![-CLIP; dim], hi: vec![CLIP; dim] };
        BoxSumFunctionND { dim, terms: if c == 0.0 { vec![] } else { vec![(b, c)] } }
    }

    pub fn from_step(f: &StepFunction1D) -> Self {
        let terms = f
            .cells()
            .filter(|(_, _, v)| *v != 0.0)
            .map(|(a, b, v)| (AxisBox { lo: vec![a], hi: vec![b] }, v))
            .collect();
        BoxSumFunctionND { dim: 1, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(AxisBox, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .filter(|(b, _)| contains_half_open(b, x))
            .map(|(_, c)| c)
            .sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero(self.dim);
        }
        BoxSumFunctionND {
            dim: self.dim,
            terms: self.terms.iter().map(|(b, v)| (b.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(BoxSumFunctionND { dim: self.dim, terms })
    }

    /// Bounding box of the union of the boxes.
    pub fn support(&self) -> Option<AxisBox> {
        let first = &self.terms.first()?.0;
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for (b, _) in &self.terms[1..] {
            for d in 0..self.dim {
                lo[d] = lo[d].min(b.lo[d]);
                hi[d] = hi[d].max(b.hi[d]);
            }
        }
        Some(AxisBox { lo, hi })
    }

    /// ∫ f dγ = Σ c_i γ(box_i).
    pub fn integrate_gauss(&self) -> f64 {
        self.terms.iter().map(|(b, c)| c * box_gauss_measure(b)).sum()
    }

    pub fn integrate_lebesgue(&self) -> f64 {
        self.terms.iter().map(|(b, c)| c * b.volume()).sum()
    }

    /// Coordinate-compressed disjoint cell form.
    pub fn cells(&self) -> CellForm {
        let mut axes: Vec<Vec<f64>> = vec![Vec::new(); self.dim];
        for (b, _) in &self.terms {
            for d in 0..self.dim {
                axes[d].push(b.lo[d]);
                axes[d].push(b.hi[d]);
            }
        }
        for a in axes.iter_mut() {
            a.sort_by(f64::total_cmp);
            a.dedup();
        }
        let shape: Vec<usize> = axes.iter().map(|a| a.len().saturating_sub(1)).collect();
        let total: usize = shape.iter().product();
        let mut values = vec![0.0; total];
        if total == 0 {
            return CellForm { axes, values };
        }
        let strides = strides(&shape);
        for (b, c) in &self.terms {
            let lo: Vec<usize> = (0..self.dim).map(|d| position(&axes[d], b.lo[d])).collect();
            let hi: Vec<usize> = (0..self.dim).map(|d| position(&axes[d], b.hi[d])).collect();
            let sub: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
            for_each_index(&sub, |idx| {
                let k: usize = idx.iter().zip(&lo).zip(&strides).map(|((i, l), s)| (i + l) * s).sum();
                values[k] += c;
            });
        }
        CellForm { axes, values }
    }

    fn fold_cells(&self, f: impl Fn(&[f64], &[f64], f64) -> f64) -> f64 {
        let form = self.cells();
        form.nonzero_cells().iter().map(|(b, v)| f(&b.lo, &b.hi, *v)).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.cells().values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ‖f‖_{L^p(γ)} for p in [1, ∞].
    pub fn lp_norm_gauss(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        let s = self.fold_cells(|lo, hi, v| v.abs().powf(p) * mass(lo, hi));
        s.powf(1.0 / p)
    }

    pub fn l1_lebesgue(&self) -> f64 {
        self.fold_cells(|lo, hi, v| v.abs() * lo.iter().zip(hi).map(|(a, b)| b - a).product::<f64>())
    }

    /// ∫ |x|² |f(x)| dγ(x).
    pub fn second_moment_abs(&self) -> f64 {
        self.fold_cells(|lo, hi, v| v.abs() * box_second_moment(lo, hi))
    }
}

fn mass(lo: &[f64], hi: &[f64]) -> f64 {
    lo.iter().zip(hi).map(|(&a, &b)| interval_mass(a, b)).product()
}

/// ∫_box |x|² dγ = Σ_d M2_d Π_{e≠d} M0_e.
pub(crate) fn box_second_moment(lo: &[f64], hi: &[f64]) -> f64 {
    let m0: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| interval_mass(a, b)).collect();
    (0..lo.len())
        .map(|d| {
            let others: f64 = (0..lo.len()).filter(|&e| e != d).map(|e| m0[e]).product();
            interval_second_moment(lo[d], hi[d]) * others
        })
        .sum()
}

/// Half-open membership, so that the cells of a partition never share points.
pub(crate) fn contains_half_open(b: &AxisBox, x: &[f64]) -> bool {
    b.lo.iter().zip(&b.hi).zip(x).all(|((a, c), v)| *a <= *v && *v < *c)
}

fn position(axis: &[f64], v: f64) -> usize {
    axis.partition_point(|&a| a < v)
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for d in (0..shape.len().saturating_sub(1)).rev() {
        s[d] = s[d + 1] * shape[d + 1];
    }
    s
}

/// Materialized product f·w on a uniform refinement of mesh <= h inside
/// `window`, with the sup-norm error bound Lip(w)·h·√n/2·‖f‖_∞.
pub fn sampled_weight_product_nd(
    f: &BoxSumFunctionND,
    weight: impl Fn(&[f64]) -> f64,
    lipschitz: f64,
    window: &AxisBox,
    h: f64,
) -> (BoxSumFunctionND, f64) {
    let form = f.cells();
    let mut terms = Vec::new();
    for (cell, v) in form.nonzero_cells() {
        let lo: Vec<f64> = cell.lo.iter().zip(&window.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = cell.hi.iter().zip(&window.hi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| b <= a) {
            continue;
        }
        let pieces: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| ((b - a) / h).ceil().max(1.0) as usize).collect();
        let steps: Vec<f64> = (0..lo.len()).map(|d| (hi[d] - lo[d]) / pieces[d] as f64).collect();
        for_each_index(&pieces, |idx| {
            let sub_lo: Vec<f64> = (0..lo.len()).map(|d| lo[d] + idx[d] as f64 * steps[d]).collect();
            let sub_hi: Vec<f64> = (0..lo.len())
                .map(|d| if idx[d] + 1 == pieces[d] { hi[d] } else { sub_lo[d] + steps[d] })
                .collect();
            let mid: Vec<f64> = sub_lo.iter().zip(&sub_hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let w = weight(&mid);
            if w != 0.0 {
                terms.push((AxisBox { lo: sub_lo, hi: sub_hi }, v * w));
            }
        });
    }
    let bound = lipschitz * h * 0.5 * (f.dim as f64).sqrt() * form.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (BoxSumFunctionND { dim: f.dim, terms }, bound)
}
