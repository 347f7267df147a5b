use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::{interval_mass, interval_second_moment, CLIP};

/// A piecewise constant function on ℝ: `values[i]` on `[breaks[i], breaks[i+1])`
/// and zero outside `[breaks[0], breaks[last])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction1D {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl Default for StepFunction1D {
    fn default() -> Self {
        Self::zero()
    }
}

impl StepFunction1D {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breaks.len() != values.len() + 1 {
            return invalid(format!(
                "step function needs one more breakpoint than values ({} vs {})",
                breaks.len(),
                values.len()
            ));
        }
        if breaks.iter().chain(&values).any(|v| !v.is_finite()) {
            return invalid("step function data must be finite");
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("breakpoints must be strictly increasing");
        }
        if breaks[0] < -CLIP || breaks[breaks.len() - 1] > CLIP {
            return invalid(format!("breakpoints must lie in [-{CLIP}, {CLIP}]"));
        }
        Ok(StepFunction1D { breaks, values })
    }

    pub fn zero() -> Self {
        StepFunction1D { breaks: Vec::new(), values: Vec::new() }
    }

    /// The constant c on the clipped line [−CLIP, CLIP].
    pub fn constant(c: f64) -> Self {
        Self::indicator(-CLIP, CLIP, c)
    }

    /// v · 1_{[a, b)}.
    pub fn indicator(a: f64, b: f64, v: f64) -> Self {
        let (a, b) = (a.max(-CLIP), b.min(CLIP));
        if b <= a || v == 0.0 {
            return Self::zero();
        }
        StepFunction1D { breaks: vec![a, b], values: vec![v] }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// (lo, hi, value) for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.breaks[i], self.breaks[i + 1], v))
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.breaks.is_empty() || x < self.breaks[0] || x >= self.breaks[self.breaks.len() - 1] {
            return 0.0;
        }
        let i = self.breaks.partition_point(|&b| b <= x) - 1;
        self.values[i]
    }

    /// Smallest closed interval outside of which the function vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.values.iter().position(|v| *v != 0.0)?;
        let last = self.values.iter().rposition(|v| *v != 0.0)?;
        Some((self.breaks[first], self.breaks[last + 1]))
    }

    /// Merge equal neighbouring cells and trim zero cells at both ends.
    pub fn canonical(&self) -> Self {
        let Some((lo, hi)) = self.support() else {
            return Self::zero();
        };
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.values.len());
        for (a, b, v) in self.cells() {
            if b <= lo || a >= hi {
                continue;
            }
            match values.last() {
                Some(&last) if last == v => {
                    *breaks.last_mut().unwrap() = b;
                }
                _ => {
                    if breaks.is_empty() {
                        breaks.push(a);
                    }
                    values.push(v);
                    breaks.push(b);
                }
            }
        }
        StepFunction1D { breaks, values }
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        StepFunction1D {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Linear combination `a·self + b·other`, exact on the merged breakpoints.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Self {
        let breaks = merge_breaks(&self.breaks, &other.breaks);
        if breaks.len() < 2 {
            return Self::zero();
        }
        let values = breaks
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                a * self.eval(m) + b * other.eval(m)
            })
            .collect();
        StepFunction1D { breaks, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpby(1.0, other, -1.0)
    }

    /// Pointwise map of the cell values; `f(0)` must be 0.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        StepFunction1D { breaks: self.breaks.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Product with another step function.
    pub fn mul(&self, other: &Self) -> Self {
        let breaks = merge_breaks(&self.breaks, &other.breaks);
        if breaks.len() < 2 {
            return Self::zero();
        }
        let values = breaks
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                self.eval(m) * other.eval(m)
            })
            .collect();
        StepFunction1D { breaks, values }
    }

    /// Restriction to [lo, hi).
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        self.mul(&Self::indicator(lo, hi, 1.0))
    }

    /// x ↦ f(−x).
    pub fn reflect(&self) -> Self {
        let breaks = self.breaks.iter().rev().map(|b| -b).collect();
        let values = self.values.iter().rev().copied().collect();
        StepFunction1D { breaks, values }
    }

    /// Insert the given points as breakpoints (values unchanged).
    pub fn refine_at(&self, points: &[f64]) -> Self {
        let Some((&lo, &hi)) = self.breaks.first().zip(self.breaks.last()) else {
            return Self::zero();
        };
        let mut pts: Vec<f64> = points.iter().copied().filter(|p| *p > lo && *p < hi).collect();
        pts.sort_by(f64::total_cmp);
        let breaks = merge_breaks(&self.breaks, &pts);
        let values = breaks.windows(2).map(|w| self.eval(0.5 * (w[0] + w[1]))).collect();
        StepFunction1D { breaks, values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ∫ f dγ, exact up to the error-function evaluations.
    pub fn integrate_gauss(&self) -> f64 {
        self.cells().map(|(a, b, v)| if v == 0.0 { 0.0 } else { v * interval_mass(a, b) }).sum()
    }

    pub fn integrate_lebesgue(&self) -> f64 {
        self.cells().map(|(a, b, v)| v * (b - a)).sum()
    }

    /// ‖f‖_{L^p(γ)} for p in [1, ∞]; p = ∞ is the essential sup.
    pub fn lp_norm_gauss(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self
                .cells()
                .filter(|(a, b, _)| interval_mass(*a, *b) > 0.0)
                .fold(0.0, |m, (_, _, v)| m.max(v.abs()));
        }
        let s: f64 = self
            .cells()
            .map(|(a, b, v)| if v == 0.0 { 0.0 } else { v.abs().powf(p) * interval_mass(a, b) })
            .sum();
        s.powf(1.0 / p)
    }

    pub fn l1_lebesgue(&self) -> f64 {
        self.cells().map(|(a, b, v)| v.abs() * (b - a)).sum()
    }

    /// ∫ x² |f(x)| dγ(x).
    pub fn second_moment_abs(&self) -> f64 {
        self.cells()
            .map(|(a, b, v)| if v == 0.0 { 0.0 } else { v.abs() * interval_second_moment(a, b) })
            .sum()
    }

    /// ∫ f g dγ for another step function g.
    pub fn inner_gauss(&self, other: &Self) -> f64 {
        self.mul(other).integrate_gauss()
    }
}

/// Sorted union of two sorted breakpoint lists without duplicates.
pub(crate) fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Materialized product f·w where w is a Lipschitz weight sampled at cell
/// midpoints on a refinement of mesh <= h inside `[lo, hi]`.
///
/// Returns the product together with the sup-norm error bound
/// Lip(w) · h / 2 · ‖f‖_∞.
pub fn sampled_weight_product(
    f: &StepFunction1D,
    weight: impl Fn(f64) -> f64,
    lipschitz: f64,
    (lo, hi): (f64, f64),
    h: f64,
) -> (StepFunction1D, f64) {
    let g = f.restrict(lo, hi);
    let mut breaks = Vec::new();
    let mut values = Vec::new();
    for (a, b, v) in g.cells() {
        let pieces = ((b - a) / h).ceil().max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        if breaks.is_empty() {
            breaks.push(a);
        }
        for k in 0..pieces {
            let x0 = a + k as f64 * step;
            let x1 = if k + 1 == pieces { b } else { x0 + step };
            values.push(v * weight(0.5 * (x0 + x1)));
            breaks.push(x1);
        }
    }
    let bound = lipschitz * h * 0.5 * f.sup_norm();
    (StepFunction1D { breaks, values }, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_step() -> impl Strategy<Value = StepFunction1D> {
        (prop::collection::vec(-4.0f64..4.0, 2..12), prop::collection::vec(-3.0f64..3.0, 11))
            .prop_map(|(mut b, v)| {
                b.sort_by(f64::total_cmp);
                b.dedup_by(|x, y| (*x - *y).abs() < 1e-6);
                if b.len() < 2 {
                    b = vec![-1.0, 1.0];
                }
                let n = b.len() - 1;
                StepFunction1D::new(b, v[..n].to_vec()).unwrap()
            })
    }

    #[test]
    fn add_negation_is_zero() {
        let f = StepFunction1D::new(vec![-1.0, 0.0, 2.0], vec![3.0, -1.5]).unwrap();
        assert!(f.add(&f.scale(-1.0)).canonical().is_zero());
        assert_eq!(f.scale(0.0).canonical(), StepFunction1D::zero());
    }

    #[test]
    fn norms_of_simple_functions() {
        assert!((StepFunction1D::constant(1.0).lp_norm_gauss(1.0) - 1.0).abs() < 1e-15);
        let half = StepFunction1D::indicator(0.0, CLIP, 1.0);
        assert!((half.integrate_gauss() - 0.5).abs() < 1e-12);
        assert!((half.lp_norm_gauss(2.0) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn l1_against_quadrature_oracle() {
        let f = StepFunction1D::new(vec![-2.0, -0.3, 0.4, 1.7, 2.2], vec![1.5, -2.0, 0.25, 4.0]).unwrap();
        // composite Simpson on every cell, no error functions involved
        let oracle: f64 = f
            .cells()
            .map(|(a, b, v)| {
                let n = 2000;
                let h = (b - a) / n as f64;
                let g = |x: f64| v.abs() * (-x * x).exp() * crate::special::FRAC_1_SQRT_PI;
                let mut s = g(a) + g(b);
                for i in 1..n {
                    s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                s * h / 3.0
            })
            .sum();
        assert!((f.lp_norm_gauss(1.0) - oracle).abs() < 1e-10, "{} vs {oracle}", f.lp_norm_gauss(1.0));
    }

    #[test]
    fn weight_products_sum_back_within_bound() {
        use crate::geometry::covering_1d;
        let f = StepFunction1D::new(vec![-2.5, -0.5, 1.0, 2.0], vec![2.0, -1.0, 3.0]).unwrap();
        let (_, pou) = covering_1d(3.0).unwrap();
        let mut total = StepFunction1D::zero();
        let mut bound = 0.0f64;
        for j in 0..pou.len() {
            let (lo, hi) = pou.support_interval(j).unwrap();
            let lip = pou.slope_bound_1d(j).unwrap();
            let (p, e) = sampled_weight_product(&f, |x| pou.weight(j, &[x]), lip, (lo, hi), 1e-3);
            total = total.add(&p);
            bound = bound.max(e);
        }
        for i in 0..5000 {
            let x = -3.0 + 6.0 * (i as f64 + 0.5) / 5000.0;
            assert!((total.eval(x) - f.eval(x)).abs() <= 2.0 * bound + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_preserves_values(f in random_step()) {
            let c = f.canonical();
            prop_assert_eq!(c.canonical(), c.clone());
            for i in 0..400 {
                let x = -5.0 + 10.0 * (i as f64 + 0.31) / 400.0;
                prop_assert_eq!(c.eval(x), f.eval(x));
            }
        }

        #[test]
        fn holder_l1_below_lp(f in random_step(), p in 1.01f64..6.0) {
            prop_assert!(f.lp_norm_gauss(1.0) <= f.lp_norm_gauss(p) * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn integral_is_linear(f in random_step(), g in random_step(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let lhs = f.axpby(a, &g, b).integrate_gauss();
            let rhs = a * f.integrate_gauss() + b * g.integrate_gauss();
            let scale = a.abs() * f.lp_norm_gauss(1.0) + b.abs() * g.lp_norm_gauss(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * scale.max(1e-300));
        }
    }
}
