//! Stopping-time Calderón–Zygmund splitting of a piecewise constant
//! function on a box, for Lebesgue or Gaussian measure.

use crate::error::Result;
use crate::func_repr::{for_each_index, strides, BoxSumFunctionND, Func, StepFunction1D};
use crate::geometry::Ball;
use crate::measure::{interval_mass, AxisBox, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Lebesgue,
    Gauss,
}

impl Weight {
    pub fn interval(self, a: f64, b: f64) -> f64 {
        match self {
            Weight::Lebesgue => b - a,
            Weight::Gauss => interval_mass(a, b),
        }
    }

    pub fn boxed(self, b: &AxisBox) -> f64 {
        (0..b.dim()).map(|d| self.interval(b.lo[d], b.hi[d])).product()
    }
}

/// A piecewise constant function on a rectilinear grid of cells. Each axis
/// list holds the cell edges, endpoints included.
#[derive(Debug, Clone)]
pub struct Local {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl Local {
    /// Sample `f` on the cells cut by its own breaks inside `region`.
    pub fn from_func(f: &Func, region: &AxisBox) -> Local {
        let n = region.dim();
        let form = f.to_boxsum().cells();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                let (lo, hi) = (region.lo[d], region.hi[d]);
                let mut a = vec![lo];
                a.extend(form.axes[d].iter().copied().filter(|&x| x > lo && x < hi));
                a.push(hi);
                a
            })
            .collect();
        let mut local = Local { values: Vec::new(), axes };
        let shape = local.shape();
        let mut values = Vec::with_capacity(shape.iter().product());
        for_each_index(&shape, |idx| values.push(f.eval(&local.cell_center(idx))));
        local.values = values;
        local
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len() - 1).collect()
    }

    pub fn region(&self) -> AxisBox {
        AxisBox {
            lo: self.axes.iter().map(|a| a[0]).collect(),
            hi: self.axes.iter().map(|a| *a.last().unwrap()).collect(),
        }
    }

    fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(d, &i)| 0.5 * (self.axes[d][i] + self.axes[d][i + 1])).collect()
    }

    pub fn shifted(mut self, c: f64) -> Local {
        self.values.iter_mut().for_each(|v| *v -= c);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Cell index ranges meeting the box, per axis.
    fn ranges(&self, b: &AxisBox) -> Vec<(usize, usize)> {
        self.axes
            .iter()
            .enumerate()
            .map(|(d, a)| {
                let lo = a.partition_point(|&x| x <= b.lo[d]).saturating_sub(1);
                let hi = a.partition_point(|&x| x < b.hi[d]).min(a.len() - 1);
                (lo, hi.max(lo))
            })
            .collect()
    }

    /// (∫_b g dμ, ∫_b |g| dμ, max |g| on b, single cell?)
    fn stats(&self, b: &AxisBox, w: Weight) -> (f64, f64, f64, bool) {
        let n = self.dim();
        let ranges = self.ranges(b);
        let single = ranges.iter().all(|(a, c)| c - a == 1);
        let per_axis: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                (ranges[d].0..ranges[d].1)
                    .map(|i| {
                        let lo = self.axes[d][i].max(b.lo[d]);
                        let hi = self.axes[d][i + 1].min(b.hi[d]);
                        if hi > lo { w.interval(lo, hi) } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        let sub: Vec<usize> = ranges.iter().map(|(a, c)| c - a).collect();
        let st = strides(&self.shape());
        let (mut s, mut sa, mut mx) = (0.0, 0.0, 0.0f64);
        for_each_index(&sub, |idx| {
            let mut m = 1.0;
            let mut k = 0;
            for d in 0..n {
                m *= per_axis[d][idx[d]];
                k += (ranges[d].0 + idx[d]) * st[d];
            }
            if m > 0.0 {
                let v = self.values[k];
                s += v * m;
                sa += v.abs() * m;
                mx = mx.max(v.abs());
            }
        });
        (s, sa, mx, single)
    }

    /// Children of `b`: every axis is split at an interior cell edge
    /// close to the middle, or at the midpoint.
    fn children(&self, b: &AxisBox) -> Vec<AxisBox> {
        let n = self.dim();
        let cuts: Vec<f64> = (0..n)
            .map(|d| {
                let (lo, hi) = (b.lo[d], b.hi[d]);
                let mid = 0.5 * (lo + hi);
                let q = 0.25 * (hi - lo);
                self.axes[d]
                    .iter()
                    .copied()
                    .filter(|&x| x >= mid - q && x <= mid + q && x > lo && x < hi)
                    .min_by(|x, y| (x - mid).abs().total_cmp(&(y - mid).abs()))
                    .unwrap_or(mid)
            })
            .collect();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let mut c = b.clone();
            for d in 0..n {
                if mask >> d & 1 == 1 {
                    c.lo[d] = cuts[d];
                } else {
                    c.hi[d] = cuts[d];
                }
            }
            out.push(c);
        }
        out
    }

    /// Refine by extra edges and set each cell from `value(center)`.
    fn resample(&self, region: &AxisBox, extra: &[AxisBox], value: impl Fn(&[f64]) -> f64) -> Local {
        let n = self.dim();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                let (lo, hi) = (region.lo[d], region.hi[d]);
                let mut a: Vec<f64> = self.axes[d].iter().copied().filter(|&x| x > lo && x < hi).collect();
                for e in extra {
                    a.extend([e.lo[d], e.hi[d]].into_iter().filter(|&x| x > lo && x < hi));
                }
                a.push(lo);
                a.push(hi);
                a.sort_by(f64::total_cmp);
                a.dedup();
                a
            })
            .collect();
        let mut out = Local { axes, values: Vec::new() };
        let mut values = Vec::new();
        for_each_index(&out.shape(), |idx| values.push(value(&out.cell_center(idx))));
        out.values = values;
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut k = 0;
        let st = strides(&self.shape());
        for d in 0..self.dim() {
            let a = &self.axes[d];
            if x[d] < a[0] || x[d] >= *a.last().unwrap() {
                return 0.0;
            }
            k += (a.partition_point(|&t| t <= x[d]) - 1) * st[d];
        }
        self.values[k]
    }

    pub fn to_func(&self) -> Result<Func> {
        if self.dim() == 1 {
            return Ok(Func::Step(StepFunction1D::new(self.axes[0].clone(), self.values.clone())?.canonical()));
        }
        let mut terms = Vec::new();
        let mut k = 0;
        for_each_index(&self.shape(), |idx| {
            let v = self.values[k];
            k += 1;
            if v != 0.0 {
                let lo = idx.iter().enumerate().map(|(d, &i)| self.axes[d][i]).collect();
                let hi = idx.iter().enumerate().map(|(d, &i)| self.axes[d][i + 1]).collect();
                terms.push((AxisBox { lo, hi }, v));
            }
        });
        Ok(Func::BoxSum(BoxSumFunctionND::new(self.dim(), terms)?))
    }
}

/// Smallest ball containing the box.
pub fn circumscribed_ball(b: &AxisBox) -> Ball {
    let c: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let r = b.lo.iter().zip(&b.hi).map(|(l, h)| 0.25 * (h - l) * (h - l)).sum::<f64>().sqrt();
    // a few ulps of the coordinates, so the box stays inside after rounding
    let far = b.lo.iter().chain(&b.hi).fold(0.0f64, |m, v| m.max(v.abs()));
    let r = r * (1.0 + 4.0 * f64::EPSILON) + 4.0 * f64::EPSILON * far;
    Ball { center: Point(c), radius: r }
}

/// One mean-zero piece of the splitting, supported in `region`.
#[derive(Debug, Clone)]
pub struct CzPiece {
    pub region: AxisBox,
    pub payload: Local,
}

#[derive(Debug, Clone, Copy)]
pub struct CzOptions {
    pub weight: Weight,
    pub max_depth: usize,
}

/// Split g (μ-mean zero on its region) into pieces that are μ-mean zero
/// on nested boxes. Levels double from twice the average of |g|; a box is
/// stopped when the average of |g| over it exceeds the current level.
/// The pieces sum to g exactly up to rounding.
pub fn cz_split(g: &Local, opts: CzOptions) -> Vec<CzPiece> {
    let root = g.region();
    let (s, sa, _, _) = g.stats(&root, opts.weight);
    let mass = opts.weight.boxed(&root);
    if sa == 0.0 || !(mass > 0.0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    process(g, &root, s / mass, 2.0 * sa / mass, 0, opts, &mut out);
    out
}

fn process(g: &Local, q: &AxisBox, avg: f64, level: f64, depth: usize, opts: CzOptions, out: &mut Vec<CzPiece>) {
    let mut stopped: Vec<(AxisBox, f64)> = Vec::new();
    select(g, q, level, depth, opts, &mut stopped);
    let payload = g.resample(q, &stopped.iter().map(|(b, _)| b.clone()).collect::<Vec<_>>(), |x| {
        let v = stopped.iter().find(|(b, _)| b.contains(x)).map_or_else(|| g.eval(x), |(_, a)| *a);
        v - avg
    });
    // re-centre so that rounding in the averages does not leave a mean
    let (s, _, _, _) = payload.stats(q, opts.weight);
    let payload = payload.shifted(s / opts.weight.boxed(q));
    let (_, _, g_max, _) = g.stats(q, opts.weight);
    let sup = payload.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup > 1e-13 * g_max {
        out.push(CzPiece { region: q.clone(), payload });
    }
    for (b, a) in stopped {
        let d = depth + box_depth(q, &b);
        process(g, &b, a, 2.0 * level, d, opts, out);
    }
}

fn box_depth(outer: &AxisBox, inner: &AxisBox) -> usize {
    let r = inner.volume() / outer.volume();
    ((-r.log2()) / outer.dim() as f64).round().max(1.0) as usize
}

fn select(g: &Local, q: &AxisBox, level: f64, depth: usize, opts: CzOptions, out: &mut Vec<(AxisBox, f64)>) {
    if depth >= opts.max_depth {
        return;
    }
    for c in g.children(q) {
        let m = opts.weight.boxed(&c);
        if !(m > 0.0) {
            continue;
        }
        let (s, sa, mx, single) = g.stats(&c, opts.weight);
        if sa / m > level {
            out.push((c, s / m));
        } else if !single && mx > level {
            select(g, &c, level, depth + 1, opts, out);
        }
    }
}
