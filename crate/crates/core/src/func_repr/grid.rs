use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::measure::{interval_mass, interval_second_moment, AxisBox};

use super::boxsum::strides;
use super::{for_each_index, BoxSumFunctionND};

/// A rectilinear lattice in ℝⁿ with per-axis γ cell masses cached.
#[derive(Debug)]
pub struct Lattice {
    axes: Vec<Vec<f64>>,
    masses: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Lattice {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Arc<Self>> {
        if axes.is_empty() {
            return invalid("lattice needs at least one axis");
        }
        for a in &axes {
            if a.len() < 2 || a.windows(2).any(|w| w[1] <= w[0]) {
                return invalid("lattice axes must be strictly increasing with at least one cell");
            }
        }
        let masses = axes.iter().map(|a| a.windows(2).map(|w| interval_mass(w[0], w[1])).collect()).collect();
        let second = axes
            .iter()
            .map(|a| a.windows(2).map(|w| interval_second_moment(w[0], w[1])).collect())
            .collect();
        Ok(Arc::new(Lattice { axes, masses, second }))
    }

    /// The uniform lattice with spacing close to `h` on [lo, hi]ⁿ, refined by
    /// the given extra breakpoints on every axis.
    pub fn uniform(dim: usize, lo: f64, hi: f64, h: f64, extra: &[f64]) -> Result<Arc<Self>> {
        if !(hi > lo) || !(h > 0.0) {
            return invalid("uniform lattice needs lo < hi and h > 0");
        }
        let n = ((hi - lo) / h).ceil().max(1.0) as usize;
        let step = (hi - lo) / n as f64;
        let mut axis: Vec<f64> = (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * step }).collect();
        axis.extend(extra.iter().copied().filter(|v| *v > lo && *v < hi));
        axis.sort_by(f64::total_cmp);
        // drop slivers created by extra breakpoints sitting next to lattice nodes
        let tol = 1e-9 * step;
        let mut clean: Vec<f64> = Vec::with_capacity(axis.len());
        for v in axis {
            match clean.last() {
                Some(&l) if v - l <= tol => {
                    if v == hi {
                        *clean.last_mut().unwrap() = hi;
                    }
                }
                _ => clean.push(v),
            }
        }
        Lattice::new(vec![clean; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, d: usize) -> &[f64] {
        &self.axes[d]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len() - 1).collect()
    }

    /// Cell index along axis d containing v, if any (half-open cells).
    pub fn locate(&self, d: usize, v: f64) -> Option<usize> {
        let a = &self.axes[d];
        if v < a[0] || v >= a[a.len() - 1] {
            return None;
        }
        Some(a.partition_point(|&b| b <= v) - 1)
    }

    /// Index range [lo, hi) of the cells meeting the open interval (a, b).
    pub fn cell_range(&self, d: usize, a: f64, b: f64) -> (usize, usize) {
        let ax = &self.axes[d];
        let lo = ax.partition_point(|&v| v <= a).saturating_sub(1);
        let hi = ax.partition_point(|&v| v < b).min(ax.len() - 1);
        (lo, hi.max(lo))
    }

    pub fn cell_box(&self, idx: &[usize]) -> AxisBox {
        AxisBox {
            lo: idx.iter().enumerate().map(|(d, &i)| self.axes[d][i]).collect(),
            hi: idx.iter().enumerate().map(|(d, &i)| self.axes[d][i + 1]).collect(),
        }
    }

    pub fn cell_mass(&self, idx: &[usize]) -> f64 {
        idx.iter().enumerate().map(|(d, &i)| self.masses[d][i]).product()
    }

    pub fn cell_volume(&self, idx: &[usize]) -> f64 {
        idx.iter().enumerate().map(|(d, &i)| self.axes[d][i + 1] - self.axes[d][i]).product()
    }

    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(d, &i)| 0.5 * (self.axes[d][i] + self.axes[d][i + 1])).collect()
    }

    /// ∫_cell |x|² dγ.
    pub fn cell_second_moment(&self, idx: &[usize]) -> f64 {
        (0..idx.len())
            .map(|d| {
                let others: f64 = (0..idx.len()).filter(|&e| e != d).map(|e| self.masses[e][idx[e]]).product();
                self.second[d][idx[d]] * others
            })
            .sum()
    }
}

/// A function constant on the cells of a rectangular window of a lattice
/// and zero elsewhere.
#[derive(Debug, Clone)]
pub struct GridFunction {
    lattice: Arc<Lattice>,
    lo: Vec<usize>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lattice: Arc<Lattice>, lo: Vec<usize>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let full = lattice.shape();
        if lo.len() != lattice.dim() || shape.len() != lattice.dim() {
            return invalid("grid window dimension does not match the lattice");
        }
        if (0..lo.len()).any(|d| lo[d] + shape[d] > full[d]) {
            return invalid("grid window exceeds the lattice");
        }
        if values.len() != shape.iter().product::<usize>() {
            return invalid("grid window value count does not match its shape");
        }
        Ok(GridFunction { lattice, lo, shape, values })
    }

    pub fn zeros(lattice: Arc<Lattice>, lo: Vec<usize>, shape: Vec<usize>) -> Result<Self> {
        let n = shape.iter().product();
        Self::new(lattice, lo, shape, vec![0.0; n])
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn window_lo(&self) -> &[usize] {
        &self.lo
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    fn offset(&self, global: &[usize]) -> Option<usize> {
        let st = strides(&self.shape);
        let mut k = 0;
        for d in 0..self.lo.len() {
            if global[d] < self.lo[d] || global[d] >= self.lo[d] + self.shape[d] {
                return None;
            }
            k += (global[d] - self.lo[d]) * st[d];
        }
        Some(k)
    }

    /// Value on the cell with the given global lattice index.
    pub fn get(&self, global: &[usize]) -> f64 {
        self.offset(global).map_or(0.0, |k| self.values[k])
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut idx = Vec::with_capacity(x.len());
        for (d, &v) in x.iter().enumerate() {
            match self.lattice.locate(d, v) {
                Some(i) => idx.push(i),
                None => return 0.0,
            }
        }
        self.get(&idx)
    }

    /// Visit (global index, value) for every cell of the window.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut k = 0;
        let mut global = self.lo.clone();
        for_each_index(&self.shape, |idx| {
            for d in 0..idx.len() {
                global[d] = self.lo[d] + idx[d];
            }
            f(&global, self.values[k]);
            k += 1;
        });
    }

    fn fold(&self, f: impl Fn(&[usize], f64) -> f64) -> f64 {
        let mut s = 0.0;
        self.for_each_cell(|g, v| {
            if v != 0.0 {
                s += f(g, v);
            }
        });
        s
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn integrate_gauss(&self) -> f64 {
        self.fold(|g, v| v * self.lattice.cell_mass(g))
    }

    pub fn integrate_lebesgue(&self) -> f64 {
        self.fold(|g, v| v * self.lattice.cell_volume(g))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn lp_norm_gauss(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        self.fold(|g, v| v.abs().powf(p) * self.lattice.cell_mass(g)).powf(1.0 / p)
    }

    pub fn l1_lebesgue(&self) -> f64 {
        self.fold(|g, v| v.abs() * self.lattice.cell_volume(g))
    }

    pub fn second_moment_abs(&self) -> f64 {
        self.fold(|g, v| v.abs() * self.lattice.cell_second_moment(g))
    }

    /// Bounding box of the cells with nonzero values.
    pub fn support(&self) -> Option<AxisBox> {
        let n = self.dim();
        let mut lo = vec![usize::MAX; n];
        let mut hi = vec![0usize; n];
        let mut any = false;
        self.for_each_cell(|g, v| {
            if v != 0.0 {
                any = true;
                for d in 0..n {
                    lo[d] = lo[d].min(g[d]);
                    hi[d] = hi[d].max(g[d]);
                }
            }
        });
        if !any {
            return None;
        }
        Some(AxisBox {
            lo: (0..n).map(|d| self.lattice.axes[d][lo[d]]).collect(),
            hi: (0..n).map(|d| self.lattice.axes[d][hi[d] + 1]).collect(),
        })
    }

    pub fn to_boxsum(&self) -> BoxSumFunctionND {
        let mut terms = Vec::new();
        self.for_each_cell(|g, v| {
            if v != 0.0 {
                terms.push((self.lattice.cell_box(g), v));
            }
        });
        BoxSumFunctionND::new(self.dim(), terms).expect("lattice cells are valid boxes")
    }
}
