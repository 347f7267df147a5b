use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::func_repr::{for_each_index, Func, StepFunction1D};
use crate::geometry::maximal_radius;
use crate::measure::{interval_mass, AxisBox, CLIP};

use super::{Dictionary, Profile};

/// Time grid and resolution settings shared by every maximal computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalOptions {
    pub t_min: f64,
    pub ratio: f64,
    /// Relative margin keeping t strictly below the upper limit.
    pub margin: f64,
}

impl Default for MaximalOptions {
    fn default() -> Self {
        MaximalOptions { t_min: 1e-4, ratio: 2f64.powf(0.25), margin: 1e-12 }
    }
}

impl MaximalOptions {
    /// Geometric grid in [t_min, t_max) plus the endpoint t_max(1 − margin).
    pub fn times(&self, t_max: f64) -> Vec<f64> {
        let top = t_max * (1.0 - self.margin);
        let mut out = Vec::new();
        let mut t = self.t_min;
        while t < top {
            out.push(t);
            t *= self.ratio;
        }
        if top > 0.0 {
            out.push(top);
        }
        out
    }
}

/// Grids in n > 1 stop here; the Gauss mass beyond is below 1e-15.
const ND_REACH: f64 = 6.0;

/// Evaluation points with the cells they stand for.
#[derive(Debug, Clone)]
pub struct EvalGrid {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub cell_mass: Vec<f64>,
    pub cell_volume: Vec<f64>,
}

impl EvalGrid {
    /// Cells of length min(1, 1/|x|)/per_unit covering [lo, hi].
    pub fn adaptive_1d(lo: f64, hi: f64, per_unit: usize) -> Result<Self> {
        if !(hi > lo) || per_unit == 0 {
            return invalid("adaptive grid needs lo < hi and a positive resolution");
        }
        let mut points = Vec::new();
        let mut mass = Vec::new();
        let mut vol = Vec::new();
        let mut x = lo;
        while x < hi {
            let far = x.abs().max((x + 1e-9).abs());
            let h = maximal_radius(far + maximal_radius(far)) / per_unit as f64;
            let next = (x + h).min(hi);
            points.push(vec![0.5 * (x + next)]);
            mass.push(interval_mass(x, next));
            vol.push(next - x);
            x = next;
        }
        Ok(EvalGrid { dim: 1, points, cell_mass: mass, cell_volume: vol })
    }

    /// `per_axis` equal cells along every axis of `region`.
    pub fn uniform(region: &AxisBox, per_axis: usize) -> Result<Self> {
        if region.is_degenerate() || per_axis == 0 {
            return invalid("uniform grid needs a nondegenerate region and a positive resolution");
        }
        let n = region.dim();
        let h: Vec<f64> = (0..n).map(|d| (region.hi[d] - region.lo[d]) / per_axis as f64).collect();
        let masses: Vec<Vec<f64>> = (0..n)
            .map(|d| {
                (0..per_axis)
                    .map(|i| interval_mass(region.lo[d] + i as f64 * h[d], region.lo[d] + (i + 1) as f64 * h[d]))
                    .collect()
            })
            .collect();
        let mut grid = EvalGrid { dim: n, points: Vec::new(), cell_mass: Vec::new(), cell_volume: Vec::new() };
        let vol: f64 = h.iter().product();
        for_each_index(&vec![per_axis; n], |idx| {
            grid.points.push((0..n).map(|d| region.lo[d] + (idx[d] as f64 + 0.5) * h[d]).collect());
            grid.cell_mass.push((0..n).map(|d| masses[d][idx[d]]).product());
            grid.cell_volume.push(vol);
        });
        Ok(grid)
    }

    /// Grid on which M̂_loc f can be nonzero: the support enlarged by 1
    /// (the largest admissible time), clipped.
    pub fn for_local(f: &Func, per_unit: usize) -> Result<Option<Self>> {
        let Some(sup) = f.support() else { return Ok(None) };
        if f.dim() == 1 {
            let lo = (sup.lo[0] - 1.0).max(-CLIP);
            let hi = (sup.hi[0] + 1.0).min(CLIP);
            return Self::adaptive_1d(lo, hi, per_unit).map(Some);
        }
        let region = AxisBox {
            lo: sup.lo.iter().map(|v| (v - 1.0).max(-ND_REACH)).collect(),
            hi: sup.hi.iter().map(|v| (v + 1.0).min(ND_REACH)).collect(),
        };
        if region.is_degenerate() {
            return Ok(None);
        }
        Self::adaptive_nd(&region, per_unit).map(Some)
    }

    /// Tensor product of [`EvalGrid::adaptive_1d`] along every axis.
    pub fn adaptive_nd(region: &AxisBox, per_unit: usize) -> Result<Self> {
        let axes = (0..region.dim())
            .map(|d| Self::adaptive_1d(region.lo[d], region.hi[d], per_unit))
            .collect::<Result<Vec<_>>>()?;
        let n = axes.len();
        let shape: Vec<usize> = axes.iter().map(|a| a.points.len()).collect();
        let mut grid = EvalGrid { dim: n, points: Vec::new(), cell_mass: Vec::new(), cell_volume: Vec::new() };
        for_each_index(&shape, |idx| {
            grid.points.push((0..n).map(|d| axes[d].points[idx[d]][0]).collect());
            grid.cell_mass.push((0..n).map(|d| axes[d].cell_mass[idx[d]]).product());
            grid.cell_volume.push((0..n).map(|d| axes[d].cell_volume[idx[d]]).product());
        });
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Grid values of a discretized maximal function.
#[derive(Debug, Clone, Serialize)]
pub struct MaximalProfile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    #[serde(skip)]
    pub cell_mass: Vec<f64>,
    #[serde(skip)]
    pub cell_volume: Vec<f64>,
}

impl MaximalProfile {
    pub fn zero(dim: usize) -> Self {
        MaximalProfile { dim, points: vec![], values: vec![], cell_mass: vec![], cell_volume: vec![] }
    }

    /// Σ M(x_i) γ(cell_i).
    pub fn l1_gauss(&self) -> f64 {
        self.values.iter().zip(&self.cell_mass).map(|(v, m)| v * m).sum()
    }

    pub fn lp_gauss(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup();
        }
        self.values.iter().zip(&self.cell_mass).map(|(v, m)| v.powf(p) * m).sum::<f64>().powf(1.0 / p)
    }

    pub fn l1_lebesgue(&self) -> f64 {
        self.values.iter().zip(&self.cell_volume).map(|(v, m)| v * m).sum()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(*v))
    }

    /// `x_1,…,x_n,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let names: Vec<String> = (1..=self.dim).map(|d| format!("x{d}")).collect();
        s.push_str(&names.join(","));
        s.push_str(",value\n");
        for (p, v) in self.points.iter().zip(&self.values) {
            for c in p {
                s.push_str(&format!("{c:.12e},"));
            }
            s.push_str(&format!("{v:.12e}\n"));
        }
        s
    }
}

/// Jump form of a 1D step function: f = Σ_k J_k 1_{[b_k, ∞)}.
struct Jumps {
    at: Vec<f64>,
    size: Vec<f64>,
    f: StepFunction1D,
}

impl Jumps {
    fn new(f: &StepFunction1D) -> Self {
        let f = f.canonical();
        let mut at = Vec::new();
        let mut size = Vec::new();
        let mut prev = 0.0;
        for (i, &b) in f.breaks().iter().enumerate() {
            let v = f.values().get(i).copied().unwrap_or(0.0);
            if v != prev {
                at.push(b);
                size.push(v - prev);
            }
            prev = v;
        }
        Jumps { at, size, f }
    }

    /// ∫ p((x−y)/t)/t f(y) dy.
    fn convolve(&self, p: &super::Profile1D, t: f64, x: f64) -> f64 {
        let lo = self.at.partition_point(|&b| b <= x - t);
        let hi = self.at.partition_point(|&b| b < x + t);
        let mut s = p.total * self.f.eval(x - t);
        for k in lo..hi {
            s += self.size[k] * p.primitive((x - self.at[k]) / t);
        }
        s
    }
}

enum Kernel {
    Line(Jumps),
    Boxes { terms: Vec<(AxisBox, f64)> },
}

impl Kernel {
    fn new(f: &Func) -> Self {
        match f {
            Func::Step(s) => Kernel::Line(Jumps::new(s)),
            other => Kernel::Boxes { terms: other.to_boxsum().terms().to_vec() },
        }
    }

    fn convolve(&self, prof: &Profile, t: f64, x: &[f64]) -> f64 {
        match self {
            Kernel::Line(j) => prof.kappa * j.convolve(&prof.axis, t, x[0]),
            Kernel::Boxes { terms } => {
                let n = x.len();
                let s = (n as f64).sqrt();
                let reach = t / s;
                let mut total = 0.0;
                for (b, c) in terms {
                    let mut prod = *c;
                    for d in 0..n {
                        if b.hi[d] <= x[d] - reach || b.lo[d] >= x[d] + reach {
                            prod = 0.0;
                            break;
                        }
                        // ∫_lo^hi p(√n (x−y)/t) √n/t dy, then the 1/√n from the cube scaling
                        let w = prof.axis.primitive(s * (x[d] - b.lo[d]) / t) - prof.axis.primitive(s * (x[d] - b.hi[d]) / t);
                        prod *= w;
                    }
                    total += prod;
                }
                prof.kappa * total / s.powi(n as i32)
            }
        }
    }
}

/// φ_t * f(x) for one dictionary profile, exact for represented f.
pub fn convolve(profile: &Profile, t: f64, f: &Func, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("time must be positive, got {t}"));
    }
    Ok(Kernel::new(f).convolve(profile, t, x))
}

fn sweep(
    f: &Func,
    grid: &EvalGrid,
    dict: &Dictionary,
    opts: &MaximalOptions,
    t_max: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<MaximalProfile> {
    if dict.is_empty() {
        return invalid("the test-function dictionary is empty");
    }
    if dict.dim != f.dim() || grid.dim != f.dim() {
        return invalid("dictionary, grid and function dimensions differ");
    }
    let kernel = Kernel::new(f);
    let values: Vec<f64> = grid
        .points
        .par_iter()
        .map(|x| {
            let mut best = 0.0f64;
            for t in opts.times(t_max(x)) {
                for p in &dict.profiles {
                    best = best.max(kernel.convolve(p, t, x).abs());
                }
            }
            best
        })
        .collect();
    Ok(MaximalProfile {
        dim: grid.dim,
        points: grid.points.clone(),
        values,
        cell_mass: grid.cell_mass.clone(),
        cell_volume: grid.cell_volume.clone(),
    })
}

/// M̂_loc f on the grid: sup over the dictionary and 0 < t < min(1, 1/|x|).
pub fn local_grand_maximal(f: &Func, grid: &EvalGrid, dict: &Dictionary, opts: &MaximalOptions) -> Result<MaximalProfile> {
    sweep(f, grid, dict, opts, |x| maximal_radius(x.iter().map(|v| v * v).sum::<f64>().sqrt()))
}

/// M̂ f on the grid with t_max(x) = 2(d(x, supp f) + diam supp f).
pub fn classical_grand_maximal(
    f: &Func,
    grid: &EvalGrid,
    dict: &Dictionary,
    opts: &MaximalOptions,
) -> Result<MaximalProfile> {
    let Some(sup) = f.support() else {
        return sweep(f, grid, dict, opts, |_| 0.0);
    };
    if sup.lo.iter().chain(&sup.hi).any(|v| v.abs() >= CLIP) {
        return invalid("the classical maximal function needs compact support inside the clip");
    }
    let diam = (0..sup.dim()).map(|d| (sup.hi[d] - sup.lo[d]).powi(2)).sum::<f64>().sqrt();
    sweep(f, grid, dict, opts, move |x| {
        let d2: f64 = (0..x.len())
            .map(|d| {
                let gap = (sup.lo[d] - x[d]).max(x[d] - sup.hi[d]).max(0.0);
                gap * gap
            })
            .sum();
        2.0 * (d2.sqrt() + diam)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_repr::BoxSumFunctionND;

    fn tent(dim: usize) -> Profile {
        Dictionary::tent_only(dim).unwrap().profiles.remove(0)
    }

    #[test]
    fn tent_against_constant_and_indicator() {
        let one = Func::constant(1, 1.0);
        for &t in &[1e-3, 0.3, 1.0] {
            assert!((convolve(&tent(1), t, &one, &[0.2]).unwrap() - 1.0).abs() < 1e-14);
        }
        let ind = Func::Step(StepFunction1D::indicator(-0.5, 0.5, 1.0));
        assert!((convolve(&tent(1), 0.4, &ind, &[0.0]).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(convolve(&tent(1), 0.4, &Func::Step(StepFunction1D::zero()), &[0.0]).unwrap(), 0.0);
        assert!(convolve(&tent(1), 0.0, &one, &[0.0]).is_err());
    }

    #[test]
    fn convolution_matches_quadrature() {
        let f = Func::Step(StepFunction1D::new(vec![-0.7, -0.1, 0.35, 0.9], vec![1.5, -2.0, 0.5]).unwrap());
        let dict = Dictionary::standard(1).unwrap();
        for p in &dict.profiles {
            for &(t, x) in &[(0.3, 0.0), (0.8, 0.4), (0.05, -0.12)] {
                let n = 200_000;
                let mut q = 0.0;
                for i in 0..n {
                    let y = x - t + 2.0 * t * (i as f64 + 0.5) / n as f64;
                    q += p.eval(&[(x - y) / t]) / t * f.eval(&[y]) * 2.0 * t / n as f64;
                }
                let exact = convolve(p, t, &f, &[x]).unwrap();
                assert!((exact - q).abs() < 1e-4, "{} t={t} x={x}: {exact} vs {q}", p.name);
            }
        }
    }

    #[test]
    fn box_convolution_agrees_with_line_convolution_in_1d() {
        let s = StepFunction1D::new(vec![-0.7, -0.1, 0.35, 0.9], vec![1.5, -2.0, 0.5]).unwrap();
        let b = Func::BoxSum(BoxSumFunctionND::from_step(&s));
        let dict = Dictionary::standard(1).unwrap();
        for p in &dict.profiles {
            let a = convolve(p, 0.37, &Func::Step(s.clone()), &[0.1]).unwrap();
            let c = convolve(p, 0.37, &b, &[0.1]).unwrap();
            assert!((a - c).abs() < 1e-13);
        }
    }

    #[test]
    fn box_convolution_matches_quadrature_2d() {
        let f = Func::BoxSum(
            BoxSumFunctionND::new(2, vec![(AxisBox::new(vec![-0.2, -0.1], vec![0.3, 0.5]).unwrap(), 2.0)]).unwrap(),
        );
        let dict = Dictionary::standard(2).unwrap();
        let (t, x) = (0.6, [0.1, 0.0]);
        for p in dict.profiles.iter().take(4) {
            let n = 600;
            let mut q = 0.0;
            for i in 0..n {
                for k in 0..n {
                    let y = [x[0] - t + 2.0 * t * (i as f64 + 0.5) / n as f64, x[1] - t + 2.0 * t * (k as f64 + 0.5) / n as f64];
                    let u = [(x[0] - y[0]) / t, (x[1] - y[1]) / t];
                    q += p.eval(&u) / (t * t) * f.eval(&y) * (2.0 * t / n as f64).powi(2);
                }
            }
            let exact = convolve(p, t, &f, &x).unwrap();
            assert!((exact - q).abs() < 2e-3, "{}: {exact} vs {q}", p.name);
        }
    }

    #[test]
    fn constant_has_unit_local_maximal_function() {
        let one = Func::constant(1, 1.0);
        let grid = EvalGrid::adaptive_1d(-5.0, 5.0, 4).unwrap();
        let prof = local_grand_maximal(&one, &grid, &Dictionary::standard(1).unwrap(), &MaximalOptions::default()).unwrap();
        assert!(prof.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn time_grid_stays_below_limit() {
        let o = MaximalOptions::default();
        let ts = o.times(0.5);
        assert!(ts.iter().all(|&t| t < 0.5 && t >= 1e-4));
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }
}
