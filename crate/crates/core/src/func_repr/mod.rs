//! Exact finite representations of functions on ℝⁿ.

mod boxsum;
mod grid;
mod spec;
mod step;

pub use boxsum::{sampled_weight_product_nd, BoxSumFunctionND, CellForm};
pub(crate) use boxsum::{box_second_moment, strides};
pub use grid::{GridFunction, Lattice};
pub use spec::{FunctionSpec, NamedFunction};
pub use step::{sampled_weight_product, StepFunction1D};

use crate::error::{Error, Result};
use crate::measure::AxisBox;

/// Visit every multi-index of the given shape in row-major order.
pub(crate) fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.iter().any(|&s| s == 0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    loop {
        f(&idx);
        let mut d = shape.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < shape[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Any represented function.
#[derive(Debug, Clone)]
pub enum Func {
    Step(StepFunction1D),
    BoxSum(BoxSumFunctionND),
    Grid(GridFunction),
}

impl From<StepFunction1D> for Func {
    fn from(f: StepFunction1D) -> Self {
        Func::Step(f)
    }
}

impl From<BoxSumFunctionND> for Func {
    fn from(f: BoxSumFunctionND) -> Self {
        Func::BoxSum(f)
    }
}

impl From<GridFunction> for Func {
    fn from(f: GridFunction) -> Self {
        Func::Grid(f)
    }
}

impl Func {
    pub fn constant(dim: usize, c: f64) -> Func {
        if dim == 1 {
            Func::Step(StepFunction1D::constant(c))
        } else {
            Func::BoxSum(BoxSumFunctionND::constant(dim, c))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Func::Step(_) => 1,
            Func::BoxSum(f) => f.dim(),
            Func::Grid(f) => f.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Func::Step(f) => f.eval(x[0]),
            Func::BoxSum(f) => f.eval(x),
            Func::Grid(f) => f.eval(x),
        }
    }

    pub fn scale(&self, c: f64) -> Func {
        match self {
            Func::Step(f) => Func::Step(f.scale(c)),
            Func::BoxSum(f) => Func::BoxSum(f.scale(c)),
            Func::Grid(f) => Func::Grid(f.scale(c)),
        }
    }

    /// Exact sum; mixed representations are combined as box sums.
    pub fn add(&self, other: &Func) -> Result<Func> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(match (self, other) {
            (Func::Step(a), Func::Step(b)) => Func::Step(a.add(b)),
            _ => Func::BoxSum(self.to_boxsum().add(&other.to_boxsum())?),
        })
    }

    pub fn to_boxsum(&self) -> BoxSumFunctionND {
        match self {
            Func::Step(f) => BoxSumFunctionND::from_step(f),
            Func::BoxSum(f) => f.clone(),
            Func::Grid(f) => f.to_boxsum(),
        }
    }

    pub fn as_step(&self) -> Option<&StepFunction1D> {
        match self {
            Func::Step(f) => Some(f),
            _ => None,
        }
    }

    /// Bounding box of the support, if the function is not identically zero.
    pub fn support(&self) -> Option<AxisBox> {
        match self {
            Func::Step(f) => f.support().map(|(a, b)| AxisBox { lo: vec![a], hi: vec![b] }),
            Func::BoxSum(f) => f.support(),
            Func::Grid(f) => f.support(),
        }
    }

    pub fn integrate_gauss(&self) -> f64 {
        match self {
            Func::Step(f) => f.integrate_gauss(),
            Func::BoxSum(f) => f.integrate_gauss(),
            Func::Grid(f) => f.integrate_gauss(),
        }
    }

    pub fn integrate_lebesgue(&self) -> f64 {
        match self {
            Func::Step(f) => f.integrate_lebesgue(),
            Func::BoxSum(f) => f.integrate_lebesgue(),
            Func::Grid(f) => f.integrate_lebesgue(),
        }
    }

    pub fn lp_norm_gauss(&self, p: f64) -> f64 {
        match self {
            Func::Step(f) => f.lp_norm_gauss(p),
            Func::BoxSum(f) => f.lp_norm_gauss(p),
            Func::Grid(f) => f.lp_norm_gauss(p),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Func::Step(f) => f.sup_norm(),
            Func::BoxSum(f) => f.sup_norm(),
            Func::Grid(f) => f.sup_norm(),
        }
    }

    pub fn l1_lebesgue(&self) -> f64 {
        match self {
            Func::Step(f) => f.l1_lebesgue(),
            Func::BoxSum(f) => f.l1_lebesgue(),
            Func::Grid(f) => f.l1_lebesgue(),
        }
    }

    pub fn second_moment_abs(&self) -> f64 {
        match self {
            Func::Step(f) => f.second_moment_abs(),
            Func::BoxSum(f) => f.second_moment_abs(),
            Func::Grid(f) => f.second_moment_abs(),
        }
    }

    /// Number of stored pieces (cells or boxes).
    pub fn pieces(&self) -> usize {
        match self {
            Func::Step(f) => f.values().len(),
            Func::BoxSum(f) => f.terms().len(),
            Func::Grid(f) => f.values().len(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Func::Step(f) => f.values().iter().all(|v| *v >= 0.0),
            Func::BoxSum(f) => f.cells().values.iter().all(|v| *v >= 0.0),
            Func::Grid(f) => f.values().iter().all(|v| *v >= 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_walk_is_row_major() {
        let mut seen = Vec::new();
        for_each_index(&[2, 3], |i| seen.push((i[0], i[1])));
        assert_eq!(seen, vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]);
        let mut count = 0;
        for_each_index(&[3, 0], |_| count += 1);
        assert_eq!(count, 0);
    }

    #[test]
    fn mixed_sum_and_dimension_check() {
        let a = Func::constant(1, 2.0);
        let b = Func::Step(StepFunction1D::indicator(0.0, 1.0, 1.0));
        let s = a.add(&b).unwrap();
        assert_eq!(s.eval(&[0.5]), 3.0);
        assert!(a.add(&Func::constant(2, 1.0)).is_err());
    }
}
