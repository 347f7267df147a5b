use serde::{Deserialize, Serialize};

use crate::corpus::{charge_pair_function, two_sided_atom, ChargePairSpec};
use crate::error::{invalid, Error, Result};
use crate::measure::AxisBox;

use super::{BoxSumFunctionND, Func, StepFunction1D};

/// The JSON function-spec format read by the command line front end:
/// `{"dim": n, "kind": "step" | "boxsum" | "named", "data": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub body: SpecBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum SpecBody {
    Step { breaks: Vec<f64>, values: Vec<f64> },
    Boxsum { terms: Vec<BoxTerm> },
    Named(NamedFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxTerm {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub coeff: f64,
}

/// Library functions that can be referred to by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedFunction {
    Constant {
        value: f64,
    },
    Indicator {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "one")]
        value: f64,
    },
    /// Σ c_n (normalized pair differences) with c_n = n^{-p}; custom
    /// sequences override the defaults a_n = 3(n+1), a_n' = a_n + 1.
    ChargePair {
        #[serde(default)]
        c_exponent: Option<f64>,
        terms: usize,
        #[serde(default)]
        a: Option<Vec<f64>>,
        #[serde(default)]
        a_prime: Option<Vec<f64>>,
        #[serde(default)]
        c: Option<Vec<f64>>,
    },
    /// A two-valued mean-zero (1,∞)-atom on the interval B(center, radius).
    GaussianAtom {
        center: f64,
        radius: f64,
    },
    /// Lebesgue Haar function 1_{[lo,mid)} − 1_{[mid,hi)} scaled by `scale`.
    Haar {
        lo: f64,
        hi: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed function spec: {e}")))
    }

    pub fn resolve(&self) -> Result<Func> {
        if self.dim == 0 {
            return invalid("dim must be positive");
        }
        match &self.body {
            SpecBody::Step { breaks, values } => {
                self.require_dim(1)?;
                Ok(Func::Step(StepFunction1D::new(breaks.clone(), values.clone())?))
            }
            SpecBody::Boxsum { terms } => {
                let terms = terms
                    .iter()
                    .map(|t| Ok((AxisBox::new(t.lo.clone(), t.hi.clone())?, t.coeff)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Func::BoxSum(BoxSumFunctionND::new(self.dim, terms)?))
            }
            SpecBody::Named(named) => self.resolve_named(named),
        }
    }

    fn require_dim(&self, n: usize) -> Result<()> {
        if self.dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.dim });
        }
        Ok(())
    }

    fn resolve_named(&self, named: &NamedFunction) -> Result<Func> {
        match named {
            NamedFunction::Constant { value } => Ok(Func::constant(self.dim, *value)),
            NamedFunction::Indicator { lo, hi, value } => {
                let b = AxisBox::new(lo.clone(), hi.clone())?;
                if b.dim() != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: b.dim() });
                }
                if self.dim == 1 {
                    return Ok(Func::Step(StepFunction1D::new(vec![lo[0], hi[0]], vec![*value])?));
                }
                Ok(Func::BoxSum(BoxSumFunctionND::new(self.dim, vec![(b, *value)])?))
            }
            NamedFunction::ChargePair { c_exponent, terms, a, a_prime, c } => {
                self.require_dim(1)?;
                let spec = match (a, a_prime, c) {
                    (Some(a), Some(ap), Some(c)) => ChargePairSpec::new(a.clone(), ap.clone(), c.clone())?,
                    (None, None, None) => ChargePairSpec::standard(c_exponent.unwrap_or(3.0), *terms)?,
                    _ => return invalid("custom charge-pair sequences need a, a_prime and c together"),
                };
                Ok(Func::Step(charge_pair_function(&spec)?))
            }
            NamedFunction::GaussianAtom { center, radius } => {
                self.require_dim(1)?;
                Ok(Func::Step(two_sided_atom(*center, *radius)?))
            }
            NamedFunction::Haar { lo, hi, scale } => {
                self.require_dim(1)?;
                if !(hi > lo) {
                    return invalid("haar needs lo < hi");
                }
                let mid = 0.5 * (lo + hi);
                Ok(Func::Step(StepFunction1D::new(vec![*lo, mid, *hi], vec![*scale, -scale])?))
            }
        }
    }

    /// Spec for a represented function (grid functions become box sums).
    pub fn from_func(f: &Func) -> FunctionSpec {
        match f {
            Func::Step(s) => FunctionSpec {
                dim: 1,
                body: SpecBody::Step { breaks: s.breaks().to_vec(), values: s.values().to_vec() },
            },
            other => {
                let b = other.to_boxsum();
                FunctionSpec {
                    dim: b.dim(),
                    body: SpecBody::Boxsum {
                        terms: b
                            .terms()
                            .iter()
                            .map(|(bx, c)| BoxTerm { lo: bx.lo.clone(), hi: bx.hi.clone(), coeff: *c })
                            .collect(),
                    },
                }
            }
        }
    }
}
