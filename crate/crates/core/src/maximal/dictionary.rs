use serde::Serialize;

use crate::error::{invalid, Result};

/// Maximum of |d/dv (1 − v²)²| on [−1, 1], attained at v = 1/√3.
const BUMP_SLOPE: f64 = 1.539_600_717_839_002;

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    /// Polynomial coefficients in u, lowest degree first.
    coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// ∫_lo^s of the polynomial.
    fn integral_to(&self, s: f64) -> f64 {
        let prim = |u: f64| {
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, c)| acc * u + c / (k + 1) as f64)
                * u
        };
        prim(s) - prim(self.lo)
    }
}

/// A piecewise polynomial profile on [−1, 1] with |p| <= sup and
/// Lipschitz constant `lipschitz`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    pieces: Vec<Piece>,
    /// ∫_{−1}^{lo_k} p for every piece.
    cumulative: Vec<f64>,
    pub total: f64,
    pub lipschitz: f64,
    pub sup: f64,
}

impl Profile1D {
    fn new(pieces: Vec<Piece>, lipschitz: f64, sup: f64) -> Self {
        let mut cumulative = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for p in &pieces {
            cumulative.push(acc);
            acc += p.integral_to(p.hi);
        }
        Profile1D { pieces, cumulative, total: acc, lipschitz, sup }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.pieces.iter().find(|p| p.lo <= u && u <= p.hi).map_or(0.0, |p| p.eval(u))
    }

    /// P(s) = ∫_{−1}^{s} p, constant outside the support.
    pub fn primitive(&self, s: f64) -> f64 {
        let first = &self.pieces[0];
        if s <= first.lo {
            return 0.0;
        }
        let last = &self.pieces[self.pieces.len() - 1];
        if s >= last.hi {
            return self.total;
        }
        let k = self.pieces.partition_point(|p| p.hi < s).min(self.pieces.len() - 1);
        let p = &self.pieces[k];
        if s <= p.lo {
            return self.cumulative[k];
        }
        self.cumulative[k] + p.integral_to(s)
    }

    /// (1 − |u|)₊.
    pub fn tent() -> Self {
        Self::new(
            vec![Piece { lo: -1.0, hi: 0.0, coeffs: vec![1.0, 1.0] }, Piece { lo: 0.0, hi: 1.0, coeffs: vec![1.0, -1.0] }],
            1.0,
            1.0,
        )
    }

    /// min(h, 1 − |u|)₊.
    pub fn trapezoid(h: f64) -> Self {
        let k = 1.0 - h;
        Self::new(
            vec![
                Piece { lo: -1.0, hi: -k, coeffs: vec![1.0, 1.0] },
                Piece { lo: -k, hi: k, coeffs: vec![h] },
                Piece { lo: k, hi: 1.0, coeffs: vec![1.0, -1.0] },
            ],
            1.0,
            h,
        )
    }

    /// c (1 − (u/w)²)² on |u| <= w with c = min(1, w / max slope).
    pub fn bump(w: f64) -> Self {
        let c = (w / BUMP_SLOPE).min(1.0);
        let (w2, w4) = (w * w, w * w * w * w);
        Self::new(
            vec![Piece { lo: -w, hi: w, coeffs: vec![c, 0.0, -2.0 * c / w2, 0.0, c / w4] }],
            c * BUMP_SLOPE / w,
            c,
        )
    }

    /// c (u/w)(1 − (u/w)²)² on |u| <= w with c = min(1, w); odd, mean zero.
    pub fn odd(w: f64) -> Self {
        let c = w.min(1.0);
        let (w1, w3, w5) = (w, w.powi(3), w.powi(5));
        Self::new(
            vec![Piece { lo: -w, hi: w, coeffs: vec![0.0, c / w1, 0.0, -2.0 * c / w3, 0.0, c / w5] }],
            c / w,
            c * 0.286_216_701_100_381_8,
        )
    }

    /// (bump(w) ± odd(w)) / 2: the bump with its first moment shifted.
    pub fn skewed(w: f64, sign: f64) -> Self {
        let b = Self::bump(w);
        let o = Self::odd(w);
        let coeffs: Vec<f64> = (0..6)
            .map(|k| 0.5 * (b.pieces[0].coeffs.get(k).copied().unwrap_or(0.0) + sign * o.pieces[0].coeffs[k]))
            .collect();
        Self::new(
            vec![Piece { lo: -w, hi: w, coeffs }],
            0.5 * (b.lipschitz + o.lipschitz),
            0.5 * (b.sup + o.sup),
        )
    }
}

/// A test function φ(x) = κ Π_d p(√n x_d), supported in the cube of
/// half-side 1/√n inscribed in B(0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub axis: Profile1D,
    pub kappa: f64,
}

impl Profile {
    fn new(name: String, axis: Profile1D, dim: usize) -> Self {
        let n = dim as f64;
        // |∇φ| <= κ n Lip(p) sup(p)^{n−1} and |φ| <= κ sup(p)^n
        let grad = n * axis.lipschitz * axis.sup.powi(dim as i32 - 1);
        let kappa = (1.0 / grad).min(1.0 / axis.sup.powi(dim as i32)).min(1.0);
        Profile { name, axis, kappa }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = (x.len() as f64).sqrt();
        self.kappa * x.iter().map(|v| self.axis.eval(v * s)).product::<f64>()
    }
}

/// A finite family of test functions; sup over it gives a lower bound for
/// the grand maximal function.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    pub dim: usize,
    pub profiles: Vec<Profile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DictionarySummary {
    pub dim: usize,
    pub names: Vec<String>,
}

impl Dictionary {
    pub fn from_profiles(dim: usize, axes: Vec<(String, Profile1D)>) -> Result<Self> {
        if axes.is_empty() {
            return invalid("the test-function dictionary is empty");
        }
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        let profiles = axes.into_iter().map(|(name, p)| Profile::new(name, p, dim)).collect();
        Ok(Dictionary { dim, profiles })
    }

    fn standard_axes() -> Vec<(String, Profile1D)> {
        let mut v = vec![("tent".to_string(), Profile1D::tent()), ("trapezoid-0.5".to_string(), Profile1D::trapezoid(0.5))];
        for w in [1.0, 0.5, 0.25] {
            v.push((format!("bump-{w}"), Profile1D::bump(w)));
            v.push((format!("odd-{w}"), Profile1D::odd(w)));
            v.push((format!("skew+-{w}"), Profile1D::skewed(w, 1.0)));
            v.push((format!("skew--{w}"), Profile1D::skewed(w, -1.0)));
        }
        v
    }

    /// Tent, one trapezoid, three bumps and their odd and skewed variants.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::from_profiles(dim, Self::standard_axes())
    }

    pub fn tent_only(dim: usize) -> Result<Self> {
        Self::from_profiles(dim, vec![("tent".to_string(), Profile1D::tent())])
    }

    /// The standard dictionary plus extra trapezoids and bumps, `size`
    /// profiles in total (at least the standard size).
    pub fn enriched(dim: usize, size: usize) -> Result<Self> {
        let mut axes = Self::standard_axes();
        let mut k = 0;
        while axes.len() < size {
            let w = 0.95 - 0.05 * (k / 5) as f64;
            let h = 0.1 + 0.05 * (k % 15) as f64;
            match k % 5 {
                0 => axes.push((format!("bump-{w:.2}"), Profile1D::bump(w))),
                1 => axes.push((format!("skew+-{w:.2}"), Profile1D::skewed(w, 1.0))),
                2 => axes.push((format!("skew--{w:.2}"), Profile1D::skewed(w, -1.0))),
                3 => axes.push((format!("odd-{w:.2}"), Profile1D::odd(w))),
                _ => axes.push((format!("trapezoid-{h:.2}"), Profile1D::trapezoid(h.min(0.95)))),
            }
            k += 1;
        }
        Self::from_profiles(dim, axes)
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn summary(&self) -> DictionarySummary {
        DictionarySummary { dim: self.dim, names: self.profiles.iter().map(|p| p.name.clone()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_match_quadrature() {
        for (_, p) in Dictionary::standard_axes() {
            let n = 20000;
            let mut acc = 0.0;
            for i in 0..n {
                let u = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
                acc += p.eval(u) * 2.0 / n as f64;
                let s = -1.0 + 2.0 * (i + 1) as f64 / n as f64;
                if i % 997 == 0 {
                    assert!((p.primitive(s) - acc).abs() < 1e-6);
                }
            }
            assert!((p.total - acc).abs() < 1e-6);
        }
        assert!((Profile1D::tent().total - 1.0).abs() < 1e-15);
        assert!(Profile1D::odd(0.5).total.abs() < 1e-15);
    }

    #[test]
    fn profiles_satisfy_test_function_bounds() {
        for dim in 1..=3 {
            let d = Dictionary::enriched(dim, 50).unwrap();
            assert_eq!(d.len(), 50);
            for p in &d.profiles {
                // sample sup and difference quotients along every axis
                let h = 1e-4;
                let mut x = vec![0.0; dim];
                for i in 0..400 {
                    let s = -1.0 + 2.0 * (i as f64 + 0.5) / 400.0;
                    for (k, v) in x.iter_mut().enumerate() {
                        *v = s * if k == 0 { 1.0 } else { 0.37 } / (dim as f64).sqrt();
                    }
                    assert!(p.eval(&x).abs() <= 1.0 + 1e-12, "{}", p.name);
                    let mut grad2 = 0.0;
                    for k in 0..dim {
                        let mut y = x.clone();
                        y[k] += h;
                        grad2 += ((p.eval(&y) - p.eval(&x)) / h).powi(2);
                    }
                    assert!(grad2.sqrt() <= 1.0 + 1e-3, "{} grad {}", p.name, grad2.sqrt());
                }
                // support inside the unit ball
                let far = vec![1.0 / (dim as f64).sqrt() + 1e-9; dim];
                assert_eq!(p.eval(&far), 0.0);
            }
        }
    }

    #[test]
    fn empty_dictionary_rejected() {
        assert!(Dictionary::from_profiles(1, vec![]).is_err());
    }
}
