//! Special functions used by the measure computations.
//!
//! `erf`/`erfc` come from `libm` (a port of the FreeBSD msun routines,
//! accurate to about one ulp). The scaled complementary error function
//! and the regularized lower incomplete gamma function are built on top.

use std::f64::consts::PI;

pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// exp(x^2) * erfc(x), valid for all finite x >= -26.
pub fn erfcx(x: f64) -> f64 {
    if x < 12.0 {
        // x^2 = hi + lo exactly, so the exponential does not amplify the
        // rounding of the square.
        let hi = x * x;
        let lo = x.mul_add(x, -hi);
        erfc(x) * hi.exp() * lo.exp()
    } else {
        // Asymptotic series; at x >= 12 the truncation error is far below
        // one ulp.
        let z = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..11 {
            term *= -((2 * k - 1) as f64) * z;
            sum += term;
        }
        sum / (x * PI.sqrt())
    }
}

/// ln Γ(x) for x > 0.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// Regularized lower incomplete gamma P(a, x) for half-integer or integer
/// `a = m/2`, m >= 1, evaluated for a whole ladder `a, a+1, a+2, ...`.
///
/// Returns `P(a0 + j, x)` for `j = 0..count`. Uses the upward recursion
/// `P(a+1, x) = P(a, x) - x^a e^{-x} / Γ(a+1)` starting from closed forms
/// at `a0 = 1/2` (erf) or `a0 = 1`, so the absolute error stays at the
/// level of the base evaluation.
pub fn lower_gamma_ladder(half_order: u32, x: f64, count: usize) -> Vec<f64> {
    assert!(half_order >= 1, "order must be positive");
    assert!(x >= 0.0);
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    // base a = 1/2 or 1
    let (mut a, mut p) = if half_order % 2 == 1 {
        (0.5, erf(x.sqrt()))
    } else {
        (1.0, -(-x).exp_m1())
    };
    let target = half_order as f64 / 2.0;
    let ln_x = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let step = |a: f64, p: f64| -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let ln_term = a * ln_x - x - ln_gamma(a + 1.0);
        (p - ln_term.exp()).max(0.0)
    };
    while a < target - 1e-9 {
        p = step(a, p);
        a += 1.0;
    }
    out.push(p);
    for _ in 1..count {
        p = step(a, p);
        a += 1.0;
        out.push(p);
    }
    out
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
    use super::*;

    #[test]
    fn erfcx_matches_direct_product_in_overlap() {
        for &x in &[0.0, 0.5, 3.0, 10.0, 11.9] {
            let direct = erfc(x) * (x * x).exp();
            assert!((erfcx(x) - direct).abs() <= 1e-13 * direct, "x={x}");
        }
        // continuity across the switch
        let left = erfcx(12.0 - 1e-12);
        let right = erfcx(12.0);
        assert!((left - right).abs() < 1e-12 * right);
    }

    #[test]
    fn gamma_ladder_closed_forms() {
        // P(1, x) = 1 - e^{-x}; P(2, x) = 1 - e^{-x}(1 + x)
        let x = 1.7;
        let p = lower_gamma_ladder(2, x, 2);
        assert!((p[0] - (1.0 - (-x).exp())).abs() < 1e-15);
        assert!((p[1] - (1.0 - (-x).exp() * (1.0 + x))).abs() < 1e-15);
        // P(3/2, x) = erf(sqrt x) - 2 sqrt(x/pi) e^{-x}
        let q = lower_gamma_ladder(3, x, 1);
        let expect = erf(x.sqrt()) - 2.0 * (x / PI).sqrt() * (-x).exp();
        assert!((q[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn gamma_ladder_monotone_decreasing_in_order() {
        let p = lower_gamma_ladder(1, 4.0, 40);
        assert!(p.windows(2).all(|w| w[1] <= w[0]));
        assert!(p[39] < 1e-12);
    }
}
