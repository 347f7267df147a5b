//! Brute-force quadrature used as an independent check on the library.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn density_1d(x: f64) -> f64 {
    (-x * x).exp() / PI.sqrt()
}

/// γ₁([a, b]) by composite Simpson.
pub fn mass_1d(a: f64, b: f64) -> f64 {
    simpson(density_1d, a, b, 20_000)
}

/// Total mass of γ in n dimensions as a product of 1D rules on [−12, 12].
pub fn total_mass(n: usize) -> f64 {
    mass_1d(-12.0, 12.0).powi(n as i32)
}

/// ∫|x|² dγ in n dimensions.
pub fn second_moment(n: usize) -> f64 {
    n as f64 * simpson(|x| x * x * density_1d(x), -12.0, 12.0, 20_000)
}

/// ∫₀^∞ x (|∫_x^∞ f dγ| + |∫_{−∞}^{−x} f dγ|) dx for f ≡ 1, by nested Simpson.
pub fn e_of_one() -> f64 {
    let tail = |x: f64| simpson(density_1d, x, x + 12.0, 4_000);
    2.0 * simpson(|x| x * tail(x), 0.0, 10.0, 4_000)
}

/// Sample points spread over [a, b] for pointwise comparisons.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}
