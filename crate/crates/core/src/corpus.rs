//! Test-function generators: the charge-pair family and seeded random corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atoms::GaussianAtom;
use crate::error::{invalid, Result};
use crate::func_repr::{BoxSumFunctionND, Func, StepFunction1D};
use crate::geometry::{maximal_radius, Ball};
use crate::measure::{ball_gauss_measure, interval_mass, AxisBox};

/// Sequences a_n < a_n' and weights c_n of the charge-pair example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargePairSpec {
    pub a: Vec<f64>,
    pub a_prime: Vec<f64>,
    pub c: Vec<f64>,
}

impl ChargePairSpec {
    pub fn new(a: Vec<f64>, a_prime: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let spec = ChargePairSpec { a, a_prime, c };
        spec.check()?;
        Ok(spec)
    }

    /// a_n = 3(n+1), a_n' = a_n + 1, c_n = n^{-p}, n = 1..=terms.
    pub fn standard(c_exponent: f64, terms: usize) -> Result<Self> {
        Self::new(
            (1..=terms).map(standard_a).collect(),
            (1..=terms).map(|n| standard_a(n) + 1.0).collect(),
            (1..=terms).map(|n| (n as f64).powf(-c_exponent)).collect(),
        )
    }

    pub fn terms(&self) -> usize {
        self.a.len()
    }

    /// First violated constraint, if any.
    pub fn check(&self) -> Result<()> {
        let n = self.a.len();
        if self.a_prime.len() != n || self.c.len() != n {
            return invalid("a, a_prime and c must have the same length");
        }
        if n == 0 {
            return invalid("a charge pair needs at least one term");
        }
        for i in 0..n {
            let (a, ap, c) = (self.a[i], self.a_prime[i], self.c[i]);
            let k = i + 1;
            if !(c > 0.0) || !c.is_finite() {
                return invalid(format!("c_{k} = {c} must be positive"));
            }
            if !(a > 2.0) {
                return invalid(format!("a_{k} = {a} must exceed 2"));
            }
            if !(a + 2.0 / a < ap) {
                return invalid(format!("a_{k} + 2/a_{k} < a'_{k} fails ({a}, {ap})"));
            }
            if i + 1 < n {
                let next = self.a[i + 1];
                if !(ap + 2.0 / ap < next) {
                    return invalid(format!("a'_{k} + 2/a'_{k} < a_{} fails ({ap}, {next})", k + 1));
                }
                if !(next < 2.0 * a) {
                    return invalid(format!("a_{} < 2 a_{k} fails ({next}, {a})", k + 1));
                }
            }
        }
        Ok(())
    }

    /// (positive interval, negative interval) of pair n (0-based).
    pub fn pair_intervals(&self, i: usize) -> ((f64, f64), (f64, f64)) {
        let (a, ap) = (self.a[i], self.a_prime[i]);
        ((a, a + 1.0 / a), (ap, ap + 1.0 / ap))
    }
}

pub(crate) fn standard_a(n: usize) -> f64 {
    3.0 * (n as f64 + 1.0)
}

/// f = Σ c_n (1_{I_n}/γ(I_n) − 1_{I_n'}/γ(I_n')).
pub fn charge_pair_function(spec: &ChargePairSpec) -> Result<StepFunction1D> {
    spec.check()?;
    let mut breaks = Vec::with_capacity(4 * spec.terms());
    let mut values = Vec::with_capacity(4 * spec.terms());
    for i in 0..spec.terms() {
        let ((p0, p1), (q0, q1)) = spec.pair_intervals(i);
        let (mp, mq) = (interval_mass(p0, p1), interval_mass(q0, q1));
        let (vp, vq) = (spec.c[i] / mp, spec.c[i] / mq);
        if !(vp.is_finite() && vq.is_finite()) {
            return invalid(format!(
                "pair {} at x ≈ {p0:.2} is beyond the range where 1/γ(I) is representable in f64",
                i + 1
            ));
        }
        for (lo, hi, v) in [(p0, p1, vp), (q0, q1, -vq)] {
            if breaks.last() != Some(&lo) {
                if !breaks.is_empty() {
                    values.push(0.0);
                }
                breaks.push(lo);
            }
            values.push(v);
            breaks.push(hi);
        }
    }
    StepFunction1D::new(breaks, values)
}

/// The two-valued atom α 1_{[c−r,c)} − β 1_{[c,c+r)} with γ-mean zero and
/// max(α, β) = 1/γ(B).
pub fn two_sided_atom(center: f64, radius: f64) -> Result<StepFunction1D> {
    let ball = Ball::interval(center, radius)?;
    let k = 1.0 / ball_gauss_measure(&ball)?;
    let (ml, mr) = (interval_mass(center - radius, center), interval_mass(center, center + radius));
    let (alpha, beta) = if ml <= mr { (k, k * ml / mr) } else { (k * mr / ml, k) };
    StepFunction1D::new(vec![center - radius, center, center + radius], vec![alpha, -beta])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Atoms,
    Lp,
    Haar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub count: usize,
    pub dim: usize,
    /// Target exponent: r of the atoms, or p of the unit-norm functions.
    pub exponent: f64,
    /// Largest |centre| of the random balls.
    pub max_center: f64,
    pub nonnegative: bool,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams { count: 100, dim: 1, exponent: 2.0, max_center: 6.0, nonnegative: false }
    }
}

pub fn random_admissible_interval(rng: &mut impl Rng, max_center: f64) -> Ball {
    let c = rng.gen_range(-max_center..=max_center);
    let r = maximal_radius(c.abs()) * rng.gen_range(0.1..=1.0);
    Ball::interval(c, r).expect("positive radius")
}

/// Random mean-zero step atom on `ball` with ‖a‖_r = γ(B)^{1/r − 1}.
pub fn random_step_atom(rng: &mut impl Rng, ball: &Ball, exponent: f64) -> Result<GaussianAtom> {
    let (c, r) = (ball.center.0[0], ball.radius);
    let pieces = rng.gen_range(2..=8usize);
    let breaks: Vec<f64> = (0..=pieces)
        .map(|i| if i == pieces { c + r } else { c - r + 2.0 * r * i as f64 / pieces as f64 })
        .collect();
    let raw: Vec<f64> = (0..pieces).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = StepFunction1D::new(breaks, raw)?;
    let mass: f64 = f.cells().map(|(a, b, _)| interval_mass(a, b)).sum();
    let f = f.map(|v| v - f.integrate_gauss() / mass);
    let norm = f.lp_norm_gauss(exponent);
    if norm == 0.0 {
        return random_step_atom(rng, ball, exponent);
    }
    let g = ball_gauss_measure(ball)?;
    let target = if exponent.is_infinite() { 1.0 / g } else { g.powf(1.0 / exponent - 1.0) };
    let a = f.scale(target / norm);
    Ok(GaussianAtom::ball_supported(Func::Step(a), ball.clone(), exponent, 1.0))
}

/// Seeded random Gaussian atoms on random admissible intervals.
pub fn random_atoms(seed: u64, count: usize, exponent: f64, max_center: f64) -> Result<Vec<GaussianAtom>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let ball = random_admissible_interval(&mut rng, max_center);
            random_step_atom(&mut rng, &ball, exponent)
        })
        .collect()
}

/// Σ over dyadic subintervals I of a random admissible interval, down to
/// three levels, of random multiples of the Lebesgue Haar function of I.
fn haar_tree(rng: &mut impl Rng, max_center: f64) -> Result<StepFunction1D> {
    let ball = random_admissible_interval(rng, max_center);
    let (lo, hi) = (ball.center.0[0] - ball.radius, ball.center.0[0] + ball.radius);
    let mut f = StepFunction1D::zero();
    for level in 0..3 {
        let count = 1usize << level;
        let len = (hi - lo) / count as f64;
        for i in 0..count {
            let a = lo + len * i as f64;
            let coeff = rng.gen_range(-1.0..1.0) / (hi - lo);
            let h = StepFunction1D::new(vec![a, a + 0.5 * len, a + len], vec![coeff, -coeff])?;
            f = f.add(&h);
        }
    }
    Ok(f.canonical())
}

fn random_lp(rng: &mut impl Rng, params: &CorpusParams) -> Result<Func> {
    let sign = |_: &mut ChaCha8Rng, v: f64| if params.nonnegative { v.abs() } else { v };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let f = if params.dim == 1 {
        let pieces = local.gen_range(3..=10usize);
        let mut breaks: Vec<f64> = (0..=pieces).map(|_| local.gen_range(-3.0..3.0)).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let values: Vec<f64> = (1..breaks.len()).map(|_| {
            let v = local.gen_range(-2.0..2.0);
            sign(&mut local, v)
        }).collect();
        Func::Step(StepFunction1D::new(breaks, values)?)
    } else {
        let n = params.dim;
        let boxes = local.gen_range(1..=5usize);
        let mut terms = Vec::with_capacity(boxes);
        for _ in 0..boxes {
            // corners on the 1/8 lattice keep the cell structure simple
            let lo: Vec<f64> = (0..n).map(|_| (local.gen_range(-16..12) as f64) / 8.0).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + local.gen_range(2..12) as f64 / 8.0).collect();
            let v = local.gen_range(-2.0..2.0);
            terms.push((AxisBox::new(lo, hi)?, sign(&mut local, v)));
        }
        Func::BoxSum(BoxSumFunctionND::new(n, terms)?)
    };
    let norm = f.lp_norm_gauss(params.exponent);
    if norm == 0.0 {
        return random_lp(rng, params);
    }
    Ok(f.scale(1.0 / norm))
}

/// Deterministic corpus for a given seed.
pub fn random_corpus(seed: u64, kind: CorpusKind, params: &CorpusParams) -> Result<Vec<Func>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        CorpusKind::Atoms => {
            if params.dim != 1 {
                return invalid("random atoms are generated in one dimension");
            }
            Ok(random_atoms(seed, params.count, params.exponent, params.max_center)?
                .into_iter()
                .map(|a| a.payload)
                .collect())
        }
        CorpusKind::Lp => (0..params.count).map(|_| random_lp(&mut rng, params)).collect(),
        CorpusKind::Haar => {
            if params.dim != 1 {
                return invalid("Haar trees are generated in one dimension");
            }
            (0..params.count).map(|_| haar_tree(&mut rng, params.max_center).map(Func::Step)).collect()
        }
    }
}

/// Largest number of charge pairs with an exact f64 step representation.
pub const REPRESENTABLE_PAIRS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    /// Both series saturate.
    CandidateMember,
    /// Σc_n saturates, Σc_n a_n(a_n' − a_n) does not: M̂_loc f ∈ L¹ but E = ∞.
    MaximalOnly,
    /// Σc_n does not saturate.
    NeitherSaturates,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub terms: Vec<usize>,
    /// Partial sums of c_n.
    pub coefficient_sums: Vec<f64>,
    /// Partial sums of c_n a_n (a_n' − a_n).
    pub moment_sums: Vec<f64>,
    pub coefficient_growth: f64,
    pub moment_growth: f64,
    pub classification: Dichotomy,
    /// E flagged divergent on the representable truncation.
    pub e_flag_divergent: Option<bool>,
    /// ‖M̂_loc f_N‖₁ for the representable truncations N = 3, 5, 7.
    pub maximal_norms: Vec<(usize, f64)>,
    pub maximal_saturates: Option<bool>,
}

/// Partial sums at N = 4, 8, 16, ... up to the number of terms, classified by
/// the growth at the last doubling, and cross-checked against E and the
/// maximal norm on the truncations that f64 can represent.
pub fn dichotomy_report(spec: &ChargePairSpec, with_maximal: bool) -> Result<DichotomyReport> {
    spec.check()?;
    let mut terms = Vec::new();
    let mut n = 4;
    while n <= spec.terms() {
        terms.push(n);
        n *= 2;
    }
    if terms.len() < 2 {
        return invalid("the dichotomy needs at least 8 terms");
    }
    let partial = |n: usize, f: &dyn Fn(usize) -> f64| (0..n).map(f).sum::<f64>();
    let coefficient_sums: Vec<f64> = terms.iter().map(|&n| partial(n, &|i| spec.c[i])).collect();
    let moment_sums: Vec<f64> =
        terms.iter().map(|&n| partial(n, &|i| spec.c[i] * spec.a[i] * (spec.a_prime[i] - spec.a[i]))).collect();
    let growth = |v: &[f64]| crate::functionals::relative_growth(v[v.len() - 2], v[v.len() - 1]);
    let coefficient_growth = growth(&coefficient_sums);
    let moment_growth = growth(&moment_sums);
    let limit = crate::functionals::GROWTH_THRESHOLD;
    let classification = if coefficient_growth > limit {
        Dichotomy::NeitherSaturates
    } else if moment_growth > limit {
        Dichotomy::MaximalOnly
    } else {
        Dichotomy::CandidateMember
    };
    let head = |n: usize| -> Result<ChargePairSpec> {
        ChargePairSpec::new(spec.a[..n].to_vec(), spec.a_prime[..n].to_vec(), spec.c[..n].to_vec())
    };
    let reach = spec.terms().min(REPRESENTABLE_PAIRS);
    let e_flag_divergent = match charge_pair_function(&head(reach)?) {
        Ok(f) => Some(crate::functionals::e_global(&Func::Step(f))?.e_divergent()),
        Err(_) => None,
    };
    let mut maximal_norms = Vec::new();
    if with_maximal {
        for n in [3, 5, 7].into_iter().filter(|&n| n <= reach) {
            if let Ok(f) = charge_pair_function(&head(n)?) {
                maximal_norms.push((n, crate::maximal::local_maximal_norm(&Func::Step(f), 8, 1.0)?));
            }
        }
    }
    let maximal_saturates = (maximal_norms.len() >= 2).then(|| {
        let k = maximal_norms.len();
        crate::functionals::relative_growth(maximal_norms[k - 2].1, maximal_norms[k - 1].1) <= limit
    });
    Ok(DichotomyReport {
        terms,
        coefficient_sums,
        moment_sums,
        coefficient_growth,
        moment_growth,
        classification,
        e_flag_divergent,
        maximal_norms,
        maximal_saturates,
    })
}
