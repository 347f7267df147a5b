//! Verification suites run by `gauss-hardy verify`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::RunConfig;
use crate::atoms::{atomic_norm, validate_gaussian_atom, AtomicDecomposition};
use crate::corpus::{
    charge_pair_function, dichotomy_report, random_atoms, random_corpus, ChargePairSpec, CorpusKind, CorpusParams,
    Dichotomy,
};
use crate::decompose::{build_chain_radii, chain_decompose, decompose, gaussian_atom_expand, DecomposeOptions};
use crate::error::{Error, Result};
use crate::func_repr::Func;
use crate::geometry::{covering_1d, covering_nd, is_admissible, maximal_admissible_ball, whitney_1d, CoveringOptions, Interval};
use crate::measure::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Geometry,
    Atoms,
    Chain,
    Equivalence,
    Corpus,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Atoms => "atoms",
            Suite::Chain => "chain",
            Suite::Equivalence => "equivalence",
            Suite::Corpus => "corpus",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, cases: Vec::new() }
    }

    fn case(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.cases.push(Case { name: name.into(), passed, detail: detail.into() });
    }

    fn outcome(&mut self, name: &str, r: Result<(bool, String)>) {
        match r {
            Ok((p, d)) => self.case(name, p, d),
            Err(e) => self.case(name, false, format!("error: {e}")),
        }
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.passed).count()
    }

    pub fn summary_line(&self) -> String {
        format!("{}: {} cases, {} failed", self.suite.name(), self.cases.len(), self.failures())
    }

    pub fn to_junit(&self) -> String {
        let esc = |s: &str| {
            s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
        };
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out += &format!(
            "<testsuite name=\"{}\" tests=\"{}\" failures=\"{}\">\n",
            self.suite.name(),
            self.cases.len(),
            self.failures()
        );
        for c in &self.cases {
            out += &format!("  <testcase classname=\"{}\" name=\"{}\">", self.suite.name(), esc(&c.name));
            if c.passed {
                out += &format!("<system-out>{}</system-out>", esc(&c.detail));
            } else {
                out += &format!("<failure message=\"{}\"/>", esc(&c.detail));
            }
            out += "</testcase>\n";
        }
        out += "</testsuite>\n";
        out
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(suite);
    match suite {
        Suite::Geometry => geometry(cfg, &mut r),
        Suite::Atoms => atoms(cfg, &mut r),
        Suite::Chain => chain(cfg, &mut r),
        Suite::Equivalence => equivalence(cfg, &mut r),
        Suite::Corpus => corpus(cfg, &mut r),
    }
    Ok(r)
}

fn geometry(cfg: &RunConfig, r: &mut SuiteReport) {
    r.outcome("covering_1d", (|| {
        let (cov, pou) = covering_1d(cfg.extent)?;
        let admissible = cov.balls.iter().all(|b| is_admissible(b, cfg.scale));
        let steps = 4000;
        let mut worst = 0.0f64;
        for i in 0..=steps {
            let x = -cfg.extent + 2.0 * cfg.extent * i as f64 / steps as f64;
            let s: f64 = pou.weights_at(&[x]).iter().map(|(_, w)| w).sum();
            worst = worst.max((s - 1.0).abs());
        }
        Ok((admissible && worst < 1e-12 && cov.overlap_4b <= 16, format!("{} balls, 4B overlap {}, |Ση−1| ≤ {worst:e}", cov.balls.len(), cov.overlap_4b)))
    })());
    r.outcome("covering_2d", (|| {
        let extent = cfg.extent.min(3.0);
        let (cov, _) = covering_nd(extent, 2, &CoveringOptions::default())?;
        let admissible = cov.balls.iter().all(|b| is_admissible(b, cfg.scale));
        Ok((
            admissible && cov.coverage_margin > 0.0,
            format!("{} balls, 4B overlap {}, margin {:.3}", cov.balls.len(), cov.overlap_4b, cov.coverage_margin),
        ))
    })());
    r.outcome("whitney_1d", (|| {
        let omega = [Interval::new(-1.0, 1.0), Interval::new(2.0, 2.5)];
        let w = whitney_1d(&omega, cfg.delta, 1e-6)?;
        let ok_ratio = w.pieces.iter().all(|q| {
            let dist = omega
                .iter()
                .filter(|c| c.lo <= q.lo && q.hi <= c.hi)
                .map(|c| (q.lo - c.lo).min(c.hi - q.hi))
                .fold(f64::INFINITY, f64::min);
            let ratio = q.len() / dist;
            ratio <= cfg.delta * (1.0 + 1e-12) && ratio >= cfg.delta / 4.0 * (1.0 - 1e-12)
        });
        let covered: f64 = w.pieces.iter().chain(&w.boundary).map(|q| q.len()).sum();
        Ok((ok_ratio && (covered - 2.5).abs() < 1e-5, format!("{} pieces, covered length {covered}", w.pieces.len())))
    })());
    r.outcome("support_bound", (|| {
        let atoms = random_atoms(cfg.seed, 20, f64::INFINITY, 6.0)?;
        let dict = crate::maximal::Dictionary::standard(1)?;
        let mut outside = 0usize;
        for a in &atoms {
            let ball = a.ball.as_ref().expect("ball atom");
            let bound = crate::geometry::support_bound(ball)?;
            let (c, rr) = (bound.center.0[0], bound.radius);
            let grid = crate::maximal::EvalGrid::adaptive_1d(c - 2.0 * rr, c + 2.0 * rr, cfg.grid)?;
            let prof = crate::maximal::local_grand_maximal(&a.payload, &grid, &dict, &cfg.maximal_options())?;
            outside += prof.points.iter().zip(&prof.values).filter(|(x, v)| !bound.contains(x) && **v != 0.0).count();
        }
        Ok((outside == 0, format!("{outside} nonzero grid values outside 4-fold bound")))
    })());
}

fn atoms(cfg: &RunConfig, r: &mut SuiteReport) {
    for (label, exponent) in [("infinity", f64::INFINITY), ("two", 2.0)] {
        r.outcome(&format!("random_atoms_r_{label}"), (|| {
            let atoms = random_atoms(cfg.seed, 100, exponent, 6.0)?;
            let bad = atoms.iter().filter(|a| !validate_gaussian_atom(a).valid).count();
            Ok((bad == 0, format!("{} of 100 invalid", bad)))
        })());
    }
    r.outcome("expansion_scale_2", (|| {
        let atoms = random_atoms(cfg.seed.wrapping_add(1), 20, 2.0, 6.0)?;
        let mut bad = 0;
        let mut worst = 0.0f64;
        for a in &atoms {
            let d = gaussian_atom_expand(a)?;
            bad += invalid_terms(&d);
            bad += d.terms.iter().filter(|t| t.atom.scale > 2.0).count();
            worst = worst.max(d.reconstruction_error(10_000, None).max_rel);
        }
        Ok((bad == 0 && worst < 1e-6, format!("{bad} invalid outputs, worst relative residual {worst:e}")))
    })());
}

fn invalid_terms(d: &AtomicDecomposition) -> usize {
    d.terms.iter().filter(|t| !validate_gaussian_atom(&t.atom).valid).count()
}

fn chain(cfg: &RunConfig, r: &mut SuiteReport) {
    let (rho, _) = build_chain_radii(5.0);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    r.case("rho_2", (rho[2] - golden).abs() < 1e-12, format!("ρ₂ = {}", rho[2]));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = String::new();
    let mut ok = true;
    for _ in 0..50 {
        let c: f64 = rng.gen_range(0.0..7.0);
        let (_, n) = build_chain_radii(c);
        if !(n as f64 <= c * c + 1.0 && n <= (c * c).ceil() as usize + 1) {
            ok = false;
            worst = format!("N = {n} at |c| = {c}");
        }
    }
    r.case("length_bound_50_centres", ok, if ok { "N ≤ |c|² + 1 for all".into() } else { worst });
    r.outcome("chain_decompose", (|| {
        let mut bad = 0;
        let mut worst = 0.0f64;
        for c in [0.0, 0.5, 2.0, 3.0, 5.5] {
            let b = maximal_admissible_ball(Point(vec![c]));
            let (lo, hi) = (c - b.radius, c + b.radius);
            let g = Func::Step(crate::func_repr::StepFunction1D::indicator(lo, hi, 1.0));
            let (_, d) = chain_decompose(&g, &b)?;
            bad += invalid_terms(&d);
            worst = worst.max(d.reconstruction_error(10_000, None).max_rel);
        }
        Ok((bad == 0 && worst < 1e-9, format!("{bad} invalid atoms, residual {worst:e}")))
    })());
}

/// (‖M̂_loc f‖₁ + E(f) + ‖f‖₁) / atomic_norm(decompose(f)) on a mixed
/// one-dimensional corpus.
pub fn sandwich_ratios(cfg: &RunConfig, atoms: usize, haar: usize) -> Result<Vec<(String, f64)>> {
    let mut corpus: Vec<(String, Func)> = Vec::new();
    for (i, a) in random_atoms(cfg.seed, atoms, f64::INFINITY, 6.0)?.into_iter().enumerate() {
        corpus.push((format!("atom-{i}"), a.payload));
    }
    let params = CorpusParams { count: haar, ..CorpusParams::default() };
    for (i, f) in random_corpus(cfg.seed, CorpusKind::Haar, &params)?.into_iter().enumerate() {
        corpus.push((format!("haar-{i}"), f));
    }
    corpus.push(("charge-pair-cubic".into(), Func::Step(charge_pair_function(&ChargePairSpec::standard(3.0, 6)?)?)));
    let mut out = Vec::with_capacity(corpus.len());
    for (name, f) in corpus {
        let (d, _) = decompose(&f, &DecomposeOptions::default())?;
        let norm = atomic_norm(&d)?;
        let (report, _) = super::norm_report(&f, cfg)?;
        let top = report["maximal_l1_gauss"].as_f64().unwrap_or(f64::NAN)
            + report["e"].as_f64().unwrap_or(f64::NAN)
            + f.lp_norm_gauss(1.0);
        out.push((name, top / norm));
    }
    Ok(out)
}

fn equivalence(cfg: &RunConfig, r: &mut SuiteReport) {
    r.outcome("sandwich_band", (|| {
        let ratios = sandwich_ratios(cfg, 10, 5)?;
        let lo = ratios.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().map(|(_, v)| *v).fold(0.0, f64::max);
        Ok((lo > 0.0 && hi / lo <= 100.0, format!("{} functions, ratio band [{lo:.4}, {hi:.4}]", ratios.len())))
    })());
    r.outcome("square_charge_pair_refused", (|| {
        let f = Func::Step(charge_pair_function(&ChargePairSpec::standard(2.0, 7)?)?);
        match decompose(&f, &DecomposeOptions::default()) {
            Err(Error::NotInHardySpace(m)) => Ok((true, m)),
            Err(e) => Ok((false, format!("unexpected error {e}"))),
            Ok(_) => Ok((false, "decomposition was produced".into())),
        }
    })());
}

fn corpus(cfg: &RunConfig, r: &mut SuiteReport) {
    for (p, want) in
        [(2.0, Dichotomy::MaximalOnly), (3.0, Dichotomy::CandidateMember), (0.0, Dichotomy::NeitherSaturates)]
    {
        r.outcome(&format!("dichotomy_c_exponent_{p}"), (|| {
            let rep = dichotomy_report(&ChargePairSpec::standard(p, 32)?, true)?;
            Ok((
                rep.classification == want,
                format!(
                    "{:?}: Σc growth {:.3}, Σc·a·(a'−a) growth {:.3}, E divergent {:?}, maximal saturates {:?}",
                    rep.classification, rep.coefficient_growth, rep.moment_growth, rep.e_flag_divergent, rep.maximal_saturates
                ),
            ))
        })());
    }
    r.outcome("lp_unit_norm", (|| {
        let mut worst = 0.0f64;
        for dim in [1, 2] {
            let params = CorpusParams { count: 20, dim, ..CorpusParams::default() };
            for f in random_corpus(cfg.seed, CorpusKind::Lp, &params)? {
                worst = worst.max((f.lp_norm_gauss(2.0) - 1.0).abs());
            }
        }
        Ok((worst < 1e-10, format!("max |‖f‖₂ − 1| = {worst:e}")))
    })());
    r.outcome("deterministic", (|| {
        let params = CorpusParams { count: 10, ..CorpusParams::default() };
        let a = random_corpus(cfg.seed, CorpusKind::Haar, &params)?;
        let b = random_corpus(cfg.seed, CorpusKind::Haar, &params)?;
        let same = a.iter().zip(&b).all(|(x, y)| format!("{x:?}") == format!("{y:?}"));
        Ok((same, "two generations compared".into()))
    })());
}
