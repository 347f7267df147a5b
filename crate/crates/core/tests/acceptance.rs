//! One line per acceptance criterion; the test fails if any line says FAIL.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use gauss_hardy::atoms::{atomic_norm, validate_gaussian_atom, validate_lebesgue_atom, AtomicDecomposition};
use gauss_hardy::corpus::{
    charge_pair_function, dichotomy_report, random_atoms, random_corpus, ChargePairSpec, CorpusKind, CorpusParams,
};
use gauss_hardy::decompose::{
    build_chain_radii, chain_decompose, cz_lebesgue_1d, decompose, gaussian_atom_expand, DecomposeOptions,
};
use gauss_hardy::error::Error;
use gauss_hardy::func_repr::{BoxSumFunctionND, Func, StepFunction1D};
use gauss_hardy::functionals::{e_global, e_plus, pairing_min_square};
use gauss_hardy::geometry::{maximal_admissible_ball, support_bound, Ball};
use gauss_hardy::maximal::{local_grand_maximal, local_maximal_norm, Dictionary, EvalGrid, MaximalOptions};
use gauss_hardy::measure::{box_gauss_measure, AxisBox, Point, CLIP};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SEED: u64 = 20_240_611;
/// Empirical constant for the bounded-ratio criteria.
const C_EMP: f64 = 25.0;

fn decomposed(f: &Func) -> Result<AtomicDecomposition, Error> {
    decompose(f, &DecomposeOptions::default()).map(|(d, _)| d)
}

fn mixed_corpus() -> Vec<Func> {
    let mut out: Vec<Func> = Vec::new();
    let p = |count, dim| CorpusParams { count, dim, ..CorpusParams::default() };
    out.extend(random_corpus(SEED, CorpusKind::Atoms, &p(12, 1)).unwrap());
    out.extend(random_corpus(SEED, CorpusKind::Haar, &p(6, 1)).unwrap());
    out.extend(random_corpus(SEED, CorpusKind::Lp, &p(6, 1)).unwrap());
    out.extend(random_corpus(SEED, CorpusKind::Lp, &p(4, 2)).unwrap());
    out.extend(random_corpus(SEED, CorpusKind::Lp, &p(1, 3)).unwrap());
    out.push(Func::Step(charge_pair_function(&ChargePairSpec::standard(3.0, 7).unwrap()).unwrap()));
    out.push(Func::constant(1, 1.0));
    out.push(Func::constant(2, -0.5));
    out
}

fn atom_validity() -> Outcome {
    let start = Instant::now();
    let mut total = 0usize;
    let mut bad = Vec::new();
    let mut tally = |label: &str, d: &AtomicDecomposition| {
        for t in &d.terms {
            total += 1;
            let r = validate_gaussian_atom(&t.atom);
            if !r.valid {
                bad.push(format!("{label}: slack {:e}", r.min_slack()));
            }
        }
    };
    for (i, f) in mixed_corpus().iter().enumerate() {
        tally(&format!("decompose #{i}"), &decomposed(f).map_err(|e| e.to_string())?);
    }
    for a in random_atoms(SEED, 20, 2.0, 6.0).unwrap() {
        tally("expand", &gaussian_atom_expand(&a).map_err(|e| e.to_string())?);
    }
    for c in [0.0, 1.5, 4.0, 6.5] {
        let b = maximal_admissible_ball(Point(vec![c]));
        let g = Func::Step(StepFunction1D::indicator(c - b.radius, c + b.radius, 2.0));
        let (_, d) = chain_decompose(&g, &b).map_err(|e| e.to_string())?;
        tally("chain", &d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut lebesgue = 0usize;
    for _ in 0..20 {
        let c: f64 = rng.gen_range(-5.0..5.0);
        let r: f64 = rng.gen_range(0.1..2.0);
        let mut breaks: Vec<f64> = (0..5).map(|_| rng.gen_range(c - r..c + r)).collect();
        breaks.push(c - r);
        breaks.push(c + r);
        breaks.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = (1..breaks.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mean: f64 = values.iter().zip(breaks.windows(2)).map(|(v, w)| v * (w[1] - w[0])).sum::<f64>() / (2.0 * r);
        values.iter_mut().for_each(|v| *v -= mean);
        let g = StepFunction1D::new(breaks, values).unwrap();
        let ball = Ball::interval(c, r * (1.0 + 1e-12)).unwrap();
        for (_, a) in cz_lebesgue_1d(&g, &ball).map_err(|e| e.to_string())? {
            lebesgue += 1;
            if !validate_lebesgue_atom(&a).valid {
                bad.push("lebesgue".into());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("{} gaussian + {lebesgue} lebesgue atoms, {} invalid, {secs:.1}s", total, bad.len());
    if bad.is_empty() && secs < 60.0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {:?}", bad.first()))
    }
}

fn reconstruction() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for f in mixed_corpus() {
        let d = decomposed(&f).map_err(|e| e.to_string())?;
        let err = if f.dim() == 1 {
            d.reconstruction_error(10_000, None)
        } else {
            let region = clipped_support(&f);
            d.reconstruction_error(64, Some(&region))
        };
        worst = worst.max(err.max_rel);
        count += 1;
    }
    let detail = format!("{count} decompositions, worst sup error {worst:e} relative to max(1, ‖f‖∞)");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn clipped_support(f: &Func) -> AxisBox {
    let s = f.support().unwrap();
    let lo = s.lo.iter().map(|v| v.max(-4.0)).collect();
    let hi = s.hi.iter().map(|v| v.min(4.0)).collect();
    AxisBox::new(lo, hi).unwrap()
}

fn chain_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = String::new();
    for _ in 0..50 {
        let c: f64 = rng.gen_range(0.0..=7.0);
        let (_, n) = build_chain_radii(c);
        if n as f64 > c * c + 1.0 {
            worst = format!("N = {n} at |c| = {c}");
        }
    }
    let (rho, _) = build_chain_radii(6.0);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let gap = (rho[2] - golden).abs();
    let detail = format!("50 centres within N ≤ |c|² + 1, |ρ₂ − φ| = {gap:e}");
    if worst.is_empty() && gap <= 1e-12 {
        Ok(detail)
    } else {
        Err(format!("{detail}; {worst}"))
    }
}

fn atoms_maximal() -> Outcome {
    let mut atoms = random_atoms(SEED, 100, f64::INFINITY, 6.0).unwrap();
    atoms.extend(random_atoms(SEED + 1, 100, 2.0, 6.0).unwrap());
    let dict = Dictionary::standard(1).unwrap();
    let opts = MaximalOptions::default();
    let mut norms = Vec::with_capacity(atoms.len());
    let mut outside = 0usize;
    for a in &atoms {
        norms.push(local_maximal_norm(&a.payload, 8, 1.0).map_err(|e| e.to_string())?);
        let ball = a.ball.as_ref().unwrap();
        let bound = support_bound(ball).unwrap();
        let (c, r) = (bound.center.0[0], bound.radius);
        let grid = EvalGrid::adaptive_1d((c - 2.0 * r).max(-CLIP), (c + 2.0 * r).min(CLIP), 8).unwrap();
        let prof = local_grand_maximal(&a.payload, &grid, &dict, &opts).unwrap();
        outside += prof.points.iter().zip(&prof.values).filter(|(x, v)| !bound.contains(x) && **v != 0.0).count();
    }
    let mut sorted = norms.clone();
    sorted.sort_by(f64::total_cmp);
    let (median, max) = (sorted[sorted.len() / 2], sorted[sorted.len() - 1]);
    let detail = format!("200 atoms, max {max:.4}, median {median:.4}, ratio {:.3}, {outside} nonzero values outside the bound", max / median);
    if max / median <= 10.0 && outside == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sandwich() -> Outcome {
    let start = Instant::now();
    let p = |count| CorpusParams { count, ..CorpusParams::default() };
    let mut corpus: Vec<Func> = random_corpus(SEED, CorpusKind::Atoms, &p(25)).unwrap();
    corpus.extend(random_corpus(SEED, CorpusKind::Haar, &p(20)).unwrap());
    for n in 3..=7 {
        corpus.push(Func::Step(charge_pair_function(&ChargePairSpec::standard(3.0, n).unwrap()).unwrap()));
    }
    let mut ratios = Vec::with_capacity(corpus.len());
    for f in &corpus {
        let m = local_maximal_norm(f, 8, 1.0).map_err(|e| e.to_string())?;
        let e = e_global(f).map_err(|e| e.to_string())?.e_value.unwrap();
        let norm = atomic_norm(&decomposed(f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ratios.push((m + e + f.lp_norm_gauss(1.0)) / norm);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);

    let square = Func::Step(charge_pair_function(&ChargePairSpec::standard(2.0, 7).unwrap()).unwrap());
    let refused = matches!(decomposed(&square), Err(Error::NotInHardySpace(_)));
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("square.json");
    std::fs::write(&spec, r#"{"dim":1,"kind":"named","data":{"name":"charge_pair","c_exponent":2,"terms":7}}"#).unwrap();
    let code = Command::new(env!("CARGO_BIN_EXE_gauss-hardy")).arg("decompose").arg(&spec).output().unwrap().status.code();
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "{} functions, ratio in [{lo:.4}, {hi:.4}] (width {:.2}), n^-2 refused: {refused}, exit {code:?}, {secs:.1}s",
        corpus.len(),
        hi / lo
    );
    if lo > 0.0 && hi / lo <= 100.0 && refused && code == Some(3) && secs < 600.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dichotomy() -> Outcome {
    let sq = dichotomy_report(&ChargePairSpec::standard(2.0, 32).unwrap(), true).map_err(|e| e.to_string())?;
    let cu = dichotomy_report(&ChargePairSpec::standard(3.0, 32).unwrap(), true).map_err(|e| e.to_string())?;
    let detail = format!(
        "n^-2: Σc growth {:.4}, moment growth {:.4}; n^-3: {:.4}, {:.4}",
        sq.coefficient_growth, sq.moment_growth, cu.coefficient_growth, cu.moment_growth
    );
    let ok = sq.coefficient_growth < 0.05
        && sq.moment_growth >= 0.05
        && cu.coefficient_growth < 0.05
        && cu.moment_growth < 0.05;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn second_moment_pairing() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for dim in [1, 2] {
        let params = CorpusParams { count: 10, dim, exponent: 1.0, nonnegative: true, ..CorpusParams::default() };
        let mut corpus = random_corpus(SEED, CorpusKind::Lp, &params).unwrap();
        corpus.push(Func::constant(dim, 1.0));
        for f in corpus {
            let norm = atomic_norm(&decomposed(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let r: Vec<f64> = [1.0, 10.0, 100.0].iter().map(|&k| pairing_min_square(&f, k) / norm).collect();
            if !(r[0] <= r[1] * (1.0 + 1e-12) && r[1] <= r[2] * (1.0 + 1e-12)) {
                return Err(format!("not monotone in k: {r:?}"));
            }
            worst = worst.max(r[2]);
            count += 1;
        }
    }
    let detail = format!("{count} nonnegative functions, max ratio {worst:.4}, monotone in k");
    if worst <= C_EMP {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit_l2() -> Outcome {
    let (mut coeff, mut maximal) = (0.0f64, 0.0f64);
    for dim in [1, 2] {
        let params = CorpusParams { count: 10, dim, exponent: 2.0, ..CorpusParams::default() };
        for f in random_corpus(SEED + 7, CorpusKind::Lp, &params).unwrap() {
            let l2 = f.lp_norm_gauss(2.0);
            coeff = coeff.max(atomic_norm(&decomposed(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())? / l2);
            maximal = maximal.max(local_maximal_norm(&f, 8, 2.0).map_err(|e| e.to_string())? / l2);
        }
    }
    let detail = format!("20 functions, max coefficient sum {coeff:.4}, max ‖M̂f‖₂/‖f‖₂ {maximal:.4}");
    if coeff <= C_EMP && maximal <= C_EMP {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn derived_scalars() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let one = Func::constant(1, 1.0);
    let (e, oracle) = (e_global(&one).map_err(|e| e.to_string())?.e_value.unwrap(), common::e_of_one());
    ok &= (e - 0.25).abs() <= 1e-8 && (oracle - 0.25).abs() <= 1e-8;
    lines.push(format!("E(1) = {e} (oracle {oracle:.10})"));
    for n in 1..=3 {
        let ep = e_plus(&Func::constant(n, 1.0));
        let oracle = common::second_moment(n);
        ok &= (ep - n as f64 / 2.0).abs() <= 1e-8 && (oracle - n as f64 / 2.0).abs() <= 1e-8;
        let window = AxisBox::new(vec![-CLIP; n], vec![CLIP; n]).unwrap();
        let mass = box_gauss_measure(&window);
        let integral = Func::constant(n, 1.0).integrate_gauss();
        let oracle_mass = common::total_mass(n);
        ok &= (mass - 1.0).abs() <= 1e-12 && (integral - 1.0).abs() <= 1e-12 && (oracle_mass - 1.0).abs() <= 1e-12;
        lines.push(format!("n={n}: E+ = {ep} (oracle {oracle:.10}), mass {mass} (oracle {oracle_mass:.14})"));
    }
    let square = BoxSumFunctionND::new(2, vec![(AxisBox::new(vec![0.0, -1.0], vec![1.0, 0.5]).unwrap(), 1.0)]).unwrap();
    let direct = Func::BoxSum(square).integrate_gauss();
    let oracle = common::mass_1d(0.0, 1.0) * common::mass_1d(-1.0, 0.5);
    ok &= (direct - oracle).abs() <= 1e-12;
    lines.push(format!("box mass {direct} (oracle {oracle})"));
    if ok {
        Ok(lines.join("; "))
    } else {
        Err(lines.join("; "))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("f.json");
    std::fs::write(&spec, r#"{"dim":1,"kind":"step","data":{"breaks":[-2,-0.5,0.3,1.7],"values":[0.4,-1.2,2.0]}}"#).unwrap();
    let spec2 = dir.path().join("g.json");
    std::fs::write(&spec2, r#"{"dim":2,"kind":"boxsum","data":{"terms":[{"lo":[0,0],"hi":[1,0.5],"coeff":1.5}]}}"#).unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        for args in [
            vec!["norm".into(), spec.display().to_string()],
            vec!["decompose".into(), spec.display().to_string()],
            vec!["decompose".into(), spec2.display().to_string()],
            vec!["verify".into(), "corpus".into()],
        ] {
            let status = Command::new(env!("CARGO_BIN_EXE_gauss-hardy"))
                .args(["--seed", "11", "--out"])
                .arg(&out)
                .args(&args)
                .output()
                .unwrap()
                .status;
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            let name = match args[0].as_str() {
                "norm" => "norm.json".to_string(),
                "decompose" => "decompose.json".to_string(),
                _ => "verify-corpus.json".to_string(),
            };
            runs.push((k, args.join(" "), std::fs::read(out.join(name)).unwrap()));
        }
    }
    let half = runs.len() / 2;
    let same = (0..half).filter(|&i| runs[i].2 == runs[i + half].2).count();
    let detail = format!("{same} of {half} reports byte-identical across two runs");
    if same == half {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Straight to the stderr handle so the lines survive output capture.
fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("atom validity", atom_validity),
        ("reconstruction", reconstruction),
        ("chain bound", chain_bound),
        ("atoms have bounded local maximal norm", atoms_maximal),
        ("norm sandwich", sandwich),
        ("charge-pair dichotomy", dichotomy),
        ("second-moment pairing", second_moment_pairing),
        ("unit L2 functions", unit_l2),
        ("derived scalars", derived_scalars),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => report(&format!("criterion {:>2} {name}: PASS ({d})", i + 1)),
            Err(d) => {
                report(&format!("criterion {:>2} {name}: FAIL ({d})", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
