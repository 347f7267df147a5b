use gauss_hardy::atoms::{atomic_norm, validate_gaussian_atom};
use gauss_hardy::corpus::random_atoms;
use gauss_hardy::decompose::{build_chain_radii, decompose, DecomposeOptions};
use gauss_hardy::func_repr::{BoxSumFunctionND, Func, StepFunction1D};
use gauss_hardy::functionals::{e_global, e_plus};
use gauss_hardy::geometry::{is_admissible, maximal_admissible_ball, support_bound};
use gauss_hardy::maximal::local_maximal_norm;
use gauss_hardy::measure::{interval_mass, AxisBox, Point};
use proptest::prelude::*;

fn step() -> impl Strategy<Value = StepFunction1D> {
    (2usize..8, -6.0f64..6.0)
        .prop_flat_map(|(n, start)| {
            (Just(start), prop::collection::vec(0.05f64..1.5, n), prop::collection::vec(-4.0f64..4.0, n))
        })
        .prop_map(|(start, widths, values)| {
            let mut breaks = vec![start];
            for w in widths {
                breaks.push(breaks.last().unwrap() + w);
            }
            StepFunction1D::new(breaks, values).unwrap()
        })
}

fn boxes_2d() -> impl Strategy<Value = BoxSumFunctionND> {
    prop::collection::vec((-3i32..2, -3i32..2, 1i32..6, 1i32..6, -3.0f64..3.0), 1..4).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|(x, y, w, h, c)| {
                let lo = vec![x as f64 / 2.0, y as f64 / 2.0];
                let hi = vec![lo[0] + w as f64 / 4.0, lo[1] + h as f64 / 4.0];
                (AxisBox::new(lo, hi).unwrap(), c)
            })
            .collect();
        BoxSumFunctionND::new(2, terms).unwrap()
    })
}

fn check_decomposition(f: &Func, per_axis: usize) -> Result<f64, TestCaseError> {
    let (d, stats) = decompose(f, &DecomposeOptions::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for t in &d.terms {
        let r = validate_gaussian_atom(&t.atom);
        prop_assert!(r.valid, "invalid atom: {:?}", r.checks);
    }
    let err = d.reconstruction_error(per_axis, None);
    prop_assert!(err.max_rel < 1e-9, "reconstruction error {:e}", err.max_rel);
    prop_assert!(stats.root_defect < 1e-9 * f.sup_norm().max(1.0));
    // atoms have L¹(γ) norm at most one, and only the exceptional atom has mass
    let norm = atomic_norm(&d).unwrap();
    prop_assert!(norm >= f.lp_norm_gauss(1.0) * (1.0 - 1e-9));
    // past the window the residual carries f
    let far = vec![30.0; f.dim()];
    prop_assert!((d.reconstruct_at(&far) - f.eval(&far)).abs() <= 1e-9 * f.sup_norm().max(1.0));
    prop_assert!(stats.residual_l1 <= 1e-12 * norm.max(1.0));
    let mass = f.integrate_gauss();
    prop_assert!((d.exceptional_coefficient() - mass).abs() <= 1e-9 * norm.max(1.0));
    Ok(norm)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn step_functions_decompose(f in step()) {
        check_decomposition(&Func::Step(f), 4000)?;
    }

    #[test]
    fn coefficient_sum_is_homogeneous(f in step(), c in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0]) {
        let f = Func::Step(f);
        let a = check_decomposition(&f, 2000)?;
        let b = check_decomposition(&f.scale(c), 2000)?;
        prop_assert!((b - c.abs() * a).abs() <= 1e-8 * b.max(1.0), "{b} vs {}", c.abs() * a);
    }

    #[test]
    fn chain_length_bound(c in 0.0f64..20.0) {
        let (radii, n) = build_chain_radii(c);
        prop_assert!(n as f64 <= c * c + 1.0);
        prop_assert_eq!(radii.len(), n);
    }

    #[test]
    fn maximal_balls_are_admissible(c in -30.0f64..30.0) {
        let b = maximal_admissible_ball(Point(vec![c]));
        prop_assert!(is_admissible(&b, 1.0));
        let bound = support_bound(&b).unwrap();
        prop_assert!(bound.contains_ball(&b));
    }

    #[test]
    fn interval_mass_is_additive(a in -8.0f64..8.0, w1 in 0.0f64..4.0, w2 in 0.0f64..4.0) {
        let (m, b) = (a + w1, a + w1 + w2);
        let whole = interval_mass(a, b);
        prop_assert!((whole - interval_mass(a, m) - interval_mass(m, b)).abs() <= 1e-15 + 1e-12 * whole);
        prop_assert!((0.0..=1.0).contains(&whole));
    }

    #[test]
    fn functionals_are_nonnegative_and_homogeneous(f in step(), c in -5.0f64..5.0) {
        let f = Func::Step(f);
        let e = e_global(&f).unwrap().e_value.unwrap();
        let ec = e_global(&f.scale(c)).unwrap().e_value.unwrap();
        prop_assert!(e >= 0.0 && e_plus(&f) >= 0.0);
        prop_assert!((ec - c.abs() * e).abs() <= 1e-9 * ec.max(1e-300).max(c.abs() * e) + 1e-300);
    }

    #[test]
    fn maximal_norm_is_homogeneous(f in step(), c in 0.1f64..10.0) {
        let f = Func::Step(f);
        let m = local_maximal_norm(&f, 4, 1.0).unwrap();
        let mc = local_maximal_norm(&f.scale(c), 4, 1.0).unwrap();
        prop_assert!((mc - c * m).abs() <= 1e-9 * mc);
        prop_assert!(m >= 0.0);
    }

    #[test]
    fn random_atoms_validate(seed in any::<u64>()) {
        for a in random_atoms(seed, 5, 2.0, 8.0).unwrap() {
            prop_assert!(validate_gaussian_atom(&a).valid);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn box_sums_decompose(f in boxes_2d()) {
        let f = Func::BoxSum(f);
        if f.support().is_some() {
            check_decomposition(&f, 64)?;
        }
    }
}
