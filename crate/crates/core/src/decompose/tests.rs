use super::*;
use crate::atoms::atomic_norm;
use crate::corpus::{charge_pair_function, random_atoms, ChargePairSpec};
use crate::func_repr::BoxSumFunctionND;
use crate::geometry::maximal_admissible_ball;
use crate::measure::Point;

fn all_valid(d: &AtomicDecomposition) {
    for (i, t) in d.terms.iter().enumerate() {
        let r = validate_gaussian_atom(&t.atom);
        assert!(r.valid, "atom {i}: {:?} {:?} {:?} {}", r.checks, t.atom.payload, t.atom.ball, t.atom.payload.integrate_gauss());
    }
}

#[test]
fn constant_is_one_exceptional_term() {
    let (d, _) = decompose_h1_gamma_1d(&StepFunction1D::constant(1.0), &DecomposeOptions::default()).unwrap();
    assert_eq!(d.terms.len(), 1);
    assert_eq!(d.exceptional_coefficient(), 1.0);
    let (d2, _) = decompose_nd(&Func::constant(2, 1.0), &DecomposeOptions::default()).unwrap();
    assert_eq!(d2.terms.len(), 1);
}

#[test]
fn random_atoms_decompose_and_reconstruct() {
    let atoms = random_atoms(7, 10, f64::INFINITY, 6.0).unwrap();
    for a in atoms {
        let Func::Step(s) = &a.payload else { panic!() };
        let (d, stats) = decompose_h1_gamma_1d(s, &DecomposeOptions::default()).unwrap();
        all_valid(&d);
        let err = d.reconstruction_error(10_000, None);
        assert!(err.max_rel < 1e-6, "{err:?}");
        assert!(stats.root_defect < 1e-12);
        assert!(stats.max_scale <= 2.0);
        assert!(atomic_norm(&d).unwrap() < 100.0);
    }
}

#[test]
fn charge_pairs_cubic_succeeds_square_refused() {
    let cubic = charge_pair_function(&ChargePairSpec::standard(3.0, 6).unwrap()).unwrap();
    let (d, _) = decompose_h1_gamma_1d(&cubic, &DecomposeOptions::default()).unwrap();
    all_valid(&d);
    assert!(d.reconstruction_error(10_000, None).max_rel < 1e-6);
    let square = charge_pair_function(&ChargePairSpec::standard(2.0, 7).unwrap()).unwrap();
    let err = decompose_h1_gamma_1d(&square, &DecomposeOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NotInHardySpace(_)));
}

#[test]
fn two_dimensional_box_sum() {
    let f = BoxSumFunctionND::new(
        2,
        vec![
            (AxisBox::new(vec![-1.0, -0.5], vec![0.75, 1.25]).unwrap(), 1.5),
            (AxisBox::new(vec![0.25, 0.0], vec![2.0, 0.5]).unwrap(), -0.7),
        ],
    )
    .unwrap();
    let f = Func::BoxSum(f);
    let (d, stats) = decompose_nd(&f, &DecomposeOptions::default()).unwrap();
    all_valid(&d);
    let region = AxisBox::new(vec![-1.0, -0.5], vec![2.0, 1.25]).unwrap();
    let err = d.reconstruction_error(64, Some(&region));
    assert!(err.max_abs < 1e-6, "{err:?}");
    assert!(stats.max_scale <= 4.0);
}

#[test]
fn lebesgue_cz_on_haar() {
    let n = 8.0;
    let g = StepFunction1D::new(vec![0.0, 0.5 / n, 1.0 / n], vec![n, -n]).unwrap();
    let atoms = cz_lebesgue_1d(&g, &Ball::interval(0.5, 0.5).unwrap()).unwrap();
    let sum: f64 = atoms.iter().map(|(c, _)| c.abs()).sum();
    assert!(sum <= 2.0, "{sum}");
    for (_, a) in &atoms {
        assert!(crate::atoms::validate_lebesgue_atom(a).valid);
    }
    assert!(cz_lebesgue_1d(&StepFunction1D::zero(), &Ball::interval(0.0, 1.0).unwrap()).unwrap().is_empty());
    assert!(cz_lebesgue_1d(&StepFunction1D::indicator(0.0, 0.5, 1.0), &Ball::interval(0.5, 0.5).unwrap()).is_err());
}

#[test]
fn expand_finite_exponent_atoms() {
    let ball = maximal_admissible_ball(Point(vec![2.5]));
    let mut atoms = random_atoms(3, 20, 2.0, 6.0).unwrap();
    let two = crate::corpus::two_sided_atom(2.5, ball.radius).unwrap();
    atoms.push(GaussianAtom::from_bounded(Func::Step(two), ball, 1.0).unwrap().1);
    for a in &atoms {
        let d = gaussian_atom_expand(a).unwrap();
        all_valid(&d);
        for t in &d.terms {
            assert!(t.atom.scale <= 2.0);
        }
        assert!(d.reconstruction_error(10_000, None).max_abs < 1e-6 * a.payload.sup_norm().max(1.0));
        assert!(d.coefficient_sum() < 20.0);
    }
}

#[test]
fn cz_pieces_are_mean_zero() {
    let atoms = random_atoms(7, 10, f64::INFINITY, 6.0).unwrap();
    for a in atoms {
        let Func::Step(s) = &a.payload else { panic!() };
        let tree = partition::TreePartition::intervals(8.0).unwrap();
        for c in &tree.cells {
            let local = Local::from_func(&Func::Step(s.clone()), c);
            let m = Weight::Gauss.boxed(c);
            let g = local.clone().shifted(super::local_integral(&local) / m);
            for p in cz_split(&g, CzOptions { weight: Weight::Gauss, max_depth: 48 }) {
                let f = p.payload.to_func().unwrap();
                let mean = f.integrate_gauss();
                let l1 = f.lp_norm_gauss(1.0);
                assert!(mean.abs() <= 1e-9 * l1, "{:?} {:?} {:?} {mean} {l1}", local, p.region, p.payload);
            }
        }
    }
}
