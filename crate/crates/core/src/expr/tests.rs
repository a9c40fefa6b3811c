use super::*;
use num_complex::Complex64;

fn zt() -> ZeroTest {
    ZeroTest::default()
}

#[test]
fn diff_power_rule() {
    // d/df1 (f1^2 - f2^2) = 2*f1
    let e = Expr::f1().pow(2) - Expr::f2().pow(2);
    let d = e.diff(Var::F1);
    assert!(d.normal_eq(&(Expr::int(2) * Expr::f1()), &zt()));
    assert_eq!(d.to_string(), "2*f1");
}

#[test]
fn diff_cubic_rhs() {
    // d/df1' (f1'^3 - 3 f1' f2'^2) = 3 f1'^2 - 3 f2'^2
    let e = Expr::f1p().pow(3) - Expr::int(3) * Expr::f1p() * Expr::f2p().pow(2);
    let d = e.diff(Var::F1p);
    let want = Expr::int(3) * Expr::f1p().pow(2) - Expr::int(3) * Expr::f2p().pow(2);
    assert!(d.normal_eq(&want, &zt()));
}

#[test]
fn diff_independent_symbols() {
    let e = Expr::f1().sin();
    assert!(e.diff(Var::X).is_const_zero());
}

#[test]
fn diff_chain_rules() {
    // d/dx log(x^2) = 2/x, d/dx arctan(x) = 1/(1+x^2), d/dx sqrt(x) = 1/(2 sqrt x)
    let d = Expr::x().pow(2).log().diff(Var::X);
    assert!(d.normal_eq(&(Expr::int(2) / Expr::x()), &zt()));
    let d = Expr::x().arctan().diff(Var::X);
    assert!(d.normal_eq(&(Expr::int(1) / (Expr::int(1) + Expr::x().pow(2))), &zt()));
    let d = Expr::x().sqrt().diff(Var::X);
    assert!(d.normal_eq(&(Expr::int(1) / (Expr::int(2) * Expr::x().sqrt())), &zt()));
}

#[test]
fn normal_form_cancellation() {
    let e = Expr::f1p().pow(3) - Expr::f1p().pow(3);
    assert_eq!(e.normal_form().unwrap(), Expr::int(0));
}

#[test]
fn normal_form_common_factor() {
    // (f1^2 * f1') / f1^4 = f1' / f1^2 — arises when slicing the appendix system
    let e = (Expr::f1().pow(2) * Expr::f1p()) / Expr::f1().pow(4);
    let nf = e.normal_form().unwrap();
    assert_eq!(nf.to_string(), "f1'/f1^2");
}

#[test]
fn normal_form_expansion() {
    let e = (Expr::f1() + Expr::f2()).pow(2)
        - Expr::f1().pow(2)
        - Expr::int(2) * Expr::f1() * Expr::f2()
        - Expr::f2().pow(2);
    assert_eq!(e.normal_form().unwrap(), Expr::int(0));
}

#[test]
fn normal_form_idempotent() {
    let samples = vec![
        (Expr::f1() + Expr::f2()).pow(3) / (Expr::f1() - Expr::f2()),
        Expr::x().sin() * Expr::x().sin() + Expr::int(2) / Expr::f1(),
        (Expr::f1().pow(2) - Expr::f2().pow(2)) / (Expr::f1() - Expr::f2()),
        Expr::ratio(3, 4) * Expr::x() - Expr::f1p() / (Expr::int(2) * Expr::f2()),
    ];
    for e in samples {
        let n1 = e.normal_form().unwrap();
        let n2 = n1.normal_form().unwrap();
        assert_eq!(n1, n2, "normal form must be idempotent for {e}");
    }
}

#[test]
fn gcd_cancels_polynomial_factors() {
    let e = (Expr::f1().pow(2) - Expr::f2().pow(2)) / (Expr::f1() - Expr::f2());
    let nf = e.normal_form().unwrap();
    assert!(nf.normal_eq(&(Expr::f1() + Expr::f2()), &zt()));
    assert_eq!(nf.to_string(), "f1 + f2");
}

#[test]
fn is_zero_pythagorean_numeric() {
    let e = Expr::f1().sin().pow(2) + Expr::f1().cos().pow(2) - Expr::int(1);
    assert_eq!(e.is_zero(&zt()), ZeroVerdict::ZeroNumeric);
}

#[test]
fn is_zero_exact_cases() {
    assert_eq!((Expr::f1() - Expr::f2()).is_zero(&zt()), ZeroVerdict::NonZero);
    assert_eq!(Expr::int(0).is_zero(&zt()), ZeroVerdict::Zero);
    // sqrt(f1)^2 - f1 is true but only numerically (atoms stay opaque)
    let e = Expr::f1().sqrt().pow(2) - Expr::f1();
    assert_eq!(e.is_zero(&zt()), ZeroVerdict::ZeroNumeric);
}

#[test]
fn substitute_slice() {
    // the Emden system's omega1 sliced at f2 = f2' = 0
    let e = Expr::int(-3) * Expr::f1() * Expr::f1p() + Expr::int(3) * Expr::f2() * Expr::f2p()
        - Expr::f1().pow(3)
        + Expr::int(3) * Expr::f1() * Expr::f2().pow(2);
    let mut b = std::collections::BTreeMap::new();
    b.insert(Var::F2, Expr::int(0));
    b.insert(Var::F2p, Expr::int(0));
    let s = e.substitute(&b).unwrap();
    let want = Expr::int(-3) * Expr::f1() * Expr::f1p() - Expr::f1().pow(3);
    assert!(s.normal_eq(&want, &zt()));
}

#[test]
fn substitute_slice_singular() {
    let e = Expr::f1() / Expr::f2();
    let mut b = std::collections::BTreeMap::new();
    b.insert(Var::F2, Expr::int(0));
    assert_eq!(e.substitute(&b), Err(SubstError::SliceSingular));
}

#[test]
fn substitute_identity() {
    let e = Expr::x();
    let s = e.substitute(&std::collections::BTreeMap::new()).unwrap();
    assert_eq!(s, Expr::x());
}

#[test]
fn evaluate_basics() {
    let e = Expr::f1().pow(2) - Expr::f2().pow(2);
    let p = Point::real(0.0, 3.0, 1.0, 0.0, 0.0);
    assert_eq!(e.eval(&p).unwrap(), Complex64::new(8.0, 0.0));

    let e = Expr::f1p().pow(3);
    let p = Point::real(0.0, 0.0, 0.0, 2.0, 0.0);
    assert_eq!(e.eval(&p).unwrap(), Complex64::new(8.0, 0.0));

    let e = Expr::int(1) / Expr::f1();
    let p = Point::real(0.0, 0.0, 0.0, 0.0, 0.0);
    assert_eq!(e.eval(&p), Err(expr_eval_pole()));
}

fn expr_eval_pole() -> EvalError {
    EvalError::Pole
}

#[test]
fn evaluate_branch_cut() {
    let e = Expr::f1().log();
    let p = Point::real(0.0, -1.0, 0.0, 0.0, 0.0);
    assert!(matches!(e.eval(&p), Err(EvalError::Branch(_))));
}

#[test]
fn derivative_matches_finite_differences() {
    // Invariant from the kernel contract: 16 non-singular sample points.
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    // random polynomial with rational coefficients
    for _ in 0..4 {
        let e = random_poly_expr(&mut rng);
        for v in [Var::X, Var::F1, Var::F2, Var::F1p, Var::F2p] {
            let d = e.diff(v);
            for _ in 0..16 {
                let base: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let h = 1e-6;
                let at = |shift: f64| {
                    let mut c = base.clone();
                    let idx = match v {
                        Var::X => 0,
                        Var::F1 => 1,
                        Var::F2 => 2,
                        Var::F1p => 3,
                        Var::F2p => 4,
                    };
                    c[idx] += shift;
                    Point::real(c[0], c[1], c[2], c[3], c[4])
                };
                let fd = (e.eval(&at(h)).unwrap() - e.eval(&at(-h)).unwrap()) / (2.0 * h);
                let dv = d.eval(&at(0.0)).unwrap();
                let scale = 1.0 + dv.norm();
                assert!(
                    (fd - dv).norm() / scale < 1e-5,
                    "finite difference mismatch for {e} wrt {v:?}: {fd} vs {dv}"
                );
            }
        }
    }
}

fn random_poly_expr(rng: &mut rand_chacha::ChaCha8Rng) -> Expr {
    use rand::Rng;
    let vars = [Var::X, Var::F1, Var::F2, Var::F1p, Var::F2p];
    let mut acc = Expr::int(0);
    for _ in 0..6 {
        let mut term = Expr::ratio(rng.gen_range(-6i64..7).max(1), rng.gen_range(1i64..5));
        for _ in 0..rng.gen_range(0..4) {
            let v = vars[rng.gen_range(0..5)];
            term = term * Expr::var(v);
        }
        acc = acc + term;
    }
    acc
}

#[test]
fn normal_form_preserves_evaluation() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let e = (Expr::f1() + Expr::f2()).pow(3) / (Expr::int(1) + Expr::x().pow(2))
        + Expr::f1p() * Expr::f2p() - Expr::x() * Expr::f1();
    let nf = e.normal_form().unwrap();
    for _ in 0..20 {
        let p = Point::real(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let a = e.eval(&p).unwrap();
        let b = nf.eval(&p).unwrap();
        assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn cscalar_arithmetic_matches_complex_arithmetic() {
    // (u + i x)^3 / (u' - i) evaluated as a tree matches direct complex arithmetic.
    let c = (CScalar::u() + CScalar::i() * CScalar::x()).pow(3) / (CScalar::up() - CScalar::i());
    let x = Complex64::new(0.7, 0.0);
    let u = Complex64::new(1.3, -0.4);
    let up = Complex64::new(0.2, 0.9);
    let got = c.eval(x, u, up).unwrap();
    let want = (u + Complex64::i() * x).powi(3) / (up - Complex64::i());
    assert!((got - want).norm() < 1e-10 * (1.0 + want.norm()));
}

#[test]
fn cscalar_normal_form_collects_i() {
    // (1+i)(1-i) = 2
    let c = (CScalar::int(1) + CScalar::i()) * (CScalar::int(1) - CScalar::i());
    assert_eq!(c.normal_form().unwrap(), CScalar::int(2));
}

#[test]
fn is_zero_of_self_difference_random() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let e = random_poly_expr(&mut rng);
        let d = e.clone() - e.clone();
        assert!(d.is_zero(&zt()).is_zero());
    }
}

#[test]
fn print_examples() {
    assert_eq!((Expr::int(2) * Expr::f1()).to_string(), "2*f1");
    assert_eq!(Expr::int(0).to_string(), "0");
    let c = -(CScalar::int(3) * CScalar::u() * CScalar::up()) - CScalar::u().pow(3);
    assert_eq!(c.to_string(), "-3*u*u' - u^3");
}
