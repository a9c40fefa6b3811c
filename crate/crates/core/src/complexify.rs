//! Cauchy-Riemann analysis: decide whether a system's right-hand sides are
//! coupled analytically, lift CR-compatible systems to a single complex
//! scalar ODE, and split complex scalars back into real pairs.

use crate::expr::{
    rat_to_tree, to_rat, CScalar, CVar, Expr, Func, NormalError, Poly, Tree, Var,
    ZeroTest, ZeroVerdict, CQ, Q,
};
use std::collections::BTreeMap;

/// The pair (omega1, omega2) of right-hand sides f1'' = omega1, f2'' = omega2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OdeSystem {
    pub omega1: Expr,
    pub omega2: Expr,
}

impl OdeSystem {
    pub fn new(omega1: Expr, omega2: Expr) -> Self {
        OdeSystem { omega1, omega2 }
    }
}

/// The base complex scalar equation u'' = omega(x, u, u').
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexOde {
    pub omega: CScalar,
}

impl ComplexOde {
    pub fn new(omega: CScalar) -> Self {
        ComplexOde { omega }
    }
}

/// Which of the four CR conditions is being reported.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum CrCondition {
    /// d(omega1)/d(f1) - d(omega2)/d(f2)
    DF,
    /// d(omega1)/d(f2) + d(omega2)/d(f1)
    DFCross,
    /// d(omega1)/d(f1') - d(omega2)/d(f2')
    DP,
    /// d(omega1)/d(f2') + d(omega2)/d(f1')
    DPCross,
}

impl CrCondition {
    pub fn describe(self) -> &'static str {
        match self {
            CrCondition::DF => "omega1_f1 - omega2_f2",
            CrCondition::DFCross => "omega1_f2 + omega2_f1",
            CrCondition::DP => "omega1_f1' - omega2_f2'",
            CrCondition::DPCross => "omega1_f2' + omega2_f1'",
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum CrOutcome {
    Pass,
    Fail {
        which: CrCondition,
        witness: Expr,
    },
    Undecided {
        which: CrCondition,
    },
}

impl CrOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CrOutcome::Pass)
    }
}

/// Test the four CR conditions coupling omega1 and omega2. The first nonzero
/// difference is returned as a witness.
pub fn check_cr(s: &OdeSystem, zt: &ZeroTest) -> CrOutcome {
    let diffs = [
        (
            CrCondition::DF,
            s.omega1.diff(Var::F1) - s.omega2.diff(Var::F2),
        ),
        (
            CrCondition::DFCross,
            s.omega1.diff(Var::F2) + s.omega2.diff(Var::F1),
        ),
        (
            CrCondition::DP,
            s.omega1.diff(Var::F1p) - s.omega2.diff(Var::F2p),
        ),
        (
            CrCondition::DPCross,
            s.omega1.diff(Var::F2p) + s.omega2.diff(Var::F1p),
        ),
    ];
    for (which, d) in diffs {
        match d.is_zero(zt) {
            ZeroVerdict::Zero | ZeroVerdict::ZeroNumeric => {}
            ZeroVerdict::NonZero => {
                let witness = d.normal_form().unwrap_or(d);
                return CrOutcome::Fail { which, witness };
            }
            ZeroVerdict::Undecided => return CrOutcome::Undecided { which },
        }
    }
    CrOutcome::Pass
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum LiftError {
    #[error("slice-singular: the real slice f2 = f2' = 0 hits an identically zero denominator")]
    SliceSingular,
    #[error("the sliced right-hand side still depends on {0}")]
    ResidualVariable(&'static str),
}

/// Lift a CR-compatible system to its base complex equation by evaluating
/// omega1 + i*omega2 on the real slice f2 = f2' = 0.
///
/// If the plain slice divides by zero, the shifted slice keeps f2 as a formal
/// epsilon, cancels common powers, and takes the limit f2 -> 0 of the normal
/// form; only if that still diverges is the lift reported slice-singular.
/// Precondition: `check_cr(s)` passed.
pub fn lift(s: &OdeSystem) -> Result<ComplexOde, LiftError> {
    let w1 = slice_limit(&s.omega1)?;
    let w2 = slice_limit(&s.omega2)?;
    let c1 = real_slice_to_cscalar(&w1)?;
    let c2 = real_slice_to_cscalar(&w2)?;
    let omega = (c1 + CScalar::i() * c2)
        .normal_form()
        .map_err(|_| LiftError::SliceSingular)?;
    Ok(ComplexOde::new(omega))
}

/// Substitute f2' = 0, then take the limit f2 -> 0 of the normal form.
fn slice_limit(e: &Expr) -> Result<Expr, LiftError> {
    let raw = e.tree().subst_map(&BTreeMap::from([(
        Var::F2p,
        Tree::<Q, Var>::int(0),
    )]));
    let r = to_rat(&raw).map_err(|_| LiftError::SliceSingular)?;
    // Cancel the common power of f2 between numerator and denominator, then
    // set f2 = 0. Divergent limits surface as a zero denominator.
    let f2 = crate::expr::Atom::Var(Var::F2);
    let num_ord = order_in(&r.num, &f2);
    let den_ord = order_in(&r.den, &f2);
    if r.num.is_zero() {
        return Ok(Expr::int(0));
    }
    if num_ord < den_ord {
        return Err(LiftError::SliceSingular);
    }
    let k = den_ord;
    let num = shift_down(&r.num, &f2, k);
    let den = shift_down(&r.den, &f2, k);
    let num0 = eval_at_zero(&num, &f2);
    let den0 = eval_at_zero(&den, &f2);
    if den0.is_zero() {
        return Err(LiftError::SliceSingular);
    }
    let rat = crate::expr::Rat { num: num0, den: den0 };
    let tree = rat_to_tree(&rat);
    let nf = to_rat(&tree).map_err(|_| LiftError::SliceSingular)?;
    Ok(Expr(rat_to_tree(&nf)))
}

fn order_in(p: &Poly<Q, Var>, a: &crate::expr::Atom<Q, Var>) -> u32 {
    p.terms
        .keys()
        .map(|m| m.exp_of(a))
        .min()
        .unwrap_or(0)
}

fn shift_down(p: &Poly<Q, Var>, a: &crate::expr::Atom<Q, Var>, k: u32) -> Poly<Q, Var> {
    if k == 0 {
        return p.clone();
    }
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let (e, rest) = m.split_atom(a);
        debug_assert!(e >= k);
        let mut mono = rest;
        if e - k > 0 {
            mono = mono.mul(&crate::expr::Mono(vec![(a.clone(), e - k)]));
        }
        out.add_term(mono, c.clone());
    }
    out
}

fn eval_at_zero(p: &Poly<Q, Var>, a: &crate::expr::Atom<Q, Var>) -> Poly<Q, Var> {
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let (e, rest) = m.split_atom(a);
        if e == 0 {
            out.add_term(rest, c.clone());
        }
    }
    out
}

/// Reinterpret a sliced expression (variables x, f1, f1' only) over (x, u, u').
fn real_slice_to_cscalar(e: &Expr) -> Result<CScalar, LiftError> {
    for v in e.vars_used() {
        match v {
            Var::F2 => return Err(LiftError::ResidualVariable("f2")),
            Var::F2p => return Err(LiftError::ResidualVariable("f2'")),
            _ => {}
        }
    }
    let t = e.tree().map_leaves(
        &|q: &Q| Tree::constant(CQ::from_re(q.clone())),
        &|v| {
            Tree::var(match v {
                Var::X => CVar::X,
                Var::F1 => CVar::U,
                Var::F1p => CVar::Up,
                Var::F2 | Var::F2p => unreachable!("checked above"),
            })
        },
    );
    Ok(CScalar::from_tree(t))
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum RealifyError {
    #[error("realification of {0} with a non-real argument is outside the supported catalog")]
    UnsupportedFunction(&'static str),
    #[error("normal form failed during realification: {0}")]
    Normal(#[from] NormalError),
}

/// Split a complex scalar into (Re, Im) as real expressions under
/// u = f1 + i f2, u' = f1' + i f2'. Inverse of `lift` on analytic input.
///
/// Rational operations split exactly. Of the function catalog, exp/sin/cos
/// split exactly for any argument; log and sqrt and arctan split in principal
/// form only when the argument's imaginary part is zero or (for log) via the
/// half-log/arctan form.
pub fn realify(c: &CScalar) -> Result<(Expr, Expr), RealifyError> {
    let (re, im) = split(c.tree())?;
    let re = re.normal_form()?;
    let im = im.normal_form()?;
    Ok((re, im))
}

fn split(t: &Tree<CQ, CVar>) -> Result<(Expr, Expr), RealifyError> {
    Ok(match t {
        Tree::Const(c) => (Expr::rational(c.re.clone()), Expr::rational(c.im.clone())),
        Tree::Var(v) => match v {
            CVar::X => (Expr::x(), Expr::int(0)),
            CVar::U => (Expr::f1(), Expr::f2()),
            CVar::Up => (Expr::f1p(), Expr::f2p()),
        },
        Tree::Add(a, b) => {
            let (ar, ai) = split(a)?;
            let (br, bi) = split(b)?;
            (ar + br, ai + bi)
        }
        Tree::Sub(a, b) => {
            let (ar, ai) = split(a)?;
            let (br, bi) = split(b)?;
            (ar - br, ai - bi)
        }
        Tree::Mul(a, b) => {
            let (ar, ai) = split(a)?;
            let (br, bi) = split(b)?;
            (
                ar.clone() * br.clone() - ai.clone() * bi.clone(),
                ar * bi + ai * br,
            )
        }
        Tree::Div(a, b) => {
            let (ar, ai) = split(a)?;
            let (br, bi) = split(b)?;
            let n = br.clone() * br.clone() + bi.clone() * bi.clone();
            (
                (ar.clone() * br.clone() + ai.clone() * bi.clone()) / n.clone(),
                (ai * br - ar * bi) / n,
            )
        }
        Tree::Neg(a) => {
            let (ar, ai) = split(a)?;
            (-ar, -ai)
        }
        Tree::Pow(a, n) => {
            let (ar, ai) = split(a)?;
            pow_split(&ar, &ai, *n)
        }
        Tree::Call(f, a) => {
            let (ar, ai) = split(a)?;
            let ai_zero = ai
                .is_zero(&ZeroTest::default())
                .is_zero();
            match f {
                Func::Exp => {
                    // exp(a+bi) = e^a (cos b + i sin b)
                    let ea = ar.exp();
                    (ea.clone() * ai.cos(), ea * ai.sin())
                }
                Func::Sin => {
                    // sin(a+bi) = sin a cosh b + i cos a sinh b, with
                    // cosh/sinh written through exp.
                    let (ch, sh) = cosh_sinh(&ai);
                    (ar.sin() * ch, ar.cos() * sh)
                }
                Func::Cos => {
                    let (ch, sh) = cosh_sinh(&ai);
                    (ar.cos() * ch, -(ar.sin() * sh))
                }
                Func::Log => {
                    // Principal branch: Re = log(|z|^2)/2, Im = arctan(Im/Re);
                    // the arctan form is valid for Re z > 0.
                    if ai_zero {
                        (ar.log(), Expr::int(0))
                    } else {
                        let m = ar.clone() * ar.clone() + ai.clone() * ai.clone();
                        (
                            Expr::ratio(1, 2) * m.log(),
                            (ai / ar).arctan(),
                        )
                    }
                }
                Func::Sqrt => {
                    if ai_zero {
                        (ar.sqrt(), Expr::int(0))
                    } else {
                        return Err(RealifyError::UnsupportedFunction("sqrt"));
                    }
                }
                Func::Arctan => {
                    if ai_zero {
                        (ar.arctan(), Expr::int(0))
                    } else {
                        return Err(RealifyError::UnsupportedFunction("arctan"));
                    }
                }
            }
        }
    })
}

fn cosh_sinh(b: &Expr) -> (Expr, Expr) {
    let ep = b.exp();
    let em = (-b.clone()).exp();
    (
        Expr::ratio(1, 2) * (ep.clone() + em.clone()),
        Expr::ratio(1, 2) * (ep - em),
    )
}

fn pow_split(ar: &Expr, ai: &Expr, n: i32) -> (Expr, Expr) {
    if n == 0 {
        return (Expr::int(1), Expr::int(0));
    }
    let m = n.unsigned_abs();
    let mut re = ar.clone();
    let mut im = ai.clone();
    for _ in 1..m {
        let nr = re.clone() * ar.clone() - im.clone() * ai.clone();
        let ni = re * ai.clone() + im * ar.clone();
        re = nr;
        im = ni;
    }
    if n < 0 {
        let d = re.clone() * re.clone() + im.clone() * im.clone();
        re = re / d.clone();
        im = -(im / d);
    }
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn zt() -> ZeroTest {
        ZeroTest::default()
    }

    #[test]
    fn cr_pass_cubic_const() {
        assert!(check_cr(&corpus::cubic_const(), &zt()).passed());
    }

    #[test]
    fn cr_fail_conjugate() {
        let s = OdeSystem::new(Expr::f1(), -Expr::f2());
        match check_cr(&s, &zt()) {
            CrOutcome::Fail { which, witness } => {
                assert_eq!(which, CrCondition::DF);
                assert!(witness.normal_eq(&Expr::int(2), &zt()));
            }
            other => panic!("expected CR failure, got {other:?}"),
        }
    }

    #[test]
    fn cr_pass_appendix_rational_pair() {
        assert!(check_cr(&corpus::rational_g2(), &zt()).passed());
    }

    #[test]
    fn lift_cubic_const_is_up_cubed() {
        let c = lift(&corpus::cubic_const()).unwrap();
        assert!(c.omega.normal_eq(&CScalar::up().pow(3), &zt()));
    }

    #[test]
    fn lift_emden() {
        let c = lift(&corpus::emden()).unwrap();
        let want = -(CScalar::int(3) * CScalar::u() * CScalar::up()) - CScalar::u().pow(3);
        assert!(c.omega.normal_eq(&want, &zt()));
    }

    #[test]
    fn lift_appendix() {
        let c = lift(&corpus::rational_g2()).unwrap();
        let want = CScalar::up() / CScalar::u().pow(2);
        assert!(c.omega.normal_eq(&want, &zt()));
    }

    #[test]
    fn lift_shifted_slice() {
        // Denominator vanishes on the plain slice but the limit exists:
        // omega1 = f1' * f2 / (f2 + f2'^2) -> f1' as f2 -> 0.
        let omega1 = (Expr::f1p() * Expr::f2()) / (Expr::f2() + Expr::f2p().pow(2));
        let s = OdeSystem::new(omega1, Expr::int(0));
        let c = lift(&s).unwrap();
        assert!(c.omega.normal_eq(&CScalar::up(), &zt()));
    }

    #[test]
    fn lift_slice_singular() {
        // 1/(f2^2) has no finite limit on the slice.
        let s = OdeSystem::new(Expr::int(1) / Expr::f2().pow(2), Expr::int(0));
        assert_eq!(lift(&s), Err(LiftError::SliceSingular));
    }

    #[test]
    fn realify_up_cubed() {
        let (re, im) = realify(&CScalar::up().pow(3)).unwrap();
        let want_re = Expr::f1p().pow(3) - Expr::int(3) * Expr::f1p() * Expr::f2p().pow(2);
        let want_im = Expr::int(3) * Expr::f1p().pow(2) * Expr::f2p() - Expr::f2p().pow(3);
        assert!(re.normal_eq(&want_re, &zt()));
        assert!(im.normal_eq(&want_im, &zt()));
    }

    #[test]
    fn realify_identity() {
        let (re, im) = realify(&CScalar::u()).unwrap();
        assert_eq!(re, Expr::f1());
        assert_eq!(im, Expr::f2());
    }

    #[test]
    fn realify_cubic_xu_shape() {
        // x*u*u'^3 realifies onto the cubic_xu right-hand sides.
        let c = CScalar::x() * CScalar::u() * CScalar::up().pow(3);
        let (re, im) = realify(&c).unwrap();
        let s = corpus::cubic_xu();
        assert!(re.normal_eq(&s.omega1, &zt()));
        assert!(im.normal_eq(&s.omega2, &zt()));
    }

    #[test]
    fn round_trip_all_cr_pass_corpus() {
        for (name, s) in corpus::all_systems() {
            if !check_cr(&s, &zt()).passed() {
                continue;
            }
            let c = lift(&s).unwrap_or_else(|e| panic!("lift failed for {name}: {e}"));
            let (re, im) = realify(&c.omega).unwrap();
            assert!(re.normal_eq(&s.omega1, &zt()), "re round trip failed for {name}");
            assert!(im.normal_eq(&s.omega2, &zt()), "im round trip failed for {name}");
        }
    }

    #[test]
    fn conjugation_breaks_cr() {
        // Negating f2 and f2' in a CR-pass omega2 must break CR unless
        // omega2 is identically zero.
        for (name, s) in corpus::all_systems() {
            if !check_cr(&s, &zt()).passed() {
                continue;
            }
            if s.omega2.is_zero(&zt()).is_zero() {
                continue;
            }
            let flip = BTreeMap::from([
                (Var::F2, -Expr::f2()),
                (Var::F2p, -Expr::f2p()),
            ]);
            let conj = OdeSystem::new(
                s.omega1.clone(),
                s.omega2.substitute(&flip).unwrap(),
            );
            assert!(
                !check_cr(&conj, &zt()).passed(),
                "conjugated {name} unexpectedly passes CR"
            );
        }
    }

    #[test]
    fn cr_closed_under_addition() {
        // The sum of two CR-pass pairs passes (analytic functions add).
        let a = corpus::cubic_const();
        let b = corpus::cubic_u();
        let sum = OdeSystem::new(
            a.omega1 + b.omega1,
            a.omega2 + b.omega2,
        );
        assert!(check_cr(&sum, &zt()).passed());
    }
}
