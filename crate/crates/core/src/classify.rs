//! Cubic-structure detection and the complex-linearizability criterion.
//!
//! A CR-compatible system descends to u'' = omega(x, u, u'). When omega is
//! polynomial of degree <= 3 in u' with (x, u)-coefficients, the equation is
//! stored as u'' + E3 u'^3 + E2 u'^2 + E1 u' + E0 = 0. The E3-only family is
//! decided exactly by d^2(E3)/dx^2 = 0; everything else is reported without
//! guessing.

use crate::complexify::{check_cr, lift, ComplexOde, CrOutcome, OdeSystem};
use crate::expr::{Atom, CScalar, CVar, Tree, ZeroTest, ZeroVerdict};
use crate::linearize;
use serde::Serialize;

/// Coefficients of u'' + E3 u'^3 + E2 u'^2 + E1 u' + E0 = 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CubicForm {
    /// Indexed by the power of u'; each entry depends on (x, u) only.
    pub e: [CScalar; 4],
}

impl CubicForm {
    pub fn e0(&self) -> &CScalar {
        &self.e[0]
    }
    pub fn e1(&self) -> &CScalar {
        &self.e[1]
    }
    pub fn e2(&self) -> &CScalar {
        &self.e[2]
    }
    pub fn e3(&self) -> &CScalar {
        &self.e[3]
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("not-cubic: the right-hand side is not polynomial of degree <= 3 in u'")]
    NotCubic,
    #[error("normal form failed: {0}")]
    Normal(#[from] crate::expr::NormalError),
}

/// Collect omega as a polynomial in u'. Succeeds iff the degree is at most 3
/// and the coefficients are free of u'; signs are folded so the equation
/// reads u'' + sum E_k u'^k = 0.
pub fn extract_cubic(c: &ComplexOde) -> Result<CubicForm, ExtractError> {
    let rat = c.omega.rat()?;
    let up = Atom::Var(CVar::Up);
    if rat.den.depends_on_var(CVar::Up) {
        return Err(ExtractError::NotCubic);
    }
    // Transcendental atoms involving u' also disqualify the cubic form.
    if rat
        .num
        .terms
        .keys()
        .any(|m| m.0.iter().any(|(a, _)| a.is_transcendental() && a.depends_on(CVar::Up)))
    {
        return Err(ExtractError::NotCubic);
    }
    if rat.num.degree_in(&up) > 3 {
        return Err(ExtractError::NotCubic);
    }
    let coeffs = rat.num.coeffs_in(&up);
    let mut e: [CScalar; 4] = [
        CScalar::int(0),
        CScalar::int(0),
        CScalar::int(0),
        CScalar::int(0),
    ];
    for (k, ck) in coeffs.into_iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        let tree = Tree::Div(
            Box::new(crate::expr::poly_to_tree(&ck)),
            Box::new(crate::expr::poly_to_tree(&rat.den)),
        );
        let val = (-CScalar::from_tree(tree)).normal_form()?;
        e[k] = val;
    }
    Ok(CubicForm { e })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionOutcome {
    Pass,
    Fail,
    NotApplicable,
    Undecided,
}

/// The E3-only linearizability criterion: with E0 = E1 = E2 = 0, the system
/// is complex linearizable iff d^2(E3)/dx^2 vanishes identically.
pub fn criterion_e3(f: &CubicForm, zt: &ZeroTest) -> CriterionOutcome {
    for k in 0..3 {
        match f.e[k].is_zero(zt) {
            v if v.is_zero() => {}
            ZeroVerdict::NonZero => return CriterionOutcome::NotApplicable,
            _ => return CriterionOutcome::Undecided,
        }
    }
    let second = f.e[3].diff(CVar::X).diff(CVar::X);
    match second.is_zero(zt) {
        v if v.is_zero() => CriterionOutcome::Pass,
        ZeroVerdict::NonZero => CriterionOutcome::Fail,
        _ => CriterionOutcome::Undecided,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    E3Only,
    Quadratic,
    GeneralCubic,
    NonCubic,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    /// Cubic nonlinearity, complex linearizable; algebra dimension <= 4.
    Upsilon2,
    /// Quadratically semi-linear CR-pass shape. Candidate only: the full
    /// fibre-preserving test is out of scope here.
    Upsilon1Candidate,
    Outside,
    Undecided,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Classification {
    pub cr_ok: bool,
    pub cubic_ok: bool,
    pub family: Option<Family>,
    pub class: Class,
    pub criterion_ok: Option<bool>,
    pub linear_target: Option<String>,
    pub notes: Vec<String>,
}

impl Classification {
    fn outside(cr_ok: bool, cubic_ok: bool, family: Option<Family>, note: Option<String>) -> Self {
        Classification {
            cr_ok,
            cubic_ok,
            family,
            class: Class::Outside,
            criterion_ok: None,
            linear_target: None,
            notes: note.into_iter().collect(),
        }
    }

    fn undecided(cr_ok: bool, cubic_ok: bool, family: Option<Family>, note: String) -> Self {
        Classification {
            cr_ok,
            cubic_ok,
            family,
            class: Class::Undecided,
            criterion_ok: None,
            linear_target: None,
            notes: vec![note],
        }
    }
}

/// Full classification pipeline: CR gate, lift, cubic extraction, criterion.
pub fn classify(s: &OdeSystem, zt: &ZeroTest) -> Classification {
    match check_cr(s, zt) {
        CrOutcome::Pass => {}
        CrOutcome::Fail { which, .. } => {
            return Classification::outside(
                false,
                false,
                None,
                Some(format!("CR condition {} is nonzero", which.describe())),
            )
        }
        CrOutcome::Undecided { which } => {
            return Classification::undecided(
                false,
                false,
                None,
                format!("CR condition {} is undecided", which.describe()),
            )
        }
    }
    let base = match lift(s) {
        Ok(c) => c,
        Err(e) => {
            return Classification::undecided(true, false, None, format!("lift failed: {e}"))
        }
    };
    classify_base(&base, zt)
}

/// Classification of an already-lifted base equation.
pub fn classify_base(base: &ComplexOde, zt: &ZeroTest) -> Classification {
    let form = match extract_cubic(base) {
        Ok(f) => f,
        Err(ExtractError::NotCubic) => {
            return Classification::outside(
                true,
                false,
                Some(Family::NonCubic),
                Some("base equation is not cubically semi-linear".into()),
            )
        }
        Err(e) => {
            return Classification::undecided(true, false, None, format!("extraction failed: {e}"))
        }
    };
    let mut zeroness = Vec::new();
    for k in 0..4 {
        let v = form.e[k].is_zero(zt);
        if v == ZeroVerdict::Undecided {
            return Classification::undecided(
                true,
                true,
                None,
                format!("zero test of E{k} is undecided"),
            );
        }
        zeroness.push(v.is_zero());
    }
    if zeroness[3] {
        // Degree <= 2 in u': the paper's quadratically semi-linear shape.
        return Classification {
            cr_ok: true,
            cubic_ok: true,
            family: Some(Family::Quadratic),
            class: Class::Upsilon1Candidate,
            criterion_ok: None,
            linear_target: None,
            notes: vec![
                "quadratically semi-linear CR-pass shape: Upsilon_1 candidate (full test out of scope)"
                    .into(),
            ],
        };
    }
    if !(zeroness[0] && zeroness[1] && zeroness[2]) {
        return Classification {
            cr_ok: true,
            cubic_ok: true,
            family: Some(Family::GeneralCubic),
            class: Class::Undecided,
            criterion_ok: None,
            linear_target: None,
            notes: vec![
                "undecided (general cubic): the four-constraint test for the full cubic family is not reproduced here"
                    .into(),
            ],
        };
    }
    match criterion_e3(&form, zt) {
        CriterionOutcome::Pass => {
            let target = linearize::hodograph(&form, zt)
                .ok()
                .map(|t| t.describe());
            Classification {
                cr_ok: true,
                cubic_ok: true,
                family: Some(Family::E3Only),
                class: Class::Upsilon2,
                criterion_ok: Some(true),
                linear_target: target,
                notes: Vec::new(),
            }
        }
        CriterionOutcome::Fail => Classification {
            cr_ok: true,
            cubic_ok: true,
            family: Some(Family::E3Only),
            class: Class::Outside,
            criterion_ok: Some(false),
            linear_target: None,
            notes: vec!["E3-only family but d^2(E3)/dx^2 is nonzero".into()],
        },
        CriterionOutcome::NotApplicable => unreachable!("E0..E2 vanish by the checks above"),
        CriterionOutcome::Undecided => Classification::undecided(
            true,
            true,
            Some(Family::E3Only),
            "criterion zero test undecided".into(),
        ),
    }
}

/// Rebuild omega from a cubic form (sign unfolded); used by tests and the
/// verification pipeline.
pub fn cubic_to_omega(f: &CubicForm) -> CScalar {
    let up = CScalar::up();
    let mut omega = CScalar::int(0);
    for k in 0..4 {
        omega = omega + f.e[k].clone() * up.pow(k as i32);
    }
    -omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexify::realify;
    use crate::corpus;
    use crate::expr::Expr;

    fn zt() -> ZeroTest {
        ZeroTest::default()
    }

    fn base_of(s: &OdeSystem) -> ComplexOde {
        lift(s).unwrap()
    }

    #[test]
    fn extract_cubic_x_base() {
        // u'' = x u'^3  =>  E3 = -x, rest zero
        let c = base_of(&corpus::cubic_x());
        let f = extract_cubic(&c).unwrap();
        assert!(f.e3().normal_eq(&(-CScalar::x()), &zt()));
        for k in 0..3 {
            assert!(f.e[k].is_zero(&zt()).is_zero());
        }
    }

    #[test]
    fn extract_emden_base() {
        // u'' = -3 u u' - u^3  =>  E1 = 3u, E0 = u^3
        let c = base_of(&corpus::emden());
        let f = extract_cubic(&c).unwrap();
        assert!(f.e1().normal_eq(&(CScalar::int(3) * CScalar::u()), &zt()));
        assert!(f.e0().normal_eq(&CScalar::u().pow(3), &zt()));
        assert!(f.e2().is_zero(&zt()).is_zero());
        assert!(f.e3().is_zero(&zt()).is_zero());
    }

    #[test]
    fn extract_not_cubic() {
        let c = ComplexOde::new(CScalar::up().exp());
        assert_eq!(extract_cubic(&c), Err(ExtractError::NotCubic));
        let c = ComplexOde::new(CScalar::up().pow(4));
        assert_eq!(extract_cubic(&c), Err(ExtractError::NotCubic));
        let c = ComplexOde::new(CScalar::int(1) / CScalar::up());
        assert_eq!(extract_cubic(&c), Err(ExtractError::NotCubic));
    }

    #[test]
    fn extraction_reconstructs_omega() {
        for (name, s) in corpus::all_systems() {
            let c = base_of(&s);
            if let Ok(f) = extract_cubic(&c) {
                let back = cubic_to_omega(&f);
                assert!(
                    back.normal_eq(&c.omega, &zt()),
                    "cubic fold-back mismatch for {name}"
                );
            }
        }
    }

    #[test]
    fn criterion_examples() {
        let cases_pass = [
            -CScalar::int(1),
            -CScalar::x(),
            -CScalar::u(),
            -(CScalar::x() * CScalar::u()),
            -(CScalar::x() * CScalar::u().pow(2)),
        ];
        for e3 in cases_pass {
            let f = CubicForm {
                e: [CScalar::int(0), CScalar::int(0), CScalar::int(0), e3],
            };
            assert_eq!(criterion_e3(&f, &zt()), CriterionOutcome::Pass);
        }
        let f = CubicForm {
            e: [
                CScalar::int(0),
                CScalar::int(0),
                CScalar::int(0),
                -(CScalar::x().pow(2) * CScalar::u()),
            ],
        };
        assert_eq!(criterion_e3(&f, &zt()), CriterionOutcome::Fail);
    }

    #[test]
    fn criterion_not_applicable() {
        let c = base_of(&corpus::emden());
        let f = extract_cubic(&c).unwrap();
        assert_eq!(criterion_e3(&f, &zt()), CriterionOutcome::NotApplicable);
    }

    #[test]
    fn criterion_random_linear_x_forms() {
        // E3 = g(u)*x + h(u) passes for arbitrary polynomial g, h.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut g = CScalar::int(0);
            let mut h = CScalar::int(0);
            for k in 0..3 {
                g = g + CScalar::int(rng.gen_range(-4i64..5)) * CScalar::u().pow(k);
                h = h + CScalar::int(rng.gen_range(-4i64..5)) * CScalar::u().pow(k);
            }
            let e3 = g * CScalar::x() + h;
            let f = CubicForm {
                e: [CScalar::int(0), CScalar::int(0), CScalar::int(0), e3],
            };
            assert_eq!(criterion_e3(&f, &zt()), CriterionOutcome::Pass);
        }
    }

    #[test]
    fn classify_upsilon2_corpus() {
        for (name, s) in [
            ("cubic_const", corpus::cubic_const()),
            ("cubic_x", corpus::cubic_x()),
            ("cubic_u", corpus::cubic_u()),
            ("cubic_xu", corpus::cubic_xu()),
            ("cubic_xu2", corpus::cubic_xu2()),
        ] {
            let c = classify(&s, &zt());
            assert_eq!(c.class, Class::Upsilon2, "{name} not classified Upsilon2");
            assert_eq!(c.criterion_ok, Some(true), "{name} criterion");
            assert_eq!(c.family, Some(Family::E3Only));
        }
    }

    #[test]
    fn classify_outside_on_cr_fail() {
        let s = OdeSystem::new(Expr::f1(), -Expr::f2());
        let c = classify(&s, &zt());
        assert_eq!(c.class, Class::Outside);
        assert!(!c.cr_ok);
    }

    #[test]
    fn classify_appendix_is_upsilon1_candidate() {
        let c = classify(&corpus::rational_g2(), &zt());
        assert_eq!(c.class, Class::Upsilon1Candidate);
        assert_eq!(c.family, Some(Family::Quadratic));
    }

    #[test]
    fn classify_emden_is_quadratic_candidate() {
        // E3 vanishes for the Emden base (E1 = 3u, E0 = u^3), so the shape
        // is quadratically semi-linear; only the candidate marking is made.
        let c = classify(&corpus::emden(), &zt());
        assert_eq!(c.class, Class::Upsilon1Candidate);
        assert_eq!(c.family, Some(Family::Quadratic));
    }

    #[test]
    fn classify_general_cubic_is_undecided() {
        // u'' + u'^3 + u' = 0 has E3 and E1 nonzero: no criterion is stated
        // for that shape, so the class stays undecided.
        let base = ComplexOde::new(-(CScalar::up().pow(3)) - CScalar::up());
        let c = classify_base(&base, &zt());
        assert_eq!(c.class, Class::Undecided);
        assert_eq!(c.family, Some(Family::GeneralCubic));
    }

    #[test]
    fn corpus_classes_are_disjoint() {
        for (name, s) in corpus::all_systems() {
            let c = classify(&s, &zt());
            let u2 = c.class == Class::Upsilon2;
            let u1 = c.class == Class::Upsilon1Candidate;
            assert!(!(u1 && u2), "{name} tagged in both classes");
        }
    }

    #[test]
    fn realified_coefficients_match_beta_gamma_pairing() {
        // cubic_xu comes from beta = x f1, gamma = x f2; E3 = -(beta + i gamma).
        let c = base_of(&corpus::cubic_xu());
        let f = extract_cubic(&c).unwrap();
        let (re, im) = realify(f.e3()).unwrap();
        assert!(re.normal_eq(&(-(Expr::x() * Expr::f1())), &zt()));
        assert!(im.normal_eq(&(-(Expr::x() * Expr::f2())), &zt()));
    }
}
