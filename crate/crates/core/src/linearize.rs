//! Complex point transformations: the hodograph swap for the E3-only family,
//! the catalog transformation for the coupled modified Emden system, closed
//! forms for the linear targets, and the plane geometry of the free-particle
//! image.

use crate::classify::CubicForm;
use crate::complexify::{realify, ComplexOde, RealifyError};
use crate::expr::{
    print_tree, q_int, CScalar, CVar, Coeff, Expr, NormalError, Symbol, Tree, Var, ZeroTest,
    ZeroVerdict, CQ, Q,
};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// A complex Lie point transformation (chi(x,u), U(x,u)).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointTransform {
    pub chi: CScalar,
    pub big_u: CScalar,
}

impl PointTransform {
    pub fn new(chi: CScalar, big_u: CScalar) -> Self {
        PointTransform { chi, big_u }
    }

    /// The hodograph swap chi = u, U = x.
    pub fn hodograph_swap() -> Self {
        PointTransform::new(CScalar::u(), CScalar::x())
    }

    /// chi_x U_u - chi_u U_x, the Jacobian-style nondegeneracy expression.
    pub fn jacobian(&self) -> CScalar {
        self.chi.diff(CVar::X) * self.big_u.diff(CVar::U)
            - self.chi.diff(CVar::U) * self.big_u.diff(CVar::X)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetTag {
    /// U'' = c with constant c.
    Const,
    /// U'' = c U with nonzero real constant c (the paper's case is c = -1).
    Harmonic,
    /// U'' = -chi U (or U'' = chi U), solved by Airy functions.
    Airy,
    GeneralLinear,
}

/// Linear image U'' = g(chi) U + h(chi) of an E3-only equation under the
/// hodograph swap. The X slot of the scalars stands for chi.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearTarget {
    pub g: CScalar,
    pub h: CScalar,
    pub tag: TargetTag,
}

/// Variables used only for displaying transformed equations.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum ChiVar {
    Chi,
    U,
    Up,
}

impl Symbol for ChiVar {
    fn name(self) -> &'static str {
        match self {
            ChiVar::Chi => "chi",
            ChiVar::U => "U",
            ChiVar::Up => "U'",
        }
    }
    fn all() -> &'static [Self] {
        &[ChiVar::Chi, ChiVar::U, ChiVar::Up]
    }
}

/// Public display of scalars living in transformed coordinates (chi, U).
pub fn display_in_chi_u(c: &CScalar) -> String {
    chi_display(c)
}

fn chi_display(c: &CScalar) -> String {
    let t = c.tree().map_leaves(&|k: &CQ| Tree::constant(k.clone()), &|v| {
        Tree::var(match v {
            CVar::X => ChiVar::Chi,
            CVar::U => ChiVar::U,
            CVar::Up => ChiVar::Up,
        })
    });
    print_tree(&t)
}

impl LinearTarget {
    /// Right-hand side g(chi) U + h(chi) as a complex ODE in the (x, u)
    /// slots, i.e. directly consumable by `verify_transform` as a target.
    pub fn to_complex_ode(&self) -> ComplexOde {
        ComplexOde::new(self.g.clone() * CScalar::u() + self.h.clone())
    }

    pub fn describe(&self) -> String {
        let rhs = (self.g.clone() * CScalar::u() + self.h.clone())
            .normal_form()
            .unwrap_or_else(|_| self.g.clone() * CScalar::u() + self.h.clone());
        format!("U'' = {}", chi_display(&rhs))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum LinearizeError {
    #[error("nonlinear-target: d^2(E3)/dx^2 does not vanish, the hodograph image is not linear")]
    NonlinearTarget,
    #[error("the cubic form is not E3-only")]
    NotE3Only,
    #[error("degenerate transformation: the Jacobian expression vanishes identically")]
    Degenerate,
    #[error("zero test undecided while {0}")]
    Undecided(&'static str),
    #[error(transparent)]
    Normal(#[from] NormalError),
    #[error(transparent)]
    Realify(#[from] RealifyError),
}

/// Map u'' + E3(x,u) u'^3 = 0 through chi = u, U = x. The image is
/// U'' = E3(U, chi); when E3 = g(u) x + h(u) that is the linear equation
/// U'' = g(chi) U + h(chi).
pub fn hodograph(f: &CubicForm, zt: &ZeroTest) -> Result<LinearTarget, LinearizeError> {
    for k in 0..3 {
        match f.e[k].is_zero(zt) {
            v if v.is_zero() => {}
            ZeroVerdict::NonZero => return Err(LinearizeError::NotE3Only),
            _ => return Err(LinearizeError::Undecided("testing E0..E2")),
        }
    }
    let e3 = f.e3().normal_form()?;
    let g_of_u = e3.diff(CVar::X).normal_form()?;
    if g_of_u.vars_used().contains(&CVar::X) {
        return Err(LinearizeError::NonlinearTarget);
    }
    let h_of_u = (e3.clone() - CScalar::x() * g_of_u.clone()).normal_form()?;
    if h_of_u.vars_used().contains(&CVar::X) {
        return Err(LinearizeError::NonlinearTarget);
    }
    // Swap: the coefficient argument u becomes chi (the X slot).
    let swap = BTreeMap::from([(CVar::U, CScalar::x())]);
    let g = g_of_u.substitute(&swap)?;
    let h = h_of_u.substitute(&swap)?;

    let g_zero = g.is_zero(zt).is_zero();
    let h_zero = h.is_zero(zt).is_zero();
    let tag = if g_zero && h.as_const().is_some() {
        TargetTag::Const
    } else if h_zero && g.as_const().is_some_and(|c| c.is_real() && !Coeff::is_zero(c)) {
        TargetTag::Harmonic
    } else if h_zero
        && ((g.clone() - CScalar::x()).is_zero(zt).is_zero()
            || (g.clone() + CScalar::x()).is_zero(zt).is_zero())
    {
        TargetTag::Airy
    } else {
        TargetTag::GeneralLinear
    };
    Ok(LinearTarget { g, h, tag })
}

#[derive(Clone, PartialEq, Debug)]
pub enum VerifyOutcome {
    Verified,
    Refuted { witness: CScalar },
    Undecided,
}

/// Check symbolically that `t` maps `source` into `target`: U' and U'' are
/// formed with total derivatives along solutions of the source, substituted
/// into the target relation, and zero-tested.
pub fn verify_transform(
    t: &PointTransform,
    source: &ComplexOde,
    target: &ComplexOde,
    zt: &ZeroTest,
) -> Result<VerifyOutcome, LinearizeError> {
    if t.jacobian().is_zero(zt).is_zero() {
        return Err(LinearizeError::Degenerate);
    }
    let total = |e: &CScalar| -> CScalar {
        e.diff(CVar::X)
            + CScalar::up() * e.diff(CVar::U)
            + source.omega.clone() * e.diff(CVar::Up)
    };
    let dchi = total(&t.chi);
    if dchi.is_zero(zt).is_zero() {
        return Err(LinearizeError::Degenerate);
    }
    let u1 = (total(&t.big_u) / dchi.clone()).normal_form()?;
    let u2 = (total(&u1) / dchi).normal_form()?;
    let target_rhs = target.omega.substitute(&BTreeMap::from([
        (CVar::X, t.chi.clone()),
        (CVar::U, t.big_u.clone()),
        (CVar::Up, u1.clone()),
    ]))?;
    let defect = (u2 - target_rhs).normal_form()?;
    Ok(match defect.is_zero(zt) {
        ZeroVerdict::Zero | ZeroVerdict::ZeroNumeric => VerifyOutcome::Verified,
        ZeroVerdict::NonZero => VerifyOutcome::Refuted { witness: defect },
        ZeroVerdict::Undecided => VerifyOutcome::Undecided,
    })
}

/// General solution of a closed-form linear target.
#[derive(Clone, PartialEq, Debug)]
pub enum SolutionKind {
    /// U = particular + a*hom1 + b*hom2, trees in chi (the X slot).
    Closed {
        particular: CScalar,
        hom1: CScalar,
        hom2: CScalar,
    },
    /// U = a*Ai(-chi) + b*Bi(-chi) (negated) or a*Ai(chi) + b*Bi(chi).
    Airy { negated: bool },
    /// No closed form in the catalog; evaluable by Taylor continuation.
    NumericOnly,
}

#[derive(Clone, PartialEq, Debug)]
pub struct GeneralSolution {
    pub target: LinearTarget,
    pub kind: SolutionKind,
}

impl GeneralSolution {
    pub fn describe(&self) -> String {
        match &self.kind {
            SolutionKind::Closed {
                particular,
                hom1,
                hom2,
            } => {
                let mut s = String::from("U = ");
                if !particular.is_const_zero() {
                    s.push_str(&chi_display(particular));
                    s.push_str(" + ");
                }
                s.push_str(&format!(
                    "a*({}) + b*({})",
                    chi_display(hom1),
                    chi_display(hom2)
                ));
                s
            }
            SolutionKind::Airy { negated } => {
                if *negated {
                    "U = a*Ai(-chi) + b*Bi(-chi)".into()
                } else {
                    "U = a*Ai(chi) + b*Bi(chi)".into()
                }
            }
            SolutionKind::NumericOnly => {
                "numeric-only: evaluable by Taylor continuation of the linear target".into()
            }
        }
    }
}

/// Solve U'' = g U + h for the catalog tags. Const targets integrate twice,
/// harmonic targets pick the sin/cos or exp pair, Airy targets defer to the
/// seeded continuation; everything else is numeric-only.
pub fn solve_linear_target(t: &LinearTarget) -> GeneralSolution {
    let chi = CScalar::x();
    let kind = match t.tag {
        TargetTag::Const => {
            let c = t
                .h
                .as_const()
                .cloned()
                .unwrap_or_else(|| CQ::from_i64(0));
            SolutionKind::Closed {
                particular: (CScalar::constant(c) * chi.pow(2)) / CScalar::int(2),
                hom1: chi.clone(),
                hom2: CScalar::int(1),
            }
        }
        TargetTag::Harmonic => {
            let c = t.h.as_const().map(|_| ()).and(t.g.as_const().cloned());
            let c = c.expect("harmonic tag implies constant g");
            debug_assert!(c.is_real());
            if c.re.is_negative() {
                let s = CScalar::from_q(-c.re.clone()).sqrt();
                SolutionKind::Closed {
                    particular: CScalar::int(0),
                    hom1: (s.clone() * chi.clone()).sin(),
                    hom2: (s * chi.clone()).cos(),
                }
            } else {
                let s = CScalar::from_q(c.re.clone()).sqrt();
                SolutionKind::Closed {
                    particular: CScalar::int(0),
                    hom1: (s.clone() * chi.clone()).exp(),
                    hom2: (-(s * chi.clone())).exp(),
                }
            }
        }
        TargetTag::Airy => {
            let negated = (t.g.clone() + CScalar::x())
                .is_zero(&ZeroTest::default())
                .is_zero();
            SolutionKind::Airy { negated }
        }
        TargetTag::GeneralLinear => SolutionKind::NumericOnly,
    };
    GeneralSolution { target: t.clone(), kind }
}

/// Explicit solution families recoverable in closed form after the hodograph.
#[derive(Clone, PartialEq, Debug)]
pub enum ExplicitCatalog {
    /// Base u'' = kappa u'^3 with real rational kappa:
    /// u = q +- sqrt(p - (2/kappa) x) with complex constants p, q.
    ConstTarget { kappa: Q },
    /// Base u'' = x u'^3: u = arctan(x / sqrt(a - x^2)) + b with real a > 0.
    ArctanTarget,
    None,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SolutionForm {
    /// The implicit pair Re U(f1 + i f2) = x, Im U(f1 + i f2) = 0.
    pub implicit: (String, String),
    /// Template text of catalog explicit forms (branch signs written +-).
    pub explicit: Vec<String>,
    pub numeric_only: bool,
}

/// Describe how solutions of the original system are recovered: under the
/// hodograph, solutions satisfy x = U(u), split into the implicit real pair.
pub fn recover_solution(f: &CubicForm, sol: &GeneralSolution) -> SolutionForm {
    let implicit = (
        "Re U(f1 + i*f2) = x".to_string(),
        "Im U(f1 + i*f2) = 0".to_string(),
    );
    let mut explicit = Vec::new();
    match explicit_catalog(f) {
        ExplicitCatalog::ConstTarget { kappa } => {
            let two_over = Expr::rational(q_int(2) / kappa);
            explicit.push(format!(
                "u = q +- sqrt(p - {}*x) for complex constants p, q",
                two_over
            ));
            explicit.push(
                "f1 = q1 +- sqrt((R + w)/2), f2 = q2 +- sqrt((R - w)/2), \
                 w = p1 - 2x/kappa, R = sqrt(w^2 + p2^2)"
                    .to_string(),
            );
        }
        ExplicitCatalog::ArctanTarget => {
            explicit.push("u = arctan(x/sqrt(a - x^2)) + b".to_string());
        }
        ExplicitCatalog::None => {}
    }
    SolutionForm {
        implicit,
        explicit,
        numeric_only: matches!(sol.kind, SolutionKind::NumericOnly | SolutionKind::Airy { .. }),
    }
}

/// Which explicit family the cubic form belongs to.
pub fn explicit_catalog(f: &CubicForm) -> ExplicitCatalog {
    let zt = ZeroTest::default();
    for k in 0..3 {
        if !f.e[k].is_zero(&zt).is_zero() {
            return ExplicitCatalog::None;
        }
    }
    if let Some(c) = f.e3().as_const() {
        if c.is_real() && !Coeff::is_zero(c) {
            // E3 = -kappa for u'' = kappa u'^3
            return ExplicitCatalog::ConstTarget {
                kappa: -c.re.clone(),
            };
        }
    }
    if (f.e3().clone() + CScalar::x()).is_zero(&zt).is_zero() {
        return ExplicitCatalog::ArctanTarget;
    }
    ExplicitCatalog::None
}

/// All four sign branches of u = q +- sqrt(p - (2/kappa) x) split into real
/// nested-radical expressions in x.
pub fn const_target_branches(kappa: &Q, p: (&Q, &Q), q: (&Q, &Q)) -> Vec<(Expr, Expr)> {
    let w = Expr::rational(p.0.clone()) - Expr::rational(q_int(2) / kappa.clone()) * Expr::x();
    let r = (w.clone() * w.clone() + Expr::rational(p.1.clone() * p.1.clone())).sqrt();
    let half = Expr::ratio(1, 2);
    let re_part = (half.clone() * (r.clone() + w.clone())).sqrt();
    let im_part = (half * (r - w)).sqrt();
    let mut out = Vec::new();
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            out.push((
                Expr::rational(q.0.clone()) + Expr::int(s1) * re_part.clone(),
                Expr::rational(q.1.clone()) + Expr::int(s2) * im_part.clone(),
            ));
        }
    }
    out
}

/// The real scalar solution u = arctan(x/sqrt(a - x^2)) + b of u'' = x u'^3.
pub fn arctan_solution(a: &Q, b: &Q) -> Expr {
    let inner = Expr::rational(a.clone()) - Expr::x().pow(2);
    (Expr::x() / inner.sqrt()).arctan() + Expr::rational(b.clone())
}

// ---------------------------------------------------------------------------
// The coupled modified Emden catalog entry.
// ---------------------------------------------------------------------------

/// Base equation u'' + 3 u u' + u^3 = 0 of the coupled modified Emden system.
pub fn emden_base() -> ComplexOde {
    ComplexOde::new(-(CScalar::int(3) * CScalar::u() * CScalar::up()) - CScalar::u().pow(3))
}

/// chi = x - 1/u, U = x^2/2 - x/u maps the Emden base onto U'' = 0.
pub fn emden_transform() -> PointTransform {
    PointTransform::new(
        CScalar::x() - CScalar::int(1) / CScalar::u(),
        CScalar::x().pow(2) / CScalar::int(2) - CScalar::x() / CScalar::u(),
    )
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum EmdenError {
    #[error("singular-interval: the denominator vanishes on the requested grid")]
    SingularInterval,
}

/// Closed-form rational solution of the Emden system with four real
/// constants, obtained by inverting the catalog transformation against
/// U = (a1 + i a2) chi + (b1 + i b2).
pub fn emden_solve(
    a1: &Q,
    a2: &Q,
    b1: &Q,
    b2: &Q,
    interval: Option<(f64, f64)>,
) -> Result<(Expr, Expr), EmdenError> {
    let [a1e, a2e, b1e, b2e] = [a1, a2, b1, b2].map(|q| Expr::rational(q.clone()));
    let x = Expr::x();
    let num1 = Expr::int(2) * x.pow(3) - Expr::int(6) * x.pow(2) * a1e.clone()
        + Expr::int(4)
            * (a2e.clone() * a2e.clone() + a1e.clone() * a1e.clone() - b1e.clone())
            * x.clone()
        + Expr::int(4) * a1e.clone() * b1e.clone()
        + Expr::int(4) * a2e.clone() * b2e.clone();
    let num2 = (Expr::int(2) * x.pow(2) + Expr::int(4) * b1e.clone()) * a2e.clone()
        + Expr::int(4) * b2e.clone() * (x.clone() - a1e.clone());
    let den = x.pow(4) - Expr::int(4) * x.pow(3) * a1e.clone()
        + Expr::int(4)
            * ((a2e.clone() * a2e.clone() + a1e.clone() * a1e.clone() - b1e.clone()) * x.pow(2)
                + Expr::int(2)
                    * (a2e.clone() * b2e.clone() + a1e.clone() * b1e.clone())
                    * x.clone()
                + b1e.clone() * b1e.clone()
                + b2e.clone() * b2e.clone());
    if let Some((lo, hi)) = interval {
        let n = 400;
        for i in 0..=n {
            let xv = lo + (hi - lo) * (i as f64) / (n as f64);
            let v = den
                .eval_real(&crate::expr::RealPoint {
                    x: xv,
                    f1: 0.0,
                    f2: 0.0,
                    f1p: 0.0,
                    f2p: 0.0,
                })
                .unwrap_or(0.0);
            if v.abs() < 1e-9 {
                return Err(EmdenError::SingularInterval);
            }
        }
        // Sign changes between samples also certify a root in the interval.
        let mut prev: Option<f64> = None;
        for i in 0..=n {
            let xv = lo + (hi - lo) * (i as f64) / (n as f64);
            let v = den
                .eval_real(&crate::expr::RealPoint {
                    x: xv,
                    f1: 0.0,
                    f2: 0.0,
                    f1p: 0.0,
                    f2p: 0.0,
                })
                .unwrap();
            if let Some(p) = prev {
                if p * v < 0.0 {
                    return Err(EmdenError::SingularInterval);
                }
            }
            prev = Some(v);
        }
    }
    let f1 = (num1 / den.clone()).normal_form().expect("rational");
    let f2 = (num2 / den).normal_form().expect("rational");
    Ok((f1, f2))
}

/// Outcome of the symbolic consistency check between the Emden catalog
/// transformation and the linear-image PDE/CR pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct EmdenConsistency {
    /// U(x, u) agrees with x*chi - x^2/2 after eliminating u.
    pub transform_consistent: bool,
    /// The realified image satisfies the realified U''=0 PDE pair.
    pub linpde_ok: bool,
    /// The realified image satisfies the CR pair in (chi1, chi2).
    pub cr_ok: bool,
}

impl EmdenConsistency {
    pub fn all_ok(&self) -> bool {
        self.transform_consistent && self.linpde_ok && self.cr_ok
    }
}

/// Symbolic consistency of the Emden transformation with the transformed
/// PDE + CR pair: eliminate u through the inverse u = 1/(x - chi), split the
/// resulting Phi(x, chi) into real parts (f1/f2 slots standing for
/// chi1/chi2), and check the second-order pair and the CR pair exactly.
pub fn emden_theorem1_consistency(zt: &ZeroTest) -> Result<EmdenConsistency, LinearizeError> {
    let t = emden_transform();
    // u as a function of (x, chi); the U slot holds chi here.
    let u_of_chi = CScalar::int(1) / (CScalar::x() - CScalar::u());
    let phi = t
        .big_u
        .substitute(&BTreeMap::from([(CVar::U, u_of_chi)]))?;
    // Consistency: Phi(x, chi(x,u)) == U(x,u).
    let phi_back = phi.substitute(&BTreeMap::from([(CVar::U, t.chi.clone())]))?;
    let transform_consistent = (phi_back - t.big_u.clone()).is_zero(zt).is_zero();

    // Realify Phi with the u slot holding chi: f1/f2 become chi1/chi2.
    let (p, q) = realify(&phi)?;
    let lin1 = p.diff(Var::F1).diff(Var::F1) - p.diff(Var::F2).diff(Var::F2)
        + Expr::int(2) * q.diff(Var::F1).diff(Var::F2);
    let lin2 = q.diff(Var::F1).diff(Var::F1) - q.diff(Var::F2).diff(Var::F2)
        - Expr::int(2) * p.diff(Var::F1).diff(Var::F2);
    let linpde_ok = lin1.is_zero(zt).is_zero() && lin2.is_zero(zt).is_zero();
    let cr1 = p.diff(Var::F1) - q.diff(Var::F2);
    let cr2 = p.diff(Var::F2) + q.diff(Var::F1);
    let cr_ok = cr1.is_zero(zt).is_zero() && cr2.is_zero(zt).is_zero();
    Ok(EmdenConsistency {
        transform_consistent,
        linpde_ok,
        cr_ok,
    })
}

// ---------------------------------------------------------------------------
// Plane geometry of the linear image.
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate constants: c1 = c2 = 0 does not determine planes")]
    Degenerate,
}

/// The two solution planes F1 = c1 chi1 + c2 chi2 + c3,
/// F2 = c1 chi2 - c2 chi1 + c4 with their exactly-orthogonal normals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlanePair {
    pub c: [Q; 4],
}

pub fn plane_geometry(c: [Q; 4]) -> Result<PlanePair, GeometryError> {
    if Zero::is_zero(&c[0]) && Zero::is_zero(&c[1]) {
        return Err(GeometryError::Degenerate);
    }
    Ok(PlanePair { c })
}

/// The Emden linear-image pattern F1 = a1 chi1 - a2 chi2 + b1,
/// F2 = a2 chi1 + a1 chi2 + b2, i.e. constants (a1, -a2, b1, b2).
pub fn emden_planes(a1: &Q, a2: &Q, b1: &Q, b2: &Q) -> Result<PlanePair, GeometryError> {
    plane_geometry([a1.clone(), -a2.clone(), b1.clone(), b2.clone()])
}

impl PlanePair {
    pub fn n1(&self) -> [Q; 2] {
        [self.c[0].clone(), self.c[1].clone()]
    }

    pub fn n2(&self) -> [Q; 2] {
        [self.c[1].clone(), -self.c[0].clone()]
    }

    /// n1 . n2 in exact arithmetic; identically zero by construction.
    pub fn normal_dot(&self) -> Q {
        let n1 = self.n1();
        let n2 = self.n2();
        &n1[0] * &n2[0] + &n1[1] * &n2[1]
    }

    pub fn f1_value(&self, chi1: f64, chi2: f64) -> f64 {
        let c: Vec<f64> = self.c.iter().map(|q| q.to_c64().re).collect();
        c[0] * chi1 + c[1] * chi2 + c[2]
    }

    pub fn f2_value(&self, chi1: f64, chi2: f64) -> f64 {
        let c: Vec<f64> = self.c.iter().map(|q| q.to_c64().re).collect();
        c[0] * chi2 - c[1] * chi1 + c[3]
    }

    /// Direction of the intersection line of the two graph surfaces
    /// z = F1 and z = F2 in (chi1, chi2, z); exact rational components.
    pub fn line_direction(&self) -> [Q; 3] {
        // Cross product of (c1, c2, -1) and (-c2, c1, -1).
        let c1 = &self.c[0];
        let c2 = &self.c[1];
        [
            -c2.clone() - c1.clone(),
            c2.clone() - c1.clone(),
            c1 * c1 + c2 * c2,
        ]
    }

    /// A point on the intersection line (F1 = F2).
    pub fn line_point(&self) -> Option<[f64; 3]> {
        // Solve (c1 + c2) chi1 + (c2 - c1) chi2 + c3 - c4 = 0 for one
        // coordinate with the other fixed at zero.
        let c: Vec<f64> = self.c.iter().map(|q| q.to_c64().re).collect();
        let a = c[0] + c[1];
        let b = c[1] - c[0];
        let d = c[2] - c[3];
        if a.abs() > 1e-12 {
            let chi1 = -d / a;
            Some([chi1, 0.0, self.f1_value(chi1, 0.0)])
        } else if b.abs() > 1e-12 {
            let chi2 = -d / b;
            Some([0.0, chi2, self.f1_value(0.0, chi2)])
        } else if d.abs() < 1e-12 {
            Some([0.0, 0.0, self.f1_value(0.0, 0.0)])
        } else {
            None
        }
    }

    /// CSV plot data: columns surface,chi1,chi2,value. Contains both plane
    /// patches, intersection-line samples, and an exact orthogonality row.
    pub fn to_csv(&self, n: usize, extent: f64) -> String {
        let mut out = String::from("surface,chi1,chi2,value\n");
        for i in 0..=n {
            for j in 0..=n {
                let chi1 = -extent + 2.0 * extent * (i as f64) / (n as f64);
                let chi2 = -extent + 2.0 * extent * (j as f64) / (n as f64);
                out.push_str(&format!(
                    "plane1,{},{},{}\n",
                    fmt_f(chi1),
                    fmt_f(chi2),
                    fmt_f(self.f1_value(chi1, chi2))
                ));
                out.push_str(&format!(
                    "plane2,{},{},{}\n",
                    fmt_f(chi1),
                    fmt_f(chi2),
                    fmt_f(self.f2_value(chi1, chi2))
                ));
            }
        }
        if let Some(p0) = self.line_point() {
            let dir: Vec<f64> = self
                .line_direction()
                .iter()
                .map(|q| q.to_c64().re)
                .collect();
            let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            for i in 0..=n {
                let t = (-extent + 2.0 * extent * (i as f64) / (n as f64)) / norm.max(1e-12);
                out.push_str(&format!(
                    "line,{},{},{}\n",
                    fmt_f(p0[0] + t * dir[0]),
                    fmt_f(p0[1] + t * dir[1]),
                    fmt_f(p0[2] + t * dir[2])
                ));
            }
        }
        out.push_str(&format!(
            "orthogonality,,,{}\n",
            Coeff::render(&self.normal_dot())
        ));
        out
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::extract_cubic;
    use crate::complexify::lift;
    use crate::corpus;
    use crate::expr::{q_ratio};

    fn zt() -> ZeroTest {
        ZeroTest::default()
    }

    fn form_of(s: &crate::complexify::OdeSystem) -> CubicForm {
        extract_cubic(&lift(s).unwrap()).unwrap()
    }

    #[test]
    fn hodograph_tags() {
        let t = hodograph(&form_of(&corpus::cubic_const()), &zt()).unwrap();
        assert_eq!(t.tag, TargetTag::Const);
        assert_eq!(t.describe(), "U'' = -1");

        let t = hodograph(&form_of(&corpus::cubic_x()), &zt()).unwrap();
        assert_eq!(t.tag, TargetTag::Harmonic);
        assert_eq!(t.describe(), "U'' = -U");

        let t = hodograph(&form_of(&corpus::cubic_xu()), &zt()).unwrap();
        assert_eq!(t.tag, TargetTag::Airy);
        assert_eq!(t.describe(), "U'' = -chi*U");

        let t = hodograph(&form_of(&corpus::cubic_u()), &zt()).unwrap();
        assert_eq!(t.tag, TargetTag::GeneralLinear);
        assert_eq!(t.describe(), "U'' = -chi");

        let t = hodograph(&form_of(&corpus::cubic_xu2()), &zt()).unwrap();
        assert_eq!(t.tag, TargetTag::GeneralLinear);
        assert_eq!(t.describe(), "U'' = -chi^2*U");
    }

    #[test]
    fn hodograph_nonlinear_target() {
        let f = CubicForm {
            e: [
                CScalar::int(0),
                CScalar::int(0),
                CScalar::int(0),
                -(CScalar::x().pow(2) * CScalar::u()),
            ],
        };
        assert_eq!(hodograph(&f, &zt()), Err(LinearizeError::NonlinearTarget));
    }

    #[test]
    fn verify_emden_transform() {
        let outcome = verify_transform(
            &emden_transform(),
            &emden_base(),
            &ComplexOde::new(CScalar::int(0)),
            &zt(),
        )
        .unwrap();
        assert_eq!(outcome, VerifyOutcome::Verified);
    }

    #[test]
    fn verify_identity_on_free_particle() {
        let id = PointTransform::new(CScalar::x(), CScalar::u());
        let free = ComplexOde::new(CScalar::int(0));
        assert_eq!(
            verify_transform(&id, &free, &free, &zt()).unwrap(),
            VerifyOutcome::Verified
        );
    }

    #[test]
    fn verify_hodograph_on_all_five() {
        for (name, s) in [
            ("cubic_const", corpus::cubic_const()),
            ("cubic_x", corpus::cubic_x()),
            ("cubic_u", corpus::cubic_u()),
            ("cubic_xu", corpus::cubic_xu()),
            ("cubic_xu2", corpus::cubic_xu2()),
        ] {
            let base = lift(&s).unwrap();
            let target = hodograph(&form_of(&s), &zt()).unwrap().to_complex_ode();
            let outcome =
                verify_transform(&PointTransform::hodograph_swap(), &base, &target, &zt())
                    .unwrap();
            assert_eq!(outcome, VerifyOutcome::Verified, "hodograph fails on {name}");
        }
    }

    #[test]
    fn verify_refutes_wrong_target() {
        let base = lift(&corpus::cubic_const()).unwrap();
        let wrong = ComplexOde::new(CScalar::int(2)); // U'' = 2, not -1
        let outcome =
            verify_transform(&PointTransform::hodograph_swap(), &base, &wrong, &zt()).unwrap();
        assert!(matches!(outcome, VerifyOutcome::Refuted { .. }));
    }

    #[test]
    fn closed_solutions_satisfy_target() {
        // For every closed-form catalog solution, hom'' - g hom - h*0 == 0 and
        // particular'' - g particular - h == 0, symbolically in chi.
        for s in [corpus::cubic_const(), corpus::cubic_x()] {
            let t = hodograph(&form_of(&s), &zt()).unwrap();
            let sol = solve_linear_target(&t);
            let SolutionKind::Closed {
                particular,
                hom1,
                hom2,
            } = &sol.kind
            else {
                panic!("expected closed solution");
            };
            for hom in [hom1, hom2] {
                let defect = hom.diff(CVar::X).diff(CVar::X) - t.g.clone() * hom.clone();
                assert!(defect.is_zero(&zt()).is_zero(), "homogeneous defect for {hom}");
            }
            let defect = particular.diff(CVar::X).diff(CVar::X)
                - t.g.clone() * particular.clone()
                - t.h.clone();
            assert!(defect.is_zero(&zt()).is_zero());
        }
    }

    #[test]
    fn emden_solve_zero_constants() {
        let z = q_ratio(0, 1);
        let (f1, f2) = emden_solve(&z, &z, &z, &z, None).unwrap();
        assert!(f1.normal_eq(&(Expr::int(2) / Expr::x()), &zt()));
        assert!(f2.is_zero(&zt()).is_zero());
    }

    #[test]
    fn emden_solution_exact_residual() {
        // Generic constants: the rational pair satisfies the system exactly.
        let (a1, a2, b1, b2) = (q_ratio(1, 2), q_ratio(1, 3), q_ratio(-1, 4), q_ratio(2, 5));
        let (f1x, f2x) = emden_solve(&a1, &a2, &b1, &b2, None).unwrap();
        let s = corpus::emden();
        let bind = BTreeMap::from([
            (Var::F1, f1x.clone()),
            (Var::F2, f2x.clone()),
            (Var::F1p, f1x.diff(Var::X)),
            (Var::F2p, f2x.diff(Var::X)),
        ]);
        let r1 = f1x.diff(Var::X).diff(Var::X) - s.omega1.substitute(&bind).unwrap();
        let r2 = f2x.diff(Var::X).diff(Var::X) - s.omega2.substitute(&bind).unwrap();
        assert_eq!(r1.is_zero(&zt()), crate::expr::ZeroVerdict::Zero);
        assert_eq!(r2.is_zero(&zt()), crate::expr::ZeroVerdict::Zero);
    }

    #[test]
    fn emden_singular_interval_detected() {
        // With all constants zero the denominator is x^4: singular at 0.
        let z = q_ratio(0, 1);
        assert_eq!(
            emden_solve(&z, &z, &z, &z, Some((-1.0, 1.0))),
            Err(EmdenError::SingularInterval)
        );
        assert!(emden_solve(&z, &z, &z, &z, Some((1.0, 2.0))).is_ok());
    }

    #[test]
    fn planes_axis_case() {
        let p = plane_geometry([q_int(1), q_int(0), q_int(0), q_int(0)]).unwrap();
        assert_eq!(p.f1_value(0.7, -0.3), 0.7);
        assert_eq!(p.f2_value(0.7, -0.3), -0.3);
        assert!(Zero::is_zero(&p.normal_dot()));
    }

    #[test]
    fn planes_orthogonal_random() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let c = [
                q_ratio(rng.gen_range(-20i64..21).max(1), rng.gen_range(1i64..7)),
                q_ratio(rng.gen_range(-20i64..21), rng.gen_range(1i64..7)),
                q_ratio(rng.gen_range(-20i64..21), rng.gen_range(1i64..7)),
                q_ratio(rng.gen_range(-20i64..21), rng.gen_range(1i64..7)),
            ];
            let p = plane_geometry(c).unwrap();
            assert!(Zero::is_zero(&p.normal_dot()));
        }
    }

    #[test]
    fn planes_emden_pattern() {
        // F1 = a1 chi1 - a2 chi2 + b1, F2 = a2 chi1 + a1 chi2 + b2.
        let (a1, a2, b1, b2) = (q_int(2), q_int(3), q_int(-1), q_int(5));
        let p = emden_planes(&a1, &a2, &b1, &b2).unwrap();
        let (x1, x2) = (0.25, -1.5);
        let f1 = 2.0 * x1 - 3.0 * x2 + (-1.0);
        let f2 = 3.0 * x1 + 2.0 * x2 + 5.0;
        assert!((p.f1_value(x1, x2) - f1).abs() < 1e-12);
        assert!((p.f2_value(x1, x2) - f2).abs() < 1e-12);
        assert!(Zero::is_zero(&p.normal_dot()));
    }

    #[test]
    fn theorem1_consistency_for_emden() {
        let c = emden_theorem1_consistency(&zt()).unwrap();
        assert!(c.transform_consistent);
        assert!(c.linpde_ok);
        assert!(c.cr_ok);
    }

    #[test]
    fn csv_has_orthogonality_row() {
        let p = plane_geometry([q_int(1), q_int(2), q_int(0), q_int(1)]).unwrap();
        let csv = p.to_csv(4, 1.0);
        assert!(csv.starts_with("surface,chi1,chi2,value\n"));
        assert!(csv.contains("orthogonality,,,0\n"));
        assert!(csv.contains("line,"));
    }
}
