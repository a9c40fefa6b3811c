//! Numerical backbone: adaptive integration, residual evaluation of closed
//! forms, Taylor-series analytic continuation, and implicit-curve tracing.

mod rk;
mod taylor;
mod trace;

pub use rk::{integrate, Trajectory};
pub use taylor::{airy_seeds, gamma_lanczos, AnalyticFunction, Continuation};
pub use trace::{correct_onto_curve, trace_implicit, TraceOptions, TracePoint, TracedCurve};

use crate::complexify::OdeSystem;
use crate::expr::{CScalar, CVar, Expr, Var};
use crate::linearize::{GeneralSolution, SolutionKind};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum NumericError {
    #[error("pole-encounter: the right-hand side is not evaluable on the trajectory")]
    PoleEncounter,
    #[error("step-underflow: the step size collapsed below the resolution limit")]
    StepUnderflow,
    #[error("grid-singular: a closed form is not evaluable on the requested grid")]
    GridSingular,
    #[error("lost-curve: Newton correction failed to reconverge onto Im W = 0")]
    LostCurve,
    #[error("critical-point: W' vanished along the traced curve")]
    CriticalPoint,
    #[error("the expression is not a polynomial in the expected variable")]
    NotPolynomial,
}

/// Evaluation interface shared by closed-form maps and ODE germs: returns
/// (W(u), W'(u)).
pub trait AnalyticEval {
    fn eval(&mut self, u: C64) -> Result<(C64, C64), NumericError>;
}

/// Closed-form analytic map W(u) given as a complex scalar in the u slot.
#[derive(Clone, Debug)]
pub struct ClosedMap {
    w: CScalar,
    dw: CScalar,
}

impl ClosedMap {
    pub fn new(w: CScalar) -> Self {
        let dw = w.diff(CVar::U);
        ClosedMap { w, dw }
    }
}

impl AnalyticEval for ClosedMap {
    fn eval(&mut self, u: C64) -> Result<(C64, C64), NumericError> {
        let zero = C64::new(0.0, 0.0);
        let w = self
            .w
            .eval(zero, u, zero)
            .map_err(|_| NumericError::PoleEncounter)?;
        let dw = self
            .dw
            .eval(zero, u, zero)
            .map_err(|_| NumericError::PoleEncounter)?;
        Ok((w, dw))
    }
}

/// ODE-germ analytic map, evaluated by incremental Taylor continuation.
#[derive(Clone, Debug)]
pub struct OdeMap {
    cont: Continuation,
}

impl OdeMap {
    pub fn new(fun: AnalyticFunction) -> Self {
        OdeMap {
            cont: Continuation::new(fun),
        }
    }

    /// The general solution of a solvable linear target as a map of u,
    /// with complex combination constants (a, b).
    pub fn from_general_solution(
        sol: &GeneralSolution,
        a: C64,
        b: C64,
    ) -> Result<OdeMap, NumericError> {
        let g = poly_coeffs_in_chi(&sol.target.g)?;
        let h = poly_coeffs_in_chi(&sol.target.h)?;
        let zero = C64::new(0.0, 0.0);
        let (u0, du0) = match &sol.kind {
            SolutionKind::Airy { negated } => {
                let (ai0, aip0, bi0, bip0) = airy_seeds();
                // U = a*Ai(-chi) + b*Bi(-chi) (negated) or the plain-argument pair.
                let sgn = if *negated { -1.0 } else { 1.0 };
                (
                    a * C64::new(ai0, 0.0) + b * C64::new(bi0, 0.0),
                    sgn * (a * C64::new(aip0, 0.0) + b * C64::new(bip0, 0.0)),
                )
            }
            SolutionKind::Closed {
                particular,
                hom1,
                hom2,
            } => {
                let at0 = |c: &CScalar| c.eval(zero, zero, zero);
                let d_at0 = |c: &CScalar| c.diff(CVar::X).eval(zero, zero, zero);
                let p0 = at0(particular).map_err(|_| NumericError::PoleEncounter)?;
                let dp0 = d_at0(particular).map_err(|_| NumericError::PoleEncounter)?;
                let h10 = at0(hom1).map_err(|_| NumericError::PoleEncounter)?;
                let dh10 = d_at0(hom1).map_err(|_| NumericError::PoleEncounter)?;
                let h20 = at0(hom2).map_err(|_| NumericError::PoleEncounter)?;
                let dh20 = d_at0(hom2).map_err(|_| NumericError::PoleEncounter)?;
                (p0 + a * h10 + b * h20, dp0 + a * dh10 + b * dh20)
            }
            SolutionKind::NumericOnly => {
                // Basis with IC (1, 0) and (0, 1) at 0: U = a*U1 + b*U2.
                (a, b)
            }
        };
        Ok(OdeMap {
            cont: Continuation::new(AnalyticFunction {
                g,
                h,
                chi0: zero,
                u0,
                du0,
            }),
        })
    }
}

impl AnalyticEval for OdeMap {
    fn eval(&mut self, u: C64) -> Result<(C64, C64), NumericError> {
        self.cont.eval_at(u)
    }
}

/// Complex polynomial coefficients of a scalar in the chi (X) slot.
pub fn poly_coeffs_in_chi(c: &CScalar) -> Result<Vec<C64>, NumericError> {
    let rat = c.rat().map_err(|_| NumericError::NotPolynomial)?;
    if !rat.den.is_one() {
        return Err(NumericError::NotPolynomial);
    }
    let x = crate::expr::Atom::Var(CVar::X);
    if rat.num.has_transcendental() || rat.num.depends_on_var(CVar::U) || rat.num.depends_on_var(CVar::Up)
    {
        return Err(NumericError::NotPolynomial);
    }
    let coeffs = rat.num.coeffs_in(&x);
    Ok(coeffs
        .into_iter()
        .map(|p| {
            p.as_const()
                .map(crate::expr::Coeff::to_c64)
                .unwrap_or_else(|| C64::new(0.0, 0.0))
        })
        .collect())
}

/// Max-norm residual |f1'' - omega1| + |f2'' - omega2| of symbolic solution
/// expressions (functions of x only) over a grid.
pub fn residual_symbolic(
    s: &OdeSystem,
    f1x: &Expr,
    f2x: &Expr,
    grid: &[f64],
) -> Result<f64, NumericError> {
    for e in [f1x, f2x] {
        if e.vars_used().iter().any(|v| *v != Var::X) {
            return Err(NumericError::NotPolynomial);
        }
    }
    let d1 = f1x.diff(Var::X);
    let d2 = f2x.diff(Var::X);
    let dd1 = d1.diff(Var::X);
    let dd2 = d2.diff(Var::X);
    let bind = BTreeMap::from([
        (Var::F1, f1x.clone()),
        (Var::F2, f2x.clone()),
        (Var::F1p, d1.clone()),
        (Var::F2p, d2.clone()),
    ]);
    let r1 = dd1 - s.omega1.substitute(&bind).map_err(|_| NumericError::GridSingular)?;
    let r2 = dd2 - s.omega2.substitute(&bind).map_err(|_| NumericError::GridSingular)?;
    let mut worst: f64 = 0.0;
    for &x in grid {
        let p = crate::expr::Point::real(x, 0.0, 0.0, 0.0, 0.0);
        let v1 = r1.eval(&p).map_err(|_| NumericError::GridSingular)?;
        let v2 = r2.eval(&p).map_err(|_| NumericError::GridSingular)?;
        if !v1.re.is_finite() || !v2.re.is_finite() {
            return Err(NumericError::GridSingular);
        }
        worst = worst.max(v1.norm() + v2.norm());
    }
    Ok(worst)
}

/// Residual of numerically-given solution functions via Richardson-
/// extrapolated central differences.
pub fn residual_numeric(
    s: &OdeSystem,
    f: &dyn Fn(f64) -> (f64, f64),
    grid: &[f64],
) -> Result<f64, NumericError> {
    let mut worst: f64 = 0.0;
    let h = 1e-3;
    for &x in grid {
        let second = |g: &dyn Fn(f64) -> f64| -> f64 {
            let d = |hh: f64| (g(x + hh) - 2.0 * g(x) + g(x - hh)) / (hh * hh);
            (4.0 * d(h / 2.0) - d(h)) / 3.0
        };
        let first = |g: &dyn Fn(f64) -> f64| -> f64 {
            let d = |hh: f64| (g(x + hh) - g(x - hh)) / (2.0 * hh);
            (4.0 * d(h / 2.0) - d(h)) / 3.0
        };
        let g1 = |xx: f64| f(xx).0;
        let g2 = |xx: f64| f(xx).1;
        let (f1v, f2v) = f(x);
        let p = crate::expr::RealPoint {
            x,
            f1: f1v,
            f2: f2v,
            f1p: first(&g1),
            f2p: first(&g2),
        };
        let w1 = s
            .omega1
            .eval_real(&p)
            .map_err(|_| NumericError::GridSingular)?;
        let w2 = s
            .omega2
            .eval_real(&p)
            .map_err(|_| NumericError::GridSingular)?;
        let r = (second(&g1) - w1).abs() + (second(&g2) - w2).abs();
        if !r.is_finite() {
            return Err(NumericError::GridSingular);
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Uniform grid helper used throughout the verification tests.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * (i as f64) / ((n - 1).max(1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::expr::{q_ratio, ZeroTest};
    use crate::linearize;

    #[test]
    fn integrate_free_particle_exact() {
        let s = OdeSystem::new(Expr::int(0), Expr::int(0));
        let t = integrate(&s, [0.0, 0.0, 1.0, 0.0], (0.0, 1.0), 1e-10).unwrap();
        let (xe, ye) = t.end();
        assert!((xe - 1.0).abs() < 1e-14);
        assert!((ye[0] - 1.0).abs() < 1e-12);
        assert!(ye[1].abs() < 1e-12);
        // Dense output mid-interval.
        let mid = t.sample(0.5);
        assert!((mid[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn integrate_emden_against_closed_form() {
        // Closed form with zero constants: f1 = 2/x, f2 = 0 on [1, 2].
        let s = corpus::emden();
        let t = integrate(&s, [2.0, 0.0, -2.0, 0.0], (1.0, 2.0), 1e-9).unwrap();
        for &x in &linspace(1.0, 2.0, 21) {
            let y = t.sample(x);
            assert!((y[0] - 2.0 / x).abs() < 1e-6, "f1 drift at {x}: {}", y[0]);
            assert!(y[1].abs() < 1e-8);
        }
    }

    #[test]
    fn integrate_convergence_order() {
        // Halving tol must reduce the measured error against 2/x.
        let s = corpus::emden();
        let mut errs = Vec::new();
        for tol in [1e-5, 1e-7, 1e-9] {
            let t = integrate(&s, [2.0, 0.0, -2.0, 0.0], (1.0, 2.0), tol).unwrap();
            let (_, ye) = t.end();
            errs.push((ye[0] - 1.0f64).abs().max(1e-17));
        }
        assert!(errs[1] < errs[0]);
        assert!(errs[2] < errs[1]);
    }

    #[test]
    fn integrate_pole_encounter() {
        // 2/x blows up at 0; integrating towards it must fail cleanly.
        let s = corpus::emden();
        let r = integrate(&s, [2.0, 0.0, -2.0, 0.0], (1.0, -0.5), 1e-8);
        assert!(matches!(
            r,
            Err(NumericError::PoleEncounter) | Err(NumericError::StepUnderflow)
        ));
    }

    #[test]
    fn residual_zero_for_exact_solution() {
        let s = OdeSystem::new(Expr::int(0), Expr::int(0));
        let r = residual_symbolic(&s, &Expr::x(), &Expr::int(0), &linspace(0.0, 1.0, 10)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn residual_detects_injected_fault() {
        // Perturbing f1 = x by 1e-3 x^2 in the trivial system leaves exactly
        // the second derivative 2e-3 as residual.
        let s = OdeSystem::new(Expr::int(0), Expr::int(0));
        let f1 = Expr::x() + Expr::ratio(1, 1000) * Expr::x().pow(2);
        let r = residual_symbolic(&s, &f1, &Expr::int(0), &linspace(0.0, 1.0, 10)).unwrap();
        assert!((r - 2e-3).abs() < 1e-12);
        // The numeric-difference path sees the same fault.
        let rn = residual_numeric(
            &s,
            &|x| (x + 1e-3 * x * x, 0.0),
            &linspace(0.2, 0.8, 7),
        )
        .unwrap();
        assert!((rn - 2e-3).abs() < 1e-6);
    }

    #[test]
    fn residual_emden_closed_form_on_grid() {
        let (a1, a2, b1, b2) = (q_ratio(1, 2), q_ratio(1, 3), q_ratio(-1, 4), q_ratio(2, 5));
        let (f1x, f2x) = linearize::emden_solve(&a1, &a2, &b1, &b2, Some((1.0, 2.0))).unwrap();
        let r =
            residual_symbolic(&corpus::emden(), &f1x, &f2x, &linspace(1.0, 2.0, 100)).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn trace_identity_map() {
        // W(u) = u: the level curve of Im W is the real axis, x = f1.
        let mut map = ClosedMap::new(CScalar::u());
        let curve = trace_implicit(
            &mut map,
            C64::new(0.0, 0.0),
            &TraceOptions {
                x_span: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        let (a, b) = curve.x_span();
        assert!(a.abs() < 1e-12 && (b - 1.0).abs() < 0.02);
        for p in &curve.points {
            assert!(p.u.im.abs() < 1e-10);
            assert!((p.x - p.u.re).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_quadratic_map_matches_closed_form() {
        // W(u) = -u^2/2 + a u + b with real a, b; on the real branch the
        // curve solves x = -f1^2/2 + a f1 + b.
        let a = 2.0;
        let b = 0.5;
        let w = -(CScalar::u().pow(2)) / CScalar::int(2)
            + CScalar::int(2) * CScalar::u()
            + CScalar::ratio(1, 2);
        let mut map = ClosedMap::new(w);
        let curve = trace_implicit(
            &mut map,
            C64::new(0.0, 0.0),
            &TraceOptions {
                x_span: 1.2,
                ..Default::default()
            },
        )
        .unwrap();
        for p in &curve.points {
            let expect = -p.u.re * p.u.re / 2.0 + a * p.u.re + b;
            assert!((p.x - expect).abs() < 1e-9);
            assert!(p.u.im.abs() < 1e-10);
        }
    }

    #[test]
    fn trace_reports_critical_point() {
        // W(u) = u^2/2 has W'(0) = 0; seeding right at the critical point
        // must fail loudly rather than wander.
        let mut map = ClosedMap::new(CScalar::u().pow(2) / CScalar::int(2));
        let r = trace_implicit(&mut map, C64::new(0.0, 0.0), &TraceOptions::default());
        assert!(matches!(r, Err(NumericError::CriticalPoint)));
    }

    #[test]
    fn airy_map_traces_real_axis() {
        // W(u) = Ai(-u): the real axis is a branch of Im W = 0; x = Ai(-u)
        // decreases towards 0 as u decreases.
        let target = linearize::LinearTarget {
            g: -CScalar::x(),
            h: CScalar::int(0),
            tag: linearize::TargetTag::Airy,
        };
        let sol = linearize::solve_linear_target(&target);
        let mut map =
            OdeMap::from_general_solution(&sol, C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let (w0, _) = map.eval(C64::new(0.0, 0.0)).unwrap();
        let (ai0, _, _, _) = airy_seeds();
        assert!((w0.re - ai0).abs() < 1e-10);
        let curve = trace_implicit(
            &mut map,
            C64::new(0.0, 0.0),
            &TraceOptions {
                x_span: 0.15,
                direction: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        // Moving towards increasing x means decreasing -u here (Ai grows
        // towards its maximum at -1.018...); u should move positive.
        assert!(curve.points.last().unwrap().u.re > 0.0);
        for p in &curve.points {
            assert!(p.u.im.abs() < 1e-9);
        }
    }
}
