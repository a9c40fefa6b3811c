//! Predictor-corrector tracing of the implicit solution set Im W(u) = 0,
//! parametrized by x = Re W(u). The CR structure gives the gradient of
//! Im W for free: grad = (Im W', Re W'), and the unit tangent
//! t = conj(W')/|W'| moves x at the rate |W'| ds.

use super::{AnalyticEval, NumericError};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug)]
pub struct TracePoint {
    /// x = Re W(u) along the curve.
    pub x: f64,
    pub u: C64,
    /// W'(u); the traced ODE solution has u'(x) = 1 / W'(u).
    pub w_prime: C64,
}

#[derive(Clone, Debug)]
pub struct TracedCurve {
    pub points: Vec<TracePoint>,
}

impl TracedCurve {
    pub fn x_span(&self) -> (f64, f64) {
        (
            self.points.first().map(|p| p.x).unwrap_or(0.0),
            self.points.last().map(|p| p.x).unwrap_or(0.0),
        )
    }

    /// Linear interpolation of u at a given x (x must be inside the span).
    pub fn sample_u(&self, x: f64) -> Option<C64> {
        let pts = &self.points;
        if pts.len() < 2 || x < pts[0].x || x > pts[pts.len() - 1].x {
            return None;
        }
        let mut lo = 0;
        let mut hi = pts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if pts[mid].x <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (x - pts[lo].x) / (pts[hi].x - pts[lo].x);
        Some(pts[lo].u * (1.0 - t) + pts[hi].u * t)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Arc-length step in the u-plane.
    pub step: f64,
    /// Stop once Re W has advanced this far from the seed.
    pub x_span: f64,
    /// +1 traces towards increasing x, -1 decreasing.
    pub direction: f64,
    pub imag_tol: f64,
    pub min_derivative: f64,
    pub max_points: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            step: 0.01,
            x_span: 1.0,
            direction: 1.0,
            imag_tol: 1e-10,
            min_derivative: 1e-8,
            max_points: 100_000,
        }
    }
}

/// Newton-correct a point onto the level set Im W = 0.
pub fn correct_onto_curve(
    map: &mut dyn AnalyticEval,
    mut u: C64,
    imag_tol: f64,
    min_derivative: f64,
) -> Result<(C64, C64, C64), NumericError> {
    let (mut w, mut wp) = map.eval(u)?;
    for _ in 0..60 {
        if w.im.abs() <= imag_tol {
            return Ok((u, w, wp));
        }
        if wp.norm() < min_derivative {
            return Err(NumericError::CriticalPoint);
        }
        // Damped Newton step along the gradient of Im W.
        let mut lambda = 1.0;
        let base = w.im.abs();
        loop {
            let delta = -C64::i() * (lambda * w.im) * wp.conj() / wp.norm_sqr();
            let cand = u + delta;
            let (wc, wpc) = map.eval(cand)?;
            if wc.im.abs() < base {
                u = cand;
                w = wc;
                wp = wpc;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-8 {
                return Err(NumericError::LostCurve);
            }
        }
    }
    if w.im.abs() <= imag_tol {
        Ok((u, w, wp))
    } else {
        Err(NumericError::LostCurve)
    }
}

/// Trace the level set Im W(u) = 0 from a seed with Im W(seed) ~ 0,
/// keeping x = Re W monotone in the requested direction.
pub fn trace_implicit(
    map: &mut dyn AnalyticEval,
    seed: C64,
    opts: &TraceOptions,
) -> Result<TracedCurve, NumericError> {
    let (mut u, mut w, mut wp) =
        correct_onto_curve(map, seed, opts.imag_tol, opts.min_derivative)?;
    let x0 = w.re;
    let mut points = vec![TracePoint {
        x: w.re,
        u,
        w_prime: wp,
    }];
    let mut ds = opts.step;
    while points.len() < opts.max_points {
        if (w.re - x0).abs() >= opts.x_span {
            break;
        }
        if wp.norm() < opts.min_derivative {
            return Err(NumericError::CriticalPoint);
        }
        let tangent = wp.conj() / wp.norm();
        let pred = u + tangent * (opts.direction * ds);
        match correct_onto_curve(map, pred, opts.imag_tol, opts.min_derivative) {
            Ok((uc, wc, wpc)) => {
                // Enforce monotone x; a reversal means the step folded over.
                if (wc.re - w.re) * opts.direction <= 0.0 {
                    ds *= 0.5;
                    if ds < 1e-12 {
                        return Err(NumericError::CriticalPoint);
                    }
                    continue;
                }
                u = uc;
                w = wc;
                wp = wpc;
                points.push(TracePoint {
                    x: w.re,
                    u,
                    w_prime: wp,
                });
                if ds < opts.step {
                    ds *= 1.5;
                }
            }
            Err(NumericError::LostCurve) => {
                ds *= 0.5;
                if ds < 1e-12 {
                    return Err(NumericError::LostCurve);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(TracedCurve { points })
}
