//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with
//! cubic Hermite dense output.

use super::NumericError;
use crate::complexify::OdeSystem;
use crate::expr::{Expr, RealPoint};

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; 4]>,
    /// Right-hand-side values at the nodes (for Hermite interpolation).
    pub dys: Vec<[f64; 4]>,
    /// Per-step local error estimates at acceptance time.
    pub errs: Vec<f64>,
}

impl Trajectory {
    pub fn end(&self) -> (f64, [f64; 4]) {
        (*self.xs.last().unwrap(), *self.ys.last().unwrap())
    }

    /// Dense output by cubic Hermite interpolation on the bracketing step.
    pub fn sample(&self, x: f64) -> [f64; 4] {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[hi] - self.xs[lo];
        let t = (x - self.xs[lo]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let mut out = [0.0; 4];
        for k in 0..4 {
            out[k] = h00 * self.ys[lo][k]
                + h10 * h * self.dys[lo][k]
                + h01 * self.ys[hi][k]
                + h11 * h * self.dys[hi][k];
        }
        out
    }
}

struct Rhs<'a> {
    omega1: &'a Expr,
    omega2: &'a Expr,
}

impl Rhs<'_> {
    fn eval(&self, x: f64, y: &[f64; 4]) -> Result<[f64; 4], NumericError> {
        let p = RealPoint {
            x,
            f1: y[0],
            f2: y[1],
            f1p: y[2],
            f2p: y[3],
        };
        let w1 = self
            .omega1
            .eval_real(&p)
            .map_err(|_| NumericError::PoleEncounter)?;
        let w2 = self
            .omega2
            .eval_real(&p)
            .map_err(|_| NumericError::PoleEncounter)?;
        if !w1.is_finite() || !w2.is_finite() {
            return Err(NumericError::PoleEncounter);
        }
        Ok([y[2], y[3], w1, w2])
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate the system from `ic` over `interval` with mixed absolute and
/// relative tolerance `tol`.
pub fn integrate(
    s: &OdeSystem,
    ic: [f64; 4],
    interval: (f64, f64),
    tol: f64,
) -> Result<Trajectory, NumericError> {
    let rhs = Rhs {
        omega1: &s.omega1,
        omega2: &s.omega2,
    };
    let (x0, x1) = interval;
    let span = x1 - x0;
    if span == 0.0 {
        let d = rhs.eval(x0, &ic)?;
        return Ok(Trajectory {
            xs: vec![x0],
            ys: vec![ic],
            dys: vec![d],
            errs: vec![0.0],
        });
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = ic;
    let mut k1 = rhs.eval(x, &y)?;
    let mut h = (span.abs() / 64.0).min(0.1).max(1e-8) * dir;
    let mut traj = Trajectory {
        xs: vec![x],
        ys: vec![y],
        dys: vec![k1],
        errs: vec![0.0],
    };
    let h_min = span.abs() * 1e-14 + 1e-300;
    let mut steps = 0usize;
    while (x1 - x) * dir > 1e-14 * span.abs() {
        steps += 1;
        if steps > 1_000_000 {
            return Err(NumericError::StepUnderflow);
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        // Stages.
        let mut ks = [[0.0f64; 4]; 7];
        ks[0] = k1;
        let mut failed_eval = false;
        for i in 0..6 {
            let mut yi = y;
            for (j, kj) in ks.iter().enumerate().take(i + 1) {
                for m in 0..4 {
                    yi[m] += h * A[i][j] * kj[m];
                }
            }
            match rhs.eval(x + C[i] * h, &yi) {
                Ok(k) => ks[i + 1] = k,
                Err(_) => {
                    failed_eval = true;
                    break;
                }
            }
        }
        if failed_eval {
            h *= 0.5;
            if h.abs() < h_min {
                return Err(NumericError::PoleEncounter);
            }
            continue;
        }
        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in ks.iter().enumerate() {
            for m in 0..4 {
                y5[m] += h * B5[j] * kj[m];
                y4[m] += h * B4[j] * kj[m];
            }
        }
        let mut err: f64 = 0.0;
        for m in 0..4 {
            let sc = tol + tol * y[m].abs().max(y5[m].abs());
            err += ((y5[m] - y4[m]) / sc).powi(2);
        }
        err = (err / 4.0).sqrt();
        if err <= 1.0 {
            x += h;
            y = y5;
            // FSAL: the 7th stage equals the RHS at the new point.
            k1 = ks[6];
            traj.xs.push(x);
            traj.ys.push(y);
            traj.dys.push(k1);
            traj.errs.push(err);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < h_min {
            return Err(NumericError::StepUnderflow);
        }
    }
    Ok(traj)
}
