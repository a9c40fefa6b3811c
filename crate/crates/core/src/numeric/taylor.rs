//! Taylor-method analytic continuation for U'' = g(chi) U + h(chi) with
//! polynomial coefficients, plus the Lanczos gamma values seeding the Airy
//! initial data. One mechanism covers every linear target uniformly and is
//! testable by path independence.

use super::NumericError;
use num_complex::Complex64 as C64;

/// Lanczos approximation (g = 7, 9 terms), |relative error| below 1e-12 on
/// the positive real axis.
pub fn gamma_lanczos(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_lanczos(1.0 - x));
    }
    let z = x - 1.0;
    let mut a = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// Airy initial data at 0 from the gamma seeds:
/// Ai(0) = 3^(-2/3)/G(2/3), Ai'(0) = -3^(-1/3)/G(1/3),
/// Bi(0) = 3^(-1/6)/G(2/3), Bi'(0) = 3^(1/6)/G(1/3).
pub fn airy_seeds() -> (f64, f64, f64, f64) {
    let g13 = gamma_lanczos(1.0 / 3.0);
    let g23 = gamma_lanczos(2.0 / 3.0);
    let ai0 = 3f64.powf(-2.0 / 3.0) / g23;
    let aip0 = -(3f64.powf(-1.0 / 3.0)) / g13;
    let bi0 = 3f64.powf(-1.0 / 6.0) / g23;
    let bip0 = 3f64.powf(1.0 / 6.0) / g13;
    (ai0, aip0, bi0, bip0)
}

/// Solution germ of U'' = g(chi) U + h(chi) with polynomial g, h, anchored
/// at `chi0` with values (u0, du0).
#[derive(Clone, Debug)]
pub struct AnalyticFunction {
    pub g: Vec<C64>,
    pub h: Vec<C64>,
    pub chi0: C64,
    pub u0: C64,
    pub du0: C64,
}

const ORDER: usize = 28;

/// Coefficients of p(center + t) by the Ruffini-Horner Taylor shift.
fn shift_poly(p: &[C64], center: C64) -> Vec<C64> {
    let mut b = p.to_vec();
    let n = b.len();
    for k in 0..n {
        for i in (k..n.saturating_sub(1)).rev() {
            let add = center * b[i + 1];
            b[i] += add;
        }
    }
    b
}

impl AnalyticFunction {
    /// Taylor coefficients of the solution at the current anchor.
    fn coefficients(&self, chi: C64, u: C64, du: C64) -> Vec<C64> {
        let gs = shift_poly(&self.g, chi);
        let hs = shift_poly(&self.h, chi);
        let mut a = vec![C64::new(0.0, 0.0); ORDER + 1];
        a[0] = u;
        a[1] = du;
        for k in 0..(ORDER - 1) {
            // a_{k+2} = (sum_m g_m a_{k-m} + h_k) / ((k+1)(k+2))
            let mut s = C64::new(0.0, 0.0);
            for (m, gm) in gs.iter().enumerate() {
                if m > k {
                    break;
                }
                s += gm * a[k - m];
            }
            if k < hs.len() {
                s += hs[k];
            }
            a[k + 2] = s / (((k + 1) * (k + 2)) as f64);
        }
        a
    }

    /// One Taylor step from (chi, u, du) towards `target`, no farther than
    /// convergence allows. Returns the new (chi, u, du).
    fn step(
        &self,
        chi: C64,
        u: C64,
        du: C64,
        target: C64,
    ) -> Result<(C64, C64, C64), NumericError> {
        let a = self.coefficients(chi, u, du);
        let full = target - chi;
        let dist = full.norm();
        if dist == 0.0 {
            return Ok((chi, u, du));
        }
        let dir = full / dist;
        // Convergence-limited step: keep the high-order tail negligible.
        let scale: f64 = a.iter().take(4).map(|c| c.norm()).sum::<f64>().max(1e-30);
        let mut hstep = dist;
        let mut tries = 0;
        loop {
            tries += 1;
            if tries > 200 {
                return Err(NumericError::StepUnderflow);
            }
            let tail = a[ORDER].norm() * hstep.powi(ORDER as i32)
                + a[ORDER - 1].norm() * hstep.powi(ORDER as i32 - 1)
                + a[ORDER - 2].norm() * hstep.powi(ORDER as i32 - 2);
            if tail <= 1e-14 * scale {
                break;
            }
            hstep *= 0.6;
            if hstep < 1e-13 {
                return Err(NumericError::StepUnderflow);
            }
        }
        let t = dir * hstep;
        let mut val = C64::new(0.0, 0.0);
        for k in (0..=ORDER).rev() {
            val = val * t + a[k];
        }
        let mut der = C64::new(0.0, 0.0);
        for k in (1..=ORDER).rev() {
            der = der * t + a[k] * (k as f64);
        }
        Ok((chi + t, val, der))
    }

    /// Continue along a polyline starting at the germ's anchor; returns the
    /// value and derivative at the final waypoint.
    pub fn continue_along(&self, path: &[C64]) -> Result<(C64, C64), NumericError> {
        let mut state = (self.chi0, self.u0, self.du0);
        for wp in path {
            while (state.0 - wp).norm() > 1e-14 * (1.0 + wp.norm()) {
                state = self.step(state.0, state.1, state.2, *wp)?;
            }
        }
        Ok((state.1, state.2))
    }

    /// Value and derivative at a point, continuing along the straight line
    /// from the anchor.
    pub fn value_at(&self, chi: C64) -> Result<(C64, C64), NumericError> {
        self.continue_along(&[chi])
    }
}

/// Stateful continuation handle: efficient repeated evaluation at nearby
/// points, as the implicit-curve tracer needs.
#[derive(Clone, Debug)]
pub struct Continuation {
    fun: AnalyticFunction,
    chi: C64,
    u: C64,
    du: C64,
}

impl Continuation {
    pub fn new(fun: AnalyticFunction) -> Self {
        let (chi, u, du) = (fun.chi0, fun.u0, fun.du0);
        Continuation { fun, chi, u, du }
    }

    pub fn eval_at(&mut self, chi: C64) -> Result<(C64, C64), NumericError> {
        while (self.chi - chi).norm() > 1e-14 * (1.0 + chi.norm()) {
            let (c, u, du) = self.fun.step(self.chi, self.u, self.du, chi)?;
            self.chi = c;
            self.u = u;
            self.du = du;
        }
        Ok((self.u, self.du))
    }
}
