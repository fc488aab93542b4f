//! Dormand–Prince 5(4) with PI step-size control.

use crate::{Error, Result, C64};

/// State vector operations needed by the integrator.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn scale(&mut self, a: f64);
    /// RMS of `err_k / (atol + rtol * max(|y0_k|, |y1_k|))`.
    fn scaled_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }

    fn scale(&mut self, a: f64) {
        *self *= a;
    }

    fn scaled_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        err.abs() / (atol + rtol * y0.abs().max(y1.abs()))
    }
}

impl OdeState for Vec<C64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn scale(&mut self, a: f64) {
        for s in self.iter_mut() {
            *s *= a;
        }
    }

    fn scaled_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let n = err.len().max(1) as f64;
        let sum: f64 = err
            .iter()
            .zip(y0.iter().zip(y1))
            .map(|(e, (a, b))| {
                let sc = atol + rtol * a.norm().max(b.norm());
                (e.norm() / sc).powi(2)
            })
            .sum();
        (sum / n).sqrt()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-12, max_step: f64::INFINITY, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    /// Last accepted step size, useful to warm-start the next segment.
    pub last_step: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th-order and embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<Y: OdeState>(y: &Y, h: f64, terms: &[(f64, &Y)]) -> Y {
    let mut out = y.clone();
    for (c, k) in terms {
        out.axpy(h * c, k);
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `h0` is the initial step magnitude; pass 0 for an automatic guess.
pub fn dopri5<Y, F>(mut f: F, t0: f64, y0: Y, t1: f64, h0: f64, tol: &Tolerances) -> Result<(Y, Stats)>
where
    Y: OdeState,
    F: FnMut(f64, &Y) -> Y,
{
    let mut stats = Stats::default();
    if t1 == t0 {
        return Ok((y0, stats));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut h = if h0 > 0.0 { h0.min(span) } else { (span * 1e-3).min(tol.max_step) };
    h = h.min(tol.max_step);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut err_prev: f64 = 1e-4;

    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::Numerical(format!("step budget exhausted at t = {t}")));
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        let k2 = f(t + C2 * hs, &combo(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + hs, &combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = combo(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + hs, &y_new);
        let mut est = k1.clone();
        est.scale(E1);
        est.axpy(E3, &k3);
        est.axpy(E4, &k4);
        est.axpy(E5, &k5);
        est.axpy(E6, &k6);
        est.axpy(E7, &k7);
        est.scale(hs);
        let en = Y::scaled_error(&est, &y, &y_new, tol.atol, tol.rtol);
        if !en.is_finite() {
            return Err(Error::Numerical(format!("non-finite error estimate at t = {t}")));
        }
        if en <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            stats.last_step = hs.abs();
            let fac = 0.9 * en.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = (hs.abs() * fac.clamp(0.2, 5.0)).min(tol.max_step);
            err_prev = en.max(1e-4);
        } else {
            stats.rejected += 1;
            let fac = 0.9 * en.powf(-1.0 / 5.0);
            h = hs.abs() * fac.clamp(0.1, 0.9);
            if h < 1e-14 * span.max(t.abs()) {
                return Err(Error::Numerical(format!("step size underflow at t = {t}")));
            }
        }
    }
    Ok((y, stats))
}
