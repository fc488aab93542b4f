//! Shape-preserving interpolation.
//!
//! [`UniformInterpolator`] serves profile shifts on regular grids. Each interval
//! uses a quintic Hermite piece built from sixth-order finite-difference
//! derivatives. Where the data is monotone across the interval and the quintic
//! would not be, the piece falls back to a cubic Hermite with Hyman-limited
//! slopes, so monotone data never produces new extrema. Next to a data
//! extremum the quintic value is clipped to the node range widened by half a
//! grid step times the steepest adjacent secant.
//!
//! [`Pchip`] is the Fritsch–Carlson monotone cubic on non-uniform abscissae,
//! used for sampled control schedules.

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Quintic,
    Clipped { lo: f64, hi: f64 },
    Cubic,
}

#[derive(Debug, Clone)]
pub struct UniformInterpolator {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    slope: Vec<f64>,
    pieces: Vec<Piece>,
}

impl UniformInterpolator {
    pub fn new(x0: f64, h: f64, y: &[f64]) -> Result<Self> {
        let n = y.len();
        if n < 2 {
            return Err(Error::InsufficientData("interpolation needs at least two nodes".into()));
        }
        if !(h > 0.0) {
            return Err(Error::param("h", "grid spacing must be positive"));
        }
        let secant: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let slope = hyman_slopes(y, &secant, h);

        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for i in 3..n.saturating_sub(3) {
            let f = |k: isize| y[(i as isize + k) as usize];
            d1[i] = (-f(-3) + 9.0 * f(-2) - 45.0 * f(-1) + 45.0 * f(1) - 9.0 * f(2) + f(3)) / (60.0 * h);
            d2[i] = (2.0 * f(-3) - 27.0 * f(-2) + 270.0 * f(-1) - 490.0 * f(0) + 270.0 * f(1)
                - 27.0 * f(2)
                + 2.0 * f(3))
                / (180.0 * h * h);
        }

        let mut pieces = vec![Piece::Cubic; n - 1];
        for i in 3..n.saturating_sub(4) {
            let (a, b, c) = (secant[i - 1], secant[i], secant[i + 1]);
            let monotone = a * b >= 0.0 && b * c >= 0.0;
            pieces[i] = if monotone {
                if quintic_is_monotone(y[i], y[i + 1], h * d1[i], h * d1[i + 1], h * h * d2[i], h * h * d2[i + 1], b) {
                    Piece::Quintic
                } else {
                    Piece::Cubic
                }
            } else {
                let lo = y[i - 1..=i + 2].iter().copied().fold(f64::INFINITY, f64::min);
                let hi = y[i - 1..=i + 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let slack = 0.5 * h * a.abs().max(b.abs()).max(c.abs());
                Piece::Clipped { lo: lo - slack, hi: hi + slack }
            };
        }

        Ok(Self { x0, h, y: y.to_vec(), d1, d2, slope, pieces })
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    /// Value at `x`, or `None` outside the node range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.y.len();
        let u = (x - self.x0) / self.h;
        let last = (n - 1) as f64;
        if !(u >= -1e-12 && u <= last + 1e-12) {
            return None;
        }
        let u = u.clamp(0.0, last);
        let i = (u.floor() as usize).min(n - 2);
        let s = u - i as f64;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let h = self.h;
        let v = match self.pieces[i] {
            Piece::Cubic => cubic_hermite(s, y0, y1, h * self.slope[i], h * self.slope[i + 1]),
            Piece::Quintic => quintic_hermite(
                s,
                y0,
                y1,
                h * self.d1[i],
                h * self.d1[i + 1],
                h * h * self.d2[i],
                h * h * self.d2[i + 1],
            ),
            Piece::Clipped { lo, hi } => quintic_hermite(
                s,
                y0,
                y1,
                h * self.d1[i],
                h * self.d1[i + 1],
                h * h * self.d2[i],
                h * h * self.d2[i + 1],
            )
            .clamp(lo, hi),
        };
        Some(v)
    }
}

/// Real and imaginary parts interpolated independently.
#[derive(Debug, Clone)]
pub struct ComplexInterpolator {
    re: UniformInterpolator,
    im: UniformInterpolator,
}

impl ComplexInterpolator {
    pub fn new(x0: f64, h: f64, values: &[C64]) -> Result<Self> {
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        Ok(Self { re: UniformInterpolator::new(x0, h, &re)?, im: UniformInterpolator::new(x0, h, &im)? })
    }

    pub fn eval(&self, x: f64) -> Option<C64> {
        Some(C64::new(self.re.eval(x)?, self.im.eval(x)?))
    }

    /// Value at `x`, zero outside the node range.
    pub fn eval_or_zero(&self, x: f64) -> C64 {
        self.eval(x).unwrap_or_default()
    }
}

fn hyman_slopes(y: &[f64], secant: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    d[0] = secant[0];
    d[n - 1] = secant[n - 2];
    for i in 1..n - 1 {
        d[i] = if i >= 2 && i + 2 < n {
            (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h)
        } else {
            (y[i + 1] - y[i - 1]) / (2.0 * h)
        };
        let (a, b) = (secant[i - 1], secant[i]);
        if a * b <= 0.0 || d[i] * a <= 0.0 {
            d[i] = 0.0;
        } else {
            let bound = 3.0 * a.abs().min(b.abs());
            if d[i].abs() > bound {
                d[i] = bound.copysign(a);
            }
        }
    }
    for (k, j) in [(0, 0), (n - 1, n - 2)] {
        if d[k] * secant[j] < 0.0 {
            d[k] = 0.0;
        } else if d[k].abs() > 3.0 * secant[j].abs() {
            d[k] = 3.0 * secant[j];
        }
    }
    d
}

fn cubic_hermite(s: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
}

// Derivative arguments are pre-scaled by h (first) and h² (second).
fn quintic_hermite(s: f64, y0: f64, y1: f64, m0: f64, m1: f64, k0: f64, k1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5) * y0
        + (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * m0
        + (0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * k0
        + (10.0 * s3 - 15.0 * s4 + 6.0 * s5) * y1
        + (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * m1
        + (0.5 * s3 - s4 + 0.5 * s5) * k1
}

fn quintic_slope(s: f64, y0: f64, y1: f64, m0: f64, m1: f64, k0: f64, k1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    (-30.0 * s2 + 60.0 * s3 - 30.0 * s4) * y0
        + (1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4) * m0
        + (s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4) * k0
        + (30.0 * s2 - 60.0 * s3 + 30.0 * s4) * y1
        + (-12.0 * s2 + 28.0 * s3 - 15.0 * s4) * m1
        + (1.5 * s2 - 4.0 * s3 + 2.5 * s4) * k1
}

fn quintic_is_monotone(y0: f64, y1: f64, m0: f64, m1: f64, k0: f64, k1: f64, secant: f64) -> bool {
    if secant == 0.0 {
        return y0 == y1 && m0 == 0.0 && m1 == 0.0 && k0 == 0.0 && k1 == 0.0;
    }
    (0..=32).all(|k| quintic_slope(k as f64 / 32.0, y0, y1, m0, m1, k0, k1) * secant >= 0.0)
}

/// Fritsch–Carlson monotone piecewise-cubic interpolation on strictly
/// increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::GridMismatch { expected: x.len(), found: y.len() });
        }
        if x.len() < 2 {
            return Err(Error::InsufficientData("sampled schedule needs at least two samples".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("t", "sample times must be strictly increasing"));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
        } else {
            for k in 1..n - 1 {
                if del[k - 1] * del[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
                }
            }
            d[0] = pchip_end(h[0], h[1], del[0], del[1]);
            d[n - 1] = pchip_end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfDomain { value: t, lo, hi });
        }
        let k = match self.x.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(k) => return Ok(self.y[k]),
            Err(k) => k - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        Ok(cubic_hermite(s, self.y[k], self.y[k + 1], h * self.d[k], h * self.d[k + 1]))
    }
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}
