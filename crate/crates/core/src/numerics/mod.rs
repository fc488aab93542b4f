//! Interpolation, quadrature and ODE integration shared by the solvers.

pub mod interp;
pub mod ode;
pub mod quad;

use crate::C64;

/// Trapezoidal ∫|f|² dz on a uniform grid.
pub fn trapezoid_norm_sqr(values: &[C64], dz: f64) -> f64 {
    trapezoid(values.iter().map(|v| v.norm_sqr()), dz)
}

/// Trapezoidal rule over uniformly spaced samples.
pub fn trapezoid<I>(samples: I, dz: f64) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in samples {
        if first.is_none() {
            first = Some(v);
        }
        sum += v;
        last = v;
    }
    match first {
        None => 0.0,
        Some(f) => dz * (sum - 0.5 * (f + last)),
    }
}
