//! Adiabatic polariton transport.
//!
//! In the adiabatic limit the polariton obeys `(∂t + c cos²θ(t) ∂z) ψ = 0`,
//! so a pulse is translated rigidly by `c ∫ cos²θ dτ`. With a co-propagating
//! control (`Ω(t − z/c)`) the conserved quantity is `E/Ω`, advected along
//! characteristics `dz/dt = c cos²θ(z, t)`.

use std::cell::RefCell;

use rayon::prelude::*;

use crate::medium::{omega_at, ControlSchedule, Grid, MediumParams, Shape};
use crate::numerics::interp::ComplexInterpolator;
use crate::numerics::{ode, quad};
use crate::polariton::PolaritonProfile;
use crate::{Error, Result, C64};

/// Amplitudes at or above this fraction of the peak count as pulse support.
pub const SUPPORT_FRACTION: f64 = 1e-8;
/// Width, in grid points, of the boundary band that must stay empty.
pub const BOUNDARY_BAND: usize = 5;

/// Uniformly sampled complex time series, e.g. the probe at the entrance face.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<C64>,
}

impl TimeSeries {
    pub fn from_fn<F: Fn(f64) -> C64>(t0: f64, dt: f64, n: usize, f: F) -> Self {
        Self { t0, dt, values: (0..n).map(|k| f(t0 + dt * k as f64)).collect() }
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.values.len().saturating_sub(1)) as f64
    }

    /// Trapezoidal `∫|E|² dt`.
    pub fn energy(&self) -> f64 {
        crate::numerics::trapezoid_norm_sqr(&self.values, self.dt)
    }
}

/// `E/Ω` on the grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile {
    pub t: f64,
    pub ratio: Vec<C64>,
}

/// `cos²θ = Ω² / (Ω² + g²N)` without trigonometry.
fn cos2_theta(omega: f64, params: &MediumParams) -> f64 {
    let g2n = params.g2n();
    if g2n == 0.0 {
        return 1.0;
    }
    let w2 = omega * omega;
    w2 / (w2 + g2n)
}

/// Fails with a domain overflow if the profile reaches the outermost grid points.
pub fn check_compact_support(values: &[C64], context: &str) -> Result<()> {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let n = values.len();
    let band = BOUNDARY_BAND.min(n / 2);
    let edge = values[..band].iter().chain(&values[n - band..]).map(|v| v.norm()).fold(0.0, f64::max);
    if edge >= SUPPORT_FRACTION * peak {
        return Err(Error::DomainOverflow(format!(
            "{context}: amplitude {:.3e} of peak within {band} points of the grid boundary",
            edge / peak
        )));
    }
    Ok(())
}

fn check_sampled_range(schedule: &ControlSchedule, t0: f64, t1: f64) -> Result<()> {
    if let Shape::Sampled(p) = &schedule.shape {
        let (lo, hi) = p.range();
        for t in [t0, t1] {
            if !(t >= lo && t <= hi) {
                return Err(Error::OutOfDomain { value: t, lo, hi });
            }
        }
    }
    Ok(())
}

/// `c ∫_{t0}^{t1} cos²θ(τ) dτ`.
pub fn displacement(schedule: &ControlSchedule, params: &MediumParams, t0: f64, t1: f64) -> Result<f64> {
    if !(t1 >= t0) {
        return Err(Error::param("t1", format!("must not precede t0 (t0 = {t0}, t1 = {t1})")));
    }
    if schedule.retarded {
        return Err(Error::UnsupportedRegime(
            "displacement is defined for time-only control; use transport_retarded".into(),
        ));
    }
    if t1 == t0 {
        return Ok(0.0);
    }
    if let Shape::Constant { omega } = schedule.shape {
        return Ok(params.c * cos2_theta(omega, params) * (t1 - t0));
    }
    check_sampled_range(schedule, t0, t1)?;
    let tol = 1e-10 * params.c * (t1 - t0);
    let v = quad::integrate(
        |t| match schedule.omega_local(params, t) {
            Ok(w) => cos2_theta(w, params),
            Err(_) => f64::NAN,
        },
        t0,
        t1,
        tol,
    )?;
    Ok(params.c * v)
}

/// Rigid translation of `initial` to time `t`.
///
/// Values that would come from outside the grid are zero; the pulse must stay
/// clear of the boundary band before and after the shift.
pub fn transport(
    initial: &PolaritonProfile,
    grid: &Grid,
    schedule: &ControlSchedule,
    params: &MediumParams,
    t: f64,
) -> Result<PolaritonProfile> {
    if initial.psi.len() != grid.n_z {
        return Err(Error::GridMismatch { expected: grid.n_z, found: initial.psi.len() });
    }
    check_compact_support(&initial.psi, "initial polariton")?;
    let shift = displacement(schedule, params, initial.t, t)?;
    let out = shift_profile(&initial.psi, grid, shift)?;
    check_compact_support(&out, &format!("polariton at t = {t}"))?;
    Ok(PolaritonProfile { t, psi: out })
}

/// `f(z − shift)` on the same grid, zero where `z − shift` leaves it.
pub fn shift_profile(values: &[C64], grid: &Grid, shift: f64) -> Result<Vec<C64>> {
    if shift == 0.0 {
        return Ok(values.to_vec());
    }
    let it = ComplexInterpolator::new(grid.z_min, grid.dz(), values)?;
    Ok((0..grid.n_z).map(|i| it.eval_or_zero(grid.z(i) - shift)).collect())
}

/// `ψ = (E/Ω) · √(Ω² + g²N)`.
pub fn polariton_from_ratio(ratio: C64, omega: f64, params: &MediumParams) -> C64 {
    ratio * (omega * omega + params.g2n()).sqrt()
}

/// `E/Ω = ψ / √(Ω² + g²N)`; regular even when `Ω → 0`.
pub fn ratio_from_polariton(psi: C64, omega: f64, params: &MediumParams) -> Result<C64> {
    let den = (omega * omega + params.g2n()).sqrt();
    if den == 0.0 {
        return Err(Error::DegenerateControl { omega, floor: params.omega_floor() });
    }
    Ok(psi / den)
}

/// Advects `E/Ω` along the characteristics of a co-propagating control.
///
/// Each output sample `(z_j, t_n)` is traced back to `t_min` with an adaptive
/// Dormand–Prince solve; the ratio is constant along the path.
pub fn transport_retarded(
    initial_ratio: &[C64],
    schedule: &ControlSchedule,
    params: &MediumParams,
    grid: &Grid,
) -> Result<Vec<RatioProfile>> {
    let times: Vec<f64> = (0..=grid.n_t).map(|n| grid.t(n)).collect();
    transport_retarded_at(initial_ratio, schedule, params, grid, &times)
}

/// [`transport_retarded`] at explicit output times (each ≥ `grid.t_min`).
pub fn transport_retarded_at(
    initial_ratio: &[C64],
    schedule: &ControlSchedule,
    params: &MediumParams,
    grid: &Grid,
    times: &[f64],
) -> Result<Vec<RatioProfile>> {
    if initial_ratio.len() != grid.n_z {
        return Err(Error::GridMismatch { expected: grid.n_z, found: initial_ratio.len() });
    }
    check_compact_support(initial_ratio, "initial E/Ω")?;
    let floor = params.omega_floor();
    let peak = initial_ratio.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (i, r) in initial_ratio.iter().enumerate() {
        if r.norm() >= SUPPORT_FRACTION * peak && peak > 0.0 {
            let w = omega_at(schedule, params, grid.t_min, grid.z(i))?;
            if w < floor {
                return Err(Error::DegenerateControl { omega: w, floor });
            }
        }
    }
    let it = ComplexInterpolator::new(grid.z_min, grid.dz(), initial_ratio)?;
    let tol = ode::Tolerances { rtol: 1e-8, atol: 1e-10 * params.c * (grid.t_max - grid.t_min).max(1.0), ..Default::default() };

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < grid.t_min {
            return Err(Error::param("times", "output times must not precede the initial time"));
        }
        let ratio: Vec<C64> = (0..grid.n_z)
            .into_par_iter()
            .map(|j| -> Result<C64> {
                let z0 = trace_back(schedule, params, grid.z(j), t, grid.t_min, &tol)?;
                Ok(it.eval_or_zero(z0))
            })
            .collect::<Result<_>>()?;
        for (j, r) in ratio.iter().enumerate() {
            if peak > 0.0 && r.norm() >= SUPPORT_FRACTION * peak {
                let w = omega_at(schedule, params, t, grid.z(j))?;
                if w < floor {
                    return Err(Error::DegenerateControl { omega: w, floor });
                }
            }
        }
        check_compact_support(&ratio, &format!("E/Ω at t = {t}"))?;
        out.push(RatioProfile { t, ratio });
    }
    Ok(out)
}

/// Foot at `t_to` of the characteristic through `(z, t_from)`.
pub fn trace_back(
    schedule: &ControlSchedule,
    params: &MediumParams,
    z: f64,
    t_from: f64,
    t_to: f64,
    tol: &ode::Tolerances,
) -> Result<f64> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let rhs = |t: f64, z: &f64| match omega_at(schedule, params, t, *z) {
        Ok(w) => params.c * cos2_theta(w, params),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let res = ode::dopri5(rhs, t_from, z, t_to, 0.0, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(res?.0)
}

/// Maps a probe entering at `z = 0` under constant control onto the polariton
/// inside the medium at the end of the input record.
///
/// The pulse is compressed by `v_g⁰/c` and its amplitude raised by
/// `√(c/v_g⁰)`, so `∫|ψ|² dz = c ∫|E_in|² dt`.
pub fn inject_boundary(
    input: &TimeSeries,
    schedule: &ControlSchedule,
    params: &MediumParams,
    grid: &Grid,
) -> Result<PolaritonProfile> {
    if input.values.len() < 2 {
        return Err(Error::InsufficientData("input time series needs at least two samples".into()));
    }
    let v0 = entry_velocity(input, schedule, params)?;
    let t_end = input.t_end();
    let it = ComplexInterpolator::new(input.t0, input.dt, &input.values)?;
    let gain = (params.c / v0).sqrt();
    let psi: Vec<C64> = (0..grid.n_z)
        .map(|i| {
            let z = grid.z(i);
            if z < 0.0 {
                C64::default()
            } else {
                gain * it.eval_or_zero(t_end - z / v0)
            }
        })
        .collect();
    if v0 * (t_end - input.t0) > grid.z_max {
        // only an error if the part that does not fit carries amplitude
        check_compact_support(&psi, "injected polariton")?;
    }
    Ok(PolaritonProfile { t: t_end, psi })
}

/// Inverse of [`inject_boundary`]: the probe leaving through `z = exit` while
/// the profile moves out at constant group velocity.
pub fn eject_boundary(
    profile: &PolaritonProfile,
    grid: &Grid,
    schedule: &ControlSchedule,
    params: &MediumParams,
    exit: f64,
    dt: f64,
    n: usize,
) -> Result<TimeSeries> {
    let w = omega_at(schedule, params, profile.t, exit)?;
    let v0 = params.c * cos2_theta(w, params);
    if !(v0 > 0.0) {
        return Err(Error::DegenerateControl { omega: w, floor: params.omega_floor() });
    }
    let it = ComplexInterpolator::new(grid.z_min, grid.dz(), &profile.psi)?;
    let gain = (v0 / params.c).sqrt();
    Ok(TimeSeries::from_fn(profile.t, dt, n, |t| gain * it.eval_or_zero(exit - v0 * (t - profile.t))))
}

fn entry_velocity(input: &TimeSeries, schedule: &ControlSchedule, params: &MediumParams) -> Result<f64> {
    let omegas: Vec<f64> = (0..input.values.len())
        .map(|k| omega_at(schedule, params, input.t0 + input.dt * k as f64, 0.0))
        .collect::<Result<_>>()?;
    let hi = omegas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = omegas.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo > 1e-12 * hi.max(f64::MIN_POSITIVE) {
        return Err(Error::UnsupportedRegime(format!(
            "control varies from {lo} to {hi} while the pulse enters; injection needs constant Ω"
        )));
    }
    let floor = params.omega_floor();
    if params.g2n() > 0.0 && hi < floor {
        return Err(Error::DegenerateControl { omega: hi, floor });
    }
    Ok(params.c * cos2_theta(hi, params))
}
