//! Size of the neglected terms: first non-adiabatic correction, loss-free
//! propagation distance, adiabaticity figure, storage-time scale and the
//! intensity-ratio consistency check.
//!
//! The qualitative bands (poor below 10, good above 100) and the usable
//! storage fraction of 0.1 are reporting conventions.

use std::fmt;

use crate::medium::{omega_at, ControlSchedule, Grid, MediumParams};
use crate::polariton::FieldState;
use crate::{Error, Result, C64};

/// A scale that may be infinite when the relevant decay rate vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::Finite(v) => v,
            Bound::Unbounded => f64::INFINITY,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v:.6e}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Grade {
    Poor,
    Marginal,
    Good,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grade::Poor => "poor",
            Grade::Marginal => "marginal",
            Grade::Good => "good",
        })
    }
}

pub const POOR_BELOW: f64 = 10.0;
pub const GOOD_ABOVE: f64 = 100.0;
pub const USABLE_STORAGE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityFigure {
    /// `g²N L_p / (c γ_ab)`, infinite without optical decay.
    pub value: f64,
    pub grade: Grade,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageBound {
    /// `1 / (γ_bc n_e)`
    pub hard: Bound,
    pub usable: Bound,
}

fn check_length(l_p: f64) -> Result<()> {
    if l_p > 0.0 && l_p.is_finite() {
        Ok(())
    } else {
        Err(Error::param("pulse_length", "must be positive and finite"))
    }
}

/// `z_max = (g²N / γ_ab) · L_p² / c`
pub fn z_max(params: &MediumParams, l_p: f64) -> Result<Bound> {
    params.validate()?;
    check_length(l_p)?;
    if params.gamma_ab == 0.0 {
        return Ok(Bound::Unbounded);
    }
    Ok(Bound::Finite(params.g2n() / params.gamma_ab * l_p * l_p / params.c))
}

pub fn adiabaticity_figure(params: &MediumParams, l_p: f64) -> Result<AdiabaticityFigure> {
    params.validate()?;
    check_length(l_p)?;
    let value = if params.gamma_ab == 0.0 {
        f64::INFINITY
    } else {
        params.g2n() * l_p / (params.c * params.gamma_ab)
    };
    let grade = if value < POOR_BELOW {
        Grade::Poor
    } else if value <= GOOD_ABOVE {
        Grade::Marginal
    } else {
        Grade::Good
    };
    Ok(AdiabaticityFigure { value, grade })
}

pub fn storage_bound(params: &MediumParams, n_e: u64) -> Result<StorageBound> {
    params.validate()?;
    if n_e == 0 {
        return Err(Error::param("n_e", "need at least one excitation"));
    }
    if params.gamma_bc == 0.0 {
        return Ok(StorageBound { hard: Bound::Unbounded, usable: Bound::Unbounded });
    }
    let hard = 1.0 / (params.gamma_bc * n_e as f64);
    Ok(StorageBound { hard: Bound::Finite(hard), usable: Bound::Finite(USABLE_STORAGE_FRACTION * hard) })
}

/// `⌈∫|s|² dz⌉`, at least one. Excess below `1e-9` relative is treated as roundoff.
pub fn excitation_count(state: &FieldState, dz: f64) -> u64 {
    let n: f64 = state.s.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz;
    ((n - 1e-9 * n.max(1.0)).ceil().max(1.0)) as u64
}

/// First non-adiabatic correction to `s`,
/// `(1/Ω)(∂t + γ_ab)(1/Ω)∂t(g√N E/Ω)`, at the time of `snapshots[1]`.
///
/// `snapshots` must hold three states spaced by `dt`; derivatives are centred
/// second-order differences.
pub fn first_correction(
    snapshots: &[FieldState],
    schedule: &ControlSchedule,
    params: &MediumParams,
    grid: &Grid,
    dt: f64,
) -> Result<Vec<C64>> {
    if snapshots.len() < 3 {
        return Err(Error::InsufficientData(format!("need 3 snapshots, got {}", snapshots.len())));
    }
    let [a, b, c] = [&snapshots[0], &snapshots[1], &snapshots[2]];
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    for (lo, hi) in [(a, b), (b, c)] {
        if ((hi.t - lo.t) - dt).abs() > 1e-9 * dt.max(hi.t.abs()) {
            return Err(Error::param("dt", format!("snapshots at {} and {} are not {dt} apart", lo.t, hi.t)));
        }
    }
    for s in [a, b, c] {
        s.check_shape()?;
        if s.len() != grid.n_z {
            return Err(Error::GridMismatch { expected: grid.n_z, found: s.len() });
        }
    }

    let density = |i: usize| [a, b, c].iter().map(|s| s.e[i].norm_sqr() + s.s[i].norm_sqr()).fold(0.0, f64::max);
    let peak = (0..grid.n_z).map(density).fold(0.0, f64::max);
    let floor = params.omega_floor();
    let g = params.g_root_n;
    let t0 = b.t;
    let mut out = Vec::with_capacity(grid.n_z);
    for i in 0..grid.n_z {
        let z = grid.z(i);
        let w = |t: f64| omega_at(schedule, params, t, z);
        let (wm, w0, wp) = (w(t0 - dt)?, w(t0)?, w(t0 + dt)?);
        let (wmh, wph) = (w(t0 - 0.5 * dt)?, w(t0 + 0.5 * dt)?);
        let on_support = density(i) > 1e-16 * peak;
        if [wm, w0, wp, wmh, wph].iter().any(|x| *x < floor) {
            if on_support {
                return Err(Error::DegenerateControl { omega: wm.min(w0).min(wp).min(wmh).min(wph), floor });
            }
            out.push(C64::default());
            continue;
        }
        let (um, u0, up) = (g * a.e[i] / wm, g * b.e[i] / w0, g * c.e[i] / wp);
        let v_plus = (up - u0) / (dt * wph);
        let v_minus = (u0 - um) / (dt * wmh);
        out.push(((v_plus - v_minus) / dt + params.gamma_ab * 0.5 * (v_plus + v_minus)) / w0);
    }
    Ok(out)
}

/// `max_z |g²N|E|²/Ω² − |s|²| / max_z |s|²`
pub fn intensity_ratio_residual(state: &FieldState, omega: f64, params: &MediumParams) -> Result<f64> {
    state.check_shape()?;
    let floor = params.omega_floor();
    if !(omega >= floor) || omega == 0.0 {
        return Err(Error::DegenerateControl { omega, floor });
    }
    let norm = state.s.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    if !(norm > 0.0) {
        return Err(Error::UndefinedResidual("matter amplitude vanishes".into()));
    }
    let k = params.g2n() / (omega * omega);
    let worst = state
        .e
        .iter()
        .zip(&state.s)
        .map(|(e, s)| (k * e.norm_sqr() - s.norm_sqr()).abs())
        .fold(0.0, f64::max);
    Ok(worst / norm)
}
