//! Physical parameters, control-field schedules and space–time grids.

use crate::numerics::interp::Pchip;
use crate::{Error, Result};

/// Control fields weaker than this fraction of `g√N` are treated as off
/// whenever a ratio `E/Ω` would otherwise have to be formed.
pub const OMEGA_FLOOR_FRACTION: f64 = 1e-9;

/// Parameters of a homogeneous Λ-medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Collective coupling `g√N` (1/time).
    pub g_root_n: f64,
    /// Optical coherence decay rate (1/time).
    pub gamma_ab: f64,
    /// Raman coherence decay rate (1/time).
    pub gamma_bc: f64,
    /// Vacuum speed of light.
    pub c: f64,
    /// Medium length.
    pub length: f64,
}

impl MediumParams {
    pub fn new(g_root_n: f64, gamma_ab: f64, gamma_bc: f64, c: f64, length: f64) -> Result<Self> {
        let p = Self { g_root_n, gamma_ab, gamma_bc, c, length };
        p.validate()?;
        Ok(p)
    }

    /// Lossless medium with `c = 1`.
    pub fn lossless(g_root_n: f64, length: f64) -> Result<Self> {
        Self::new(g_root_n, 0.0, 0.0, 1.0, length)
    }

    pub fn validate(&self) -> Result<()> {
        // g√N = 0 is accepted and describes propagation in vacuum.
        if !(self.g_root_n >= 0.0 && self.g_root_n.is_finite()) {
            return Err(Error::param("g_root_n", "must be finite and non-negative"));
        }
        if !(self.gamma_ab >= 0.0 && self.gamma_ab.is_finite()) {
            return Err(Error::param("gamma_ab", "must be finite and non-negative"));
        }
        if !(self.gamma_bc >= 0.0 && self.gamma_bc.is_finite()) {
            return Err(Error::param("gamma_bc", "must be finite and non-negative"));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::param("c", "must be positive"));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::param("length", "must be positive"));
        }
        Ok(())
    }

    /// `g²N`
    pub fn g2n(&self) -> f64 {
        self.g_root_n * self.g_root_n
    }

    pub fn omega_floor(&self) -> f64 {
        OMEGA_FLOOR_FRACTION * self.g_root_n
    }
}

/// Time dependence of the control Rabi frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Constant { omega: f64 },
    /// `cot θ(t) = A (1 − ½ tanh[s(t − t_off)] + ½ tanh[s(t − t_on)])`, and
    /// `Ω = g√N · cot θ`.
    TanhPair { amplitude: f64, steepness: f64, t_off: f64, t_on: f64 },
    /// Monotone cubic through `(t_i, Ω_i)`; queries outside the samples fail.
    Sampled(Pchip),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    pub shape: Shape,
    /// Evaluate at the retarded time `t − z/c` (co-propagating control).
    pub retarded: bool,
}

impl ControlSchedule {
    pub fn constant(omega: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::param("omega", "must be finite and non-negative"));
        }
        Ok(Self { shape: Shape::Constant { omega }, retarded: false })
    }

    pub fn tanh_pair(amplitude: f64, steepness: f64, t_off: f64, t_on: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::param("amplitude", "must be finite and non-negative"));
        }
        if !steepness.is_finite() || !t_off.is_finite() || !t_on.is_finite() {
            return Err(Error::param("steepness", "tanh_pair parameters must be finite"));
        }
        Ok(Self { shape: Shape::TanhPair { amplitude, steepness, t_off, t_on }, retarded: false })
    }

    /// Stop-and-retrieve cycle: `θ` starts at `theta_edge`, is rotated towards
    /// `π/2` around `t = lead`, held for `hold` and rotated back around
    /// `t = lead + hold`. At `t = 0` and `t = 2·lead + hold` the angle equals
    /// `theta_edge` exactly.
    pub fn stop_and_retrieve(theta_edge: f64, steepness: f64, lead: f64, hold: f64) -> Result<Self> {
        if !(theta_edge > 0.0 && theta_edge < std::f64::consts::FRAC_PI_2) {
            return Err(Error::param("theta_edge", "must lie in (0, π/2)"));
        }
        if !(steepness > 0.0 && lead > 0.0 && hold >= 0.0) {
            return Err(Error::param("steepness", "steepness and lead must be positive, hold non-negative"));
        }
        let t_on = lead + hold;
        let edge = tanh_pair_cot(1.0, steepness, lead, t_on, 0.0);
        Self::tanh_pair(1.0 / (theta_edge.tan() * edge), steepness, lead, t_on)
    }

    pub fn sampled(t: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if omega.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::param("omega", "sampled Rabi frequencies must be finite and non-negative"));
        }
        Ok(Self { shape: Shape::Sampled(Pchip::new(t, omega)?), retarded: false })
    }

    /// Tabulates `f` on `n` uniform samples of `[t0, t1]`.
    pub fn sampled_from_fn<F: Fn(f64) -> f64>(f: F, t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n < 2 || !(t1 > t0) {
            return Err(Error::param("samples", "need n ≥ 2 and t1 > t0"));
        }
        let t: Vec<f64> = (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect();
        let w = t.iter().map(|&t| f(t)).collect();
        Self::sampled(t, w)
    }

    pub fn with_retardation(mut self, retarded: bool) -> Self {
        self.retarded = retarded;
        self
    }

    /// `Ω` at local time `τ` (already retarded if applicable).
    pub fn omega_local(&self, params: &MediumParams, tau: f64) -> Result<f64> {
        let w = match &self.shape {
            Shape::Constant { omega } => *omega,
            Shape::TanhPair { amplitude, steepness, t_off, t_on } => {
                params.g_root_n * tanh_pair_cot(*amplitude, *steepness, *t_off, *t_on, tau)
            }
            Shape::Sampled(p) => p.eval(tau)?,
        };
        Ok(w.max(0.0))
    }

    /// Whether `Ω` can change in time.
    pub fn is_static(&self) -> bool {
        matches!(self.shape, Shape::Constant { .. })
    }
}

// 1 − ½tanh(x) + ½tanh(y) = 1/(1 + e^{2x}) + 1/(1 + e^{−2y}), which keeps full
// relative precision deep inside the plateau.
fn tanh_pair_cot(a: f64, s: f64, t_off: f64, t_on: f64, t: f64) -> f64 {
    let x = s * (t - t_off);
    let y = s * (t - t_on);
    a * (1.0 / (1.0 + (2.0 * x).exp()) + 1.0 / (1.0 + (-2.0 * y).exp()))
}

/// Rabi frequency at `(t, z)`.
pub fn omega_at(schedule: &ControlSchedule, params: &MediumParams, t: f64, z: f64) -> Result<f64> {
    let tau = if schedule.retarded { t - z / params.c } else { t };
    schedule.omega_local(params, tau)
}

/// `θ = arctan(g√N / Ω)`, with `θ = π/2` exactly when `Ω = 0` in a coupled medium.
pub fn mixing_angle(omega: f64, params: &MediumParams) -> f64 {
    if params.g_root_n == 0.0 {
        return 0.0;
    }
    params.g_root_n.atan2(omega.max(0.0))
}

/// `v_g = c cos²θ`.
pub fn group_velocity(theta: f64, params: &MediumParams) -> f64 {
    let c = theta.cos();
    params.c * c * c
}

pub fn theta_at(schedule: &ControlSchedule, params: &MediumParams, t: f64, z: f64) -> Result<f64> {
    Ok(mixing_angle(omega_at(schedule, params, t, z)?, params))
}

/// Uniform space–time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, n_z: usize, t_min: f64, t_max: f64, n_t: usize) -> Result<Self> {
        let g = Self { z_min, z_max, n_z, t_min, t_max, n_t };
        g.validate()?;
        Ok(g)
    }

    /// Grid with `Δz = c Δt` covering `[t_min, t_max]` in `n_t` steps.
    pub fn aligned(z_min: f64, t_min: f64, t_max: f64, n_t: usize, z_max_at_least: f64, c: f64) -> Result<Self> {
        if n_t == 0 {
            return Err(Error::param("n_t", "need at least one step"));
        }
        let dt = (t_max - t_min) / n_t as f64;
        let dz = c * dt;
        let n_z = ((z_max_at_least - z_min) / dz).ceil() as usize + 1;
        Self::new(z_min, z_min + dz * (n_z - 1) as f64, n_z, t_min, t_max, n_t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_z < 2 {
            return Err(Error::param("n_z", "need at least two grid points"));
        }
        if self.n_t < 1 {
            return Err(Error::param("n_t", "need at least one step"));
        }
        if !(self.z_max > self.z_min) || !self.z_min.is_finite() || !self.z_max.is_finite() {
            return Err(Error::param("z_max", "must exceed z_min"));
        }
        if !(self.t_max > self.t_min) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(Error::param("t_max", "must exceed t_min"));
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.n_t as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + self.dz() * i as f64
    }

    pub fn t(&self, n: usize) -> f64 {
        self.t_min + self.dt() * n as f64
    }

    pub fn z_points(&self) -> Vec<f64> {
        (0..self.n_z).map(|i| self.z(i)).collect()
    }

    /// Ensures `Δz = c Δt` to 1e-9 relative.
    pub fn check_alignment(&self, c: f64) -> Result<()> {
        let (dz, cdt) = (self.dz(), c * self.dt());
        if ((dz - cdt) / dz).abs() > 1e-9 {
            return Err(Error::Config(format!("grid not aligned: Δz = {dz} but cΔt = {cdt}")));
        }
        Ok(())
    }
}
