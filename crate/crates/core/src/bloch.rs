//! Linearized Maxwell–Bloch integration.
//!
//! With all atoms in `|b⟩`, noise expectation values dropped and matter
//! amplitudes scaled by `√N` (`p = √N σ_ba`, `s = √N σ_bc`), the probe and
//! the two coherences obey
//!
//! ```text
//! (∂t + c ∂z) E = i g√N p
//!  ∂t p = −γ_ab p + i g√N E + i Ω s
//!  ∂t s = −γ_bc s + i Ω p
//! ```
//!
//! Eliminating `p` to lowest order in `∂t` gives `s = −g√N E / Ω` and the
//! slow-light field equation; this module keeps the full system.
//!
//! Two schemes are provided:
//!
//! - [`Method::GridShift`]: Strang splitting on a grid with `Δz = c Δt`. The
//!   advection is an exact index shift; the local 3×3 atomic system is
//!   advanced by sub-cycled classical RK4. Supports retarded control and an
//!   incoming probe at `z_min`. Accurate only while `Δt √(g²N + Ω²) ≪ 1`:
//!   otherwise each shift leaves a bright-state residue that decays through
//!   `γ_ab` and shows up as spurious loss.
//! - [`Method::Spectral`]: for time-only control the system is translation
//!   invariant, so every Fourier mode evolves independently under a 3×3
//!   linear ODE. Modes are advanced by RK4 with steps resolving the bright
//!   splitting, independent of the spatial grid. The domain is periodic and
//!   the pulse must stay clear of its edges.

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::adiabatic::{check_compact_support, shift_profile, TimeSeries};
use crate::medium::{mixing_angle, omega_at, ControlSchedule, Grid, MediumParams};
use crate::numerics::interp::ComplexInterpolator;
use crate::numerics::{trapezoid, trapezoid_norm_sqr};
use crate::polariton::{from_polariton, FieldState, PolaritonProfile};
use crate::{Error, Result, C64};

/// `max|E| · g√N / Ω` at the start must stay below this unless overridden.
pub const WEAK_PROBE_BOUND: f64 = 0.1;

/// RK4 step times the local spectral radius.
const RK4_STEP_RADIUS: f64 = 0.05;

/// Same for the per-mode spectral stepper. RK4 damps a pure rotation by
/// `κ⁶/144` per step, which only touches the nearly empty bright branch.
pub const SPECTRAL_STEP_RADIUS: f64 = 0.2;

/// Fourier modes below this fraction of the largest one are dropped; they carry
/// under `1e-24` of the energy.
const MODE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GridShift,
    Spectral,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: MediumParams,
    pub schedule: ControlSchedule,
    pub grid: Grid,
    pub initial: FieldState,
    /// Snapshot interval in grid time steps.
    pub record_every: usize,
    pub method: Method,
    /// Probe entering at `z_min` ([`Method::GridShift`] only).
    pub inflow: Option<TimeSeries>,
    /// Skip the weak-probe check.
    pub allow_strong_probe: bool,
    /// RK4 step times spectral radius for [`Method::Spectral`].
    pub spectral_step: f64,
}

impl Scenario {
    pub fn new(
        params: MediumParams,
        schedule: ControlSchedule,
        grid: Grid,
        initial: FieldState,
        record_every: usize,
        method: Method,
    ) -> Self {
        Self { params, schedule, grid, initial, record_every, method, inflow: None, allow_strong_probe: false, spectral_step: SPECTRAL_STEP_RADIUS }
    }

    /// Starts on the adiabatic branch of `psi0`: `E = cos θ ψ`, `s = −sin θ ψ`,
    /// `p = 0`. The neglected `p` is first order in the slow time derivative and
    /// relaxes within a few `1/√(g²N + Ω²)`.
    pub fn from_polariton(
        params: MediumParams,
        schedule: ControlSchedule,
        grid: Grid,
        psi0: &PolaritonProfile,
        record_every: usize,
        method: Method,
    ) -> Result<Self> {
        if psi0.psi.len() != grid.n_z {
            return Err(Error::GridMismatch { expected: grid.n_z, found: psi0.psi.len() });
        }
        let mut initial = if schedule.retarded {
            let mut st = FieldState::zeros(grid.t_min, grid.n_z);
            for i in 0..grid.n_z {
                let theta = mixing_angle(omega_at(&schedule, &params, grid.t_min, grid.z(i))?, &params);
                let (sn, cs) = theta.sin_cos();
                st.e[i] = cs * psi0.psi[i];
                st.s[i] = -sn * psi0.psi[i];
            }
            st
        } else {
            let theta = mixing_angle(omega_at(&schedule, &params, grid.t_min, 0.0)?, &params);
            from_polariton(psi0, theta)
        };
        initial.t = grid.t_min;
        Ok(Self::new(params, schedule, grid, initial, record_every, method))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid.validate()?;
        self.initial.check_shape()?;
        if self.initial.len() != self.grid.n_z {
            return Err(Error::GridMismatch { expected: self.grid.n_z, found: self.initial.len() });
        }
        if !(self.spectral_step > 0.0 && self.spectral_step <= 1.0) {
            return Err(Error::param("spectral_step", "must lie in (0, 1]"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be at least 1"));
        }
        match self.method {
            Method::GridShift => self.grid.check_alignment(self.params.c)?,
            Method::Spectral => {
                if self.schedule.retarded {
                    return Err(Error::Config("spectral integration needs time-only control".into()));
                }
                if self.inflow.is_some() {
                    return Err(Error::Config("spectral integration has a periodic domain; no inflow".into()));
                }
            }
        }
        if !self.allow_strong_probe {
            self.check_weak_probe()?;
        }
        Ok(())
    }

    fn check_weak_probe(&self) -> Result<()> {
        let g = self.params.g_root_n;
        for (i, e) in self.initial.e.iter().enumerate() {
            if e.norm() == 0.0 || g == 0.0 {
                continue;
            }
            let w = omega_at(&self.schedule, &self.params, self.grid.t_min, self.grid.z(i))?;
            let r = e.norm() * g / w;
            if !(r < WEAK_PROBE_BOUND) {
                return Err(Error::Config(format!(
                    "initial probe not weak: |E| g√N / Ω = {r:.3e} at z = {} (bound {WEAK_PROBE_BOUND})",
                    self.grid.z(i)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// `∫|cos θ E − sin θ s|² dz`
    pub polariton_norm: f64,
    /// `∫(|E|² + |p|² + |s|²) dz`
    pub excitation: f64,
    /// Sub-grid position of the `|E|²` maximum, `None` for an empty state.
    pub peak_position: Option<f64>,
    /// Probe energy that has left through `z_max` so far.
    pub transmitted: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<FieldState>,
    pub schedule: ControlSchedule,
    pub diagnostics: Vec<Diagnostics>,
    pub grid: Grid,
}

impl Trajectory {
    pub fn last(&self) -> &FieldState {
        self.snapshots.last().expect("trajectory holds at least the initial snapshot")
    }
}

type Mat3 = [[C64; 3]; 3];

fn local_matrix(params: &MediumParams, omega: f64) -> Mat3 {
    let i = C64::i();
    let g = params.g_root_n;
    let z = C64::default();
    [
        [z, i * g, z],
        [i * g, C64::new(-params.gamma_ab, 0.0), i * omega],
        [z, i * omega, C64::new(-params.gamma_bc, 0.0)],
    ]
}

fn mat_vec(m: &Mat3, x: &[C64; 3]) -> [C64; 3] {
    [
        m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
        m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
        m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
    ]
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[C64::default(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
        }
    }
    out
}

fn spectral_radius_bound(params: &MediumParams, omega_max: f64, k: f64) -> f64 {
    (params.g2n() + omega_max * omega_max + (params.c * k).powi(2)).sqrt() + params.gamma_ab + params.gamma_bc
}

/// Largest `Ω` over `[ta, tb]` from a handful of samples.
fn omega_max_on(schedule: &ControlSchedule, params: &MediumParams, ta: f64, tb: f64) -> Result<f64> {
    let mut w = 0.0f64;
    for k in 0..=8 {
        w = w.max(schedule.omega_local(params, ta + (tb - ta) * k as f64 / 8.0)?);
    }
    Ok(w)
}

/// Propagator of `x' = M(Ω(τ)) x` over `[ta, tb]` by sub-cycled RK4.
fn local_propagator(schedule: &ControlSchedule, params: &MediumParams, ta: f64, tb: f64) -> Result<Mat3> {
    let w_max = omega_max_on(schedule, params, ta, tb)?;
    let rho = spectral_radius_bound(params, w_max, 0.0);
    let n_sub = ((tb - ta) * rho / RK4_STEP_RADIUS).ceil().max(1.0) as usize;
    let h = (tb - ta) / n_sub as f64;
    let one = C64::new(1.0, 0.0);
    let zero = C64::default();
    let mut u: Mat3 = [[one, zero, zero], [zero, one, zero], [zero, zero, one]];
    let mut w0 = schedule.omega_local(params, ta)?;
    for k in 0..n_sub {
        let t = ta + h * k as f64;
        let wm = schedule.omega_local(params, t + 0.5 * h)?;
        let w1 = schedule.omega_local(params, t + h)?;
        let (m0, mm, m1) = (local_matrix(params, w0), local_matrix(params, wm), local_matrix(params, w1));
        let k1 = mat_mul(&m0, &u);
        let k2 = mat_mul(&mm, &axpy3(&u, 0.5 * h, &k1));
        let k3 = mat_mul(&mm, &axpy3(&u, 0.5 * h, &k2));
        let k4 = mat_mul(&m1, &axpy3(&u, h, &k3));
        for r in 0..3 {
            for c in 0..3 {
                u[r][c] += h / 6.0 * (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]);
            }
        }
        w0 = w1;
    }
    Ok(u)
}

fn axpy3(a: &Mat3, h: f64, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] += h * b[r][c];
        }
    }
    out
}

/// Runs the scenario and returns snapshots every `record_every` steps plus the
/// final state.
pub fn integrate(scenario: &Scenario) -> Result<Trajectory> {
    scenario.validate()?;
    match scenario.method {
        Method::GridShift => integrate_grid_shift(scenario),
        Method::Spectral => integrate_spectral(scenario),
    }
}

fn record_steps(grid: &Grid, every: usize) -> Vec<usize> {
    let mut steps: Vec<usize> = (0..=grid.n_t).step_by(every).collect();
    if *steps.last().unwrap() != grid.n_t {
        steps.push(grid.n_t);
    }
    steps
}

fn diagnose(
    state: &FieldState,
    scenario: &Scenario,
    transmitted: f64,
) -> Result<Diagnostics> {
    let grid = &scenario.grid;
    let dz = grid.dz();
    let mut psi2 = Vec::with_capacity(state.len());
    let uniform_theta = if scenario.schedule.retarded {
        None
    } else {
        Some(mixing_angle(omega_at(&scenario.schedule, &scenario.params, state.t, 0.0)?, &scenario.params))
    };
    for i in 0..state.len() {
        let theta = match uniform_theta {
            Some(th) => th,
            None => mixing_angle(omega_at(&scenario.schedule, &scenario.params, state.t, grid.z(i))?, &scenario.params),
        };
        let (sn, cs) = theta.sin_cos();
        psi2.push((cs * state.e[i] - sn * state.s[i]).norm_sqr());
    }
    Ok(Diagnostics {
        t: state.t,
        polariton_norm: trapezoid(psi2, dz),
        excitation: state.excitation(dz),
        peak_position: peak_position(state, grid).ok(),
        transmitted,
    })
}

fn check_finite(state: &FieldState, step: usize) -> Result<()> {
    let ok = state.e.iter().chain(&state.p).chain(&state.s).all(|v| v.re.is_finite() && v.im.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::Instability { step, detail: format!("non-finite amplitude at t = {}", state.t) })
    }
}

fn integrate_grid_shift(scenario: &Scenario) -> Result<Trajectory> {
    let Scenario { params, schedule, grid, .. } = scenario;
    let n_z = grid.n_z;
    let dt = grid.dt();
    let dz = grid.dz();
    let mut st = scenario.initial.clone();
    st.t = grid.t_min;
    let inflow = match &scenario.inflow {
        Some(ts) => Some(ComplexInterpolator::new(ts.t0, ts.dt, &ts.values)?),
        None => None,
    };

    // Local time τ = t − (z − z_min)/c sits on the lattice t_min − z_min/c + (n − i)Δt,
    // so propagators are shared by index k = n − i.
    let lattice0 = if schedule.retarded { grid.t_min - grid.z_min / params.c } else { grid.t_min };
    let offset = n_z as isize;
    let mut cache: Vec<Option<(Mat3, Mat3)>> = if schedule.retarded { vec![None; grid.n_t + n_z + 1] } else { Vec::new() };
    let mut propagators = |k: isize| -> Result<(Mat3, Mat3)> {
        let tau = lattice0 + dt * k as f64;
        let make = || -> Result<(Mat3, Mat3)> {
            Ok((
                local_propagator(schedule, params, tau, tau + 0.5 * dt)?,
                local_propagator(schedule, params, tau + 0.5 * dt, tau + dt)?,
            ))
        };
        if !schedule.retarded {
            return make();
        }
        let slot = (k + offset) as usize;
        if let Some(u) = cache[slot] {
            return Ok(u);
        }
        let u = make()?;
        cache[slot] = Some(u);
        Ok(u)
    };

    let steps = record_steps(grid, scenario.record_every);
    let mut snapshots = vec![st.clone()];
    let mut transmitted = 0.0;
    let mut diagnostics = vec![diagnose(&st, scenario, transmitted)?];
    let mut next_record = 1;

    let apply = |st: &mut FieldState, i: usize, u: &Mat3| {
        let x = mat_vec(u, &[st.e[i], st.p[i], st.s[i]]);
        st.e[i] = x[0];
        st.p[i] = x[1];
        st.s[i] = x[2];
    };

    for n in 0..grid.n_t {
        if schedule.retarded {
            for i in 0..n_z {
                let (u1, _) = propagators(n as isize - i as isize)?;
                apply(&mut st, i, &u1);
            }
        } else {
            let (u1, _) = propagators(n as isize)?;
            for i in 0..n_z {
                apply(&mut st, i, &u1);
            }
        }

        // exact advection by one cell
        let out = st.e[n_z - 1];
        transmitted += out.norm_sqr() * dz;
        st.e.rotate_right(1);
        st.e[0] = match &inflow {
            Some(it) => it.eval_or_zero(grid.t(n + 1)),
            None => C64::default(),
        };

        if schedule.retarded {
            for i in 0..n_z {
                let (_, u2) = propagators(n as isize - i as isize)?;
                apply(&mut st, i, &u2);
            }
        } else {
            let (_, u2) = propagators(n as isize)?;
            for i in 0..n_z {
                apply(&mut st, i, &u2);
            }
        }
        st.t = grid.t(n + 1);
        check_finite(&st, n + 1)?;

        if next_record < steps.len() && steps[next_record] == n + 1 {
            diagnostics.push(diagnose(&st, scenario, transmitted)?);
            snapshots.push(st.clone());
            next_record += 1;
        }
    }
    Ok(Trajectory { snapshots, schedule: schedule.clone(), diagnostics, grid: *grid })
}

fn integrate_spectral(scenario: &Scenario) -> Result<Trajectory> {
    let Scenario { params, schedule, grid, .. } = scenario;
    let n = grid.n_z;
    let dz = grid.dz();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    for comp in [&scenario.initial.e, &scenario.initial.p, &scenario.initial.s] {
        check_compact_support(comp, "initial state (periodic domain)")?;
    }
    let transform = |v: &[C64]| {
        let mut buf = v.to_vec();
        fwd.process(&mut buf);
        buf
    };
    let (fe, fp, fs) = (transform(&scenario.initial.e), transform(&scenario.initial.p), transform(&scenario.initial.s));
    let amp = |m: usize| fe[m].norm().max(fp[m].norm()).max(fs[m].norm());
    let peak = (0..n).map(amp).fold(0.0, f64::max);
    let period = n as f64 * dz;
    let wavenumber = |m: usize| {
        let mm = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        2.0 * std::f64::consts::PI * mm / period
    };
    let active: Vec<usize> = (0..n).filter(|&m| amp(m) > MODE_FLOOR * peak).collect();
    let k_max = active.iter().map(|&m| wavenumber(m).abs()).fold(0.0, f64::max);
    // E(z) = (1/n) Σ_m X_m e^{i k_m (z − z_min)}: translation phases are carried by X_m
    let mut modes: Vec<[C64; 3]> = active.iter().map(|&m| [fe[m], fp[m], fs[m]]).collect();
    let ks: Vec<f64> = active.iter().map(|&m| wavenumber(m)).collect();

    let steps = record_steps(grid, scenario.record_every);
    let mut st0 = scenario.initial.clone();
    st0.t = grid.t_min;
    let mut snapshots = vec![st0.clone()];
    let mut diagnostics = vec![diagnose(&st0, scenario, 0.0)?];

    let scale = 1.0 / n as f64;
    for w in steps.windows(2) {
        let (ta, tb) = (grid.t(w[0]), grid.t(w[1]));
        let w_max = omega_max_on(schedule, params, ta, tb)?;
        let rho = spectral_radius_bound(params, w_max, k_max);
        let n_sub = ((tb - ta) * rho / scenario.spectral_step).ceil().max(1.0) as usize;
        let h = (tb - ta) / n_sub as f64;
        let omegas: Vec<f64> = (0..=2 * n_sub)
            .map(|j| schedule.omega_local(params, ta + 0.5 * h * j as f64))
            .collect::<Result<_>>()?;
        let (g, ga, gb, c) = (params.g_root_n, params.gamma_ab, params.gamma_bc, params.c);
        modes.par_iter_mut().zip(ks.par_iter()).for_each(|(x, &k)| {
            let i = C64::i();
            let rhs = |w: f64, v: &[C64; 3]| -> [C64; 3] {
                [
                    -i * (c * k) * v[0] + i * g * v[1],
                    i * g * v[0] - ga * v[1] + i * w * v[2],
                    i * w * v[1] - gb * v[2],
                ]
            };
            let add = |v: &[C64; 3], a: f64, d: &[C64; 3]| [v[0] + a * d[0], v[1] + a * d[1], v[2] + a * d[2]];
            for j in 0..n_sub {
                let (w0, wm, w1) = (omegas[2 * j], omegas[2 * j + 1], omegas[2 * j + 2]);
                let k1 = rhs(w0, x);
                let k2 = rhs(wm, &add(x, 0.5 * h, &k1));
                let k3 = rhs(wm, &add(x, 0.5 * h, &k2));
                let k4 = rhs(w1, &add(x, h, &k3));
                for r in 0..3 {
                    x[r] += h / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
                }
            }
        });

        let mut comps = [vec![C64::default(); n], vec![C64::default(); n], vec![C64::default(); n]];
        for (x, &m) in modes.iter().zip(&active) {
            for r in 0..3 {
                comps[r][m] = x[r];
            }
        }
        for comp in comps.iter_mut() {
            inv.process(comp);
            for v in comp.iter_mut() {
                *v *= scale;
            }
        }
        let [e, p, s] = comps;
        let st = FieldState { t: tb, e, p, s };
        check_finite(&st, w[1])?;
        for comp in [&st.e, &st.p, &st.s] {
            check_compact_support(comp, &format!("state at t = {tb} (periodic domain)"))?;
        }
        diagnostics.push(diagnose(&st, scenario, 0.0)?);
        snapshots.push(st);
    }
    Ok(Trajectory { snapshots, schedule: schedule.clone(), diagnostics, grid: *grid })
}

/// Share of the excitation below which the probe is treated as absent.
const PROBE_FLOOR: f64 = 1e-20;

/// Sub-grid location of the `|E|²` maximum. Falls back to the matter density
/// when the probe carries a negligible share of the excitation.
pub fn peak_position(state: &FieldState, grid: &Grid) -> Result<f64> {
    let mut dens: Vec<f64> = state.e.iter().map(|v| v.norm_sqr()).collect();
    let matter: Vec<f64> = (0..state.len()).map(|i| state.p[i].norm_sqr() + state.s[i].norm_sqr()).collect();
    if dens.iter().sum::<f64>() <= PROBE_FLOOR * matter.iter().sum::<f64>() {
        dens = matter;
    }
    let (imax, vmax) = dens.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    if !(vmax > 0.0) {
        return Err(Error::InsufficientData("empty state has no peak".into()));
    }
    if imax == 0 || imax + 1 >= dens.len() {
        return Err(Error::DomainOverflow(format!("peak at grid edge (index {imax})")));
    }
    let (a, b, c) = (dens[imax - 1], dens[imax], dens[imax + 1]);
    let den = a - 2.0 * b + c;
    let off = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
    Ok(grid.z(imax) + off * grid.dz())
}

/// Least-squares slope of the `|E|²` peak position over snapshots in the window.
pub fn measure_peak_velocity(trajectory: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    let mut pts = Vec::new();
    for st in trajectory.snapshots.iter().filter(|s| s.t >= t0 - 1e-12 && s.t <= t1 + 1e-12) {
        pts.push((st.t, peak_position(st, &trajectory.grid)?));
    }
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!("{} snapshots inside the window", pts.len())));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mz = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mz)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    /// `|⟨E_in, E_out⟩|² / (‖E_in‖² ‖E_out‖²)` after centroid alignment.
    pub fidelity: f64,
    /// `‖E_out‖² / ‖E_in‖²`
    pub energy_ratio: f64,
    /// Shift applied to the output to align centroids.
    pub shift: f64,
}

fn centroid(values: &[C64], dz: f64) -> f64 {
    let w: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    values.iter().enumerate().map(|(i, v)| i as f64 * dz * v.norm_sqr()).sum::<f64>() / w
}

/// Shape fidelity and energy ratio between an input and an output profile
/// sampled with the same spacing.
pub fn storage_retrieval_fidelity(input: &[C64], output: &[C64], dz: f64) -> Result<FidelityReport> {
    if input.len() != output.len() {
        return Err(Error::GridMismatch { expected: input.len(), found: output.len() });
    }
    let n_in = trapezoid_norm_sqr(input, dz);
    if !(n_in > 0.0) {
        return Err(Error::param("input", "zero-norm input profile"));
    }
    let n_out = trapezoid_norm_sqr(output, dz);
    if n_out == 0.0 {
        return Ok(FidelityReport { fidelity: 0.0, energy_ratio: 0.0, shift: 0.0 });
    }
    let shift = centroid(input, dz) - centroid(output, dz);
    let axis = Grid::new(0.0, dz * (output.len() - 1) as f64, output.len(), 0.0, 1.0, 1)?;
    let aligned = shift_profile(output, &axis, shift)?;
    let n_al = trapezoid_norm_sqr(&aligned, dz);
    let overlap: C64 = input.iter().zip(&aligned).map(|(a, b)| a.conj() * b).sum::<C64>() * dz;
    Ok(FidelityReport {
        fidelity: (overlap.norm_sqr() / (n_in * n_al)).min(1.0),
        energy_ratio: n_out / n_in,
        shift,
    })
}
