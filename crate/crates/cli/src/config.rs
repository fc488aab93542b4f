//! TOML configuration. Every section is optional; omitted values fall back to
//! the storage-figure defaults (`g√N = 1`, `z ∈ [−60, 360]`, `t ∈ [0, 200]`,
//! 2101 × 2000 grid, reference schedule).

use std::path::Path;

use anyhow::{Context, Result};
use darkpol::bloch::{Method, SPECTRAL_STEP_RADIUS};
use darkpol::{ControlSchedule, Error, Grid, MediumParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub medium: MediumSection,
    pub schedule: ScheduleSection,
    pub grid: GridSection,
    pub scenario: ScenarioSection,
    pub oracle: OracleSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSection {
    pub g_root_n: f64,
    pub gamma_ab: f64,
    pub gamma_bc: f64,
    pub c: f64,
    pub length: f64,
}

impl Default for MediumSection {
    fn default() -> Self {
        Self { g_root_n: 1.0, gamma_ab: 0.0, gamma_bc: 0.0, c: 1.0, length: 420.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    TanhPair,
    StopAndRetrieve,
    Sampled,
}

/// Fields used depend on `kind`:
/// `constant` → `omega`; `tanh_pair` → `amplitude`, `steepness`, `t_off`,
/// `t_on` (`Ω = g√N · cot θ`); `stop_and_retrieve` → `theta_edge`,
/// `steepness`, `lead`, `hold`; `sampled` → `times`, `omegas`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub kind: ScheduleKind,
    pub retarded: bool,
    pub omega: Option<f64>,
    pub amplitude: Option<f64>,
    pub steepness: Option<f64>,
    pub t_off: Option<f64>,
    pub t_on: Option<f64>,
    pub theta_edge: Option<f64>,
    pub lead: Option<f64>,
    pub hold: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub omegas: Option<Vec<f64>>,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            kind: ScheduleKind::TanhPair,
            retarded: false,
            omega: None,
            amplitude: Some(100.0),
            steepness: Some(0.1),
            t_off: Some(15.0),
            t_on: Some(125.0),
            theta_edge: None,
            lead: None,
            hold: None,
            times: None,
            omegas: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { z_min: -60.0, z_max: 360.0, n_z: 2101, t_min: 0.0, t_max: 200.0, n_t: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Spectral,
    GridShift,
}

/// Initial Gaussian polariton `amplitude · exp(−((z − center)/width)²)` and
/// integrator settings.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub record_every: usize,
    pub method: MethodName,
    pub allow_strong_probe: bool,
    pub spectral_step: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            center: 0.0,
            width: 10.0,
            record_every: 20,
            method: MethodName::Spectral,
            allow_strong_probe: false,
            spectral_step: SPECTRAL_STEP_RADIUS,
        }
    }
}

/// Ramps are `Ω₀ cos²(πt/2T)` with `Ω₀ = omega0_factor · g√N` and
/// `T = ramp · 1/(g√N)`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub g: f64,
    pub atoms: Vec<usize>,
    pub excitations: Vec<usize>,
    /// Mixing angles in radians.
    pub thetas: Vec<f64>,
    pub n_max: usize,
    pub omega0_factor: f64,
    pub slow_ramp: f64,
    pub fast_ramp: f64,
    pub transfer_steps: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            g: 1.0,
            atoms: vec![2, 3, 4, 5],
            excitations: vec![1, 2],
            thetas: vec![0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0],
            n_max: 2,
            omega0_factor: 10.0,
            slow_ramp: 200.0,
            fast_ramp: 0.2,
            transfer_steps: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `g²N`
    G2n,
    /// Gaussian width of the initial pulse.
    PulseLength,
    /// `1/steepness` of the tanh ramps.
    RampTime,
    GammaBc,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { parameter: SweepParameter::G2n, values: Vec::new() }
    }
}

fn missing(field: &str, kind: ScheduleKind) -> Error {
    Error::Config(format!("[schedule] {field} is required for kind = {kind:?}"))
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.schedule()?;
        self.grid()?;
        let s = &self.scenario;
        if !(s.width > 0.0) {
            return Err(Error::Config("[scenario] width must be positive".into()).into());
        }
        if s.record_every == 0 {
            return Err(Error::Config("[scenario] record_every must be at least 1".into()).into());
        }
        Ok(())
    }

    /// Canonical text of the resolved configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn sha256(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn params(&self) -> Result<MediumParams> {
        let m = &self.medium;
        MediumParams::new(m.g_root_n, m.gamma_ab, m.gamma_bc, m.c, m.length)
            .map_err(|e| Error::Config(format!("[medium] {e}")).into())
    }

    pub fn schedule(&self) -> Result<ControlSchedule> {
        let s = &self.schedule;
        let req = |v: Option<f64>, field: &str| v.ok_or_else(|| missing(field, s.kind));
        let built = match s.kind {
            ScheduleKind::Constant => ControlSchedule::constant(req(s.omega, "omega")?),
            ScheduleKind::TanhPair => ControlSchedule::tanh_pair(
                req(s.amplitude, "amplitude")?,
                req(s.steepness, "steepness")?,
                req(s.t_off, "t_off")?,
                req(s.t_on, "t_on")?,
            ),
            ScheduleKind::StopAndRetrieve => ControlSchedule::stop_and_retrieve(
                req(s.theta_edge, "theta_edge")?,
                req(s.steepness, "steepness")?,
                req(s.lead, "lead")?,
                req(s.hold, "hold")?,
            ),
            ScheduleKind::Sampled => {
                let t = s.times.clone().ok_or_else(|| missing("times", s.kind))?;
                let w = s.omegas.clone().ok_or_else(|| missing("omegas", s.kind))?;
                ControlSchedule::sampled(t, w)
            }
        }
        .map_err(|e| Error::Config(format!("[schedule] {e}")))?;
        Ok(built.with_retardation(s.retarded))
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Grid::new(g.z_min, g.z_max, g.n_z, g.t_min, g.t_max, g.n_t)
            .map_err(|e| Error::Config(format!("[grid] {e}")).into())
    }

    pub fn method(&self) -> Method {
        match self.scenario.method {
            MethodName::Spectral => Method::Spectral,
            MethodName::GridShift => Method::GridShift,
        }
    }
}
