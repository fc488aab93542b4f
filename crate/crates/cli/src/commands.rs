use std::path::Path;

use anyhow::{Context, Result};
use darkpol::adiabatic::{displacement, polariton_from_ratio, ratio_from_polariton, transport, transport_retarded_at};
use darkpol::bloch::{integrate, storage_retrieval_fidelity, Scenario, Trajectory};
use darkpol::medium::{mixing_angle, omega_at};
use darkpol::oracle::{self, SystemSpec};
use darkpol::polariton::{polariton_norm, to_polariton};
use darkpol::validity::{self, adiabaticity_figure, excitation_count, first_correction, intensity_ratio_residual, storage_bound, z_max};
use darkpol::{Error, FieldState, Grid, PolaritonProfile, C64};
use rayon::prelude::*;

use crate::config::{Config, ScheduleKind, SweepParameter};
use crate::output::{Artifacts, Cell, Table};

fn initial_profile(cfg: &Config, grid: &Grid) -> PolaritonProfile {
    let s = &cfg.scenario;
    PolaritonProfile::gaussian(grid, grid.t_min, s.amplitude, s.center, s.width)
}

fn record_times(grid: &Grid, every: usize) -> Vec<f64> {
    let mut steps: Vec<usize> = (0..=grid.n_t).step_by(every).collect();
    if *steps.last().unwrap() != grid.n_t {
        steps.push(grid.n_t);
    }
    steps.into_iter().map(|n| grid.t(n)).collect()
}

/// Mixing angle at every grid point.
fn thetas(cfg: &Config, grid: &Grid, t: f64) -> Result<Vec<f64>> {
    let (params, schedule) = (cfg.params()?, cfg.schedule()?);
    (0..grid.n_z)
        .map(|i| Ok(mixing_angle(omega_at(&schedule, &params, t, grid.z(i))?, &params)))
        .collect()
}

/// Adiabatic polariton at each of `times`.
fn adiabatic_profiles(cfg: &Config, grid: &Grid, times: &[f64]) -> Result<Vec<PolaritonProfile>> {
    let (params, schedule) = (cfg.params()?, cfg.schedule()?);
    let initial = initial_profile(cfg, grid);
    if !schedule.retarded {
        return times
            .iter()
            .map(|&t| transport(&initial, grid, &schedule, &params, t).map_err(Into::into))
            .collect();
    }
    let ratio: Vec<C64> = (0..grid.n_z)
        .map(|i| ratio_from_polariton(initial.psi[i], omega_at(&schedule, &params, grid.t_min, grid.z(i))?, &params))
        .collect::<darkpol::Result<_>>()?;
    let ratios = transport_retarded_at(&ratio, &schedule, &params, grid, times)?;
    ratios
        .into_iter()
        .map(|r| {
            let psi = (0..grid.n_z)
                .map(|i| Ok(polariton_from_ratio(r.ratio[i], omega_at(&schedule, &params, r.t, grid.z(i))?, &params)))
                .collect::<darkpol::Result<_>>()?;
            Ok(PolaritonProfile::new(r.t, psi))
        })
        .collect()
}

/// `E = cos θ ψ`, `s = −sin θ ψ` pointwise.
fn components(cfg: &Config, grid: &Grid, profile: &PolaritonProfile) -> Result<FieldState> {
    let th = thetas(cfg, grid, profile.t)?;
    let mut st = FieldState::zeros(profile.t, grid.n_z);
    for i in 0..grid.n_z {
        let (s, c) = th[i].sin_cos();
        st.e[i] = c * profile.psi[i];
        st.s[i] = -s * profile.psi[i];
    }
    Ok(st)
}

fn snapshot_polariton(cfg: &Config, grid: &Grid, state: &FieldState) -> Result<PolaritonProfile> {
    if !cfg.schedule.retarded {
        let (params, schedule) = (cfg.params()?, cfg.schedule()?);
        let theta = mixing_angle(omega_at(&schedule, &params, state.t, 0.0)?, &params);
        return Ok(to_polariton(state, theta)?);
    }
    let th = thetas(cfg, grid, state.t)?;
    let psi = (0..grid.n_z)
        .map(|i| {
            let (s, c) = th[i].sin_cos();
            c * state.e[i] - s * state.s[i]
        })
        .collect();
    Ok(PolaritonProfile::new(state.t, psi))
}

fn run_bloch(cfg: &Config) -> Result<Trajectory> {
    let (params, schedule, grid) = (cfg.params()?, cfg.schedule()?, cfg.grid()?);
    let psi = initial_profile(cfg, &grid);
    let mut scenario = Scenario::from_polariton(params, schedule, grid, &psi, cfg.scenario.record_every, cfg.method())?;
    scenario.allow_strong_probe = cfg.scenario.allow_strong_probe;
    scenario.spectral_step = cfg.scenario.spectral_step;
    Ok(integrate(&scenario)?)
}

fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&[
        ("t", "T"),
        ("z", "L"),
        ("re_e", "field"),
        ("im_e", "field"),
        ("re_p", "field"),
        ("im_p", "field"),
        ("re_s", "field"),
        ("im_s", "field"),
    ]);
    for st in &traj.snapshots {
        for i in 0..st.len() {
            t.row(vec![
                st.t.into(),
                traj.grid.z(i).into(),
                st.e[i].re.into(),
                st.e[i].im.into(),
                st.p[i].re.into(),
                st.p[i].im.into(),
                st.s[i].re.into(),
                st.s[i].im.into(),
            ]);
        }
    }
    t
}

fn diagnostics_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&[
        ("t", "T"),
        ("polariton_norm", "field^2 L"),
        ("excitation", "field^2 L"),
        ("peak_position", "L"),
        ("transmitted", "field^2 L"),
    ]);
    for d in &traj.diagnostics {
        t.row(vec![
            d.t.into(),
            d.polariton_norm.into(),
            d.excitation.into(),
            d.peak_position.unwrap_or(f64::NAN).into(),
            d.transmitted.into(),
        ]);
    }
    t
}

/// Bloch polariton against the adiabatic prediction at every snapshot.
fn comparison_table(cfg: &Config, traj: &Trajectory) -> Result<Table> {
    let grid = traj.grid;
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let adiabatic = adiabatic_profiles(cfg, &grid, &times)?;
    let mut t = Table::new(&[("t", "T"), ("rel_l2_psi", "1"), ("norm_bloch", "field^2 L"), ("norm_adiabatic", "field^2 L")]);
    for (st, ad) in traj.snapshots.iter().zip(&adiabatic) {
        let psi = snapshot_polariton(cfg, &grid, st)?;
        t.row(vec![
            st.t.into(),
            rel_l2(&psi.psi, &ad.psi).into(),
            polariton_norm(&psi, &grid).into(),
            polariton_norm(ad, &grid).into(),
        ]);
    }
    Ok(t)
}

pub fn fig2(cfg: &Config, out: &Path, full_bloch: bool) -> Result<()> {
    let (params, schedule, grid) = (cfg.params()?, cfg.schedule()?, cfg.grid()?);
    let mut art = Artifacts::new(out)?;

    let mut sched = Table::new(&[("t", "T"), ("cot_theta", "1"), ("theta", "rad"), ("v_g", "L/T")]);
    for n in 0..=grid.n_t {
        let t = grid.t(n);
        let w = omega_at(&schedule, &params, t, 0.0)?;
        let theta = mixing_angle(w, &params);
        let cot = if params.g_root_n > 0.0 { w / params.g_root_n } else { f64::INFINITY };
        sched.row(vec![t.into(), cot.into(), theta.into(), (params.c * theta.cos().powi(2)).into()]);
    }
    art.write_table("schedule.csv", &sched)?;

    let times = record_times(&grid, cfg.scenario.record_every);
    let profiles = adiabatic_profiles(cfg, &grid, &times)?;
    let mut pol = Table::new(&[("t", "T"), ("z", "L"), ("abs_psi", "field")]);
    let mut comp = Table::new(&[("t", "T"), ("z", "L"), ("re_e", "field"), ("im_e", "field"), ("abs_sigma_cb", "field")]);
    let mut summary = Table::new(&[
        ("t", "T"),
        ("displacement", "L"),
        ("max_abs_psi", "field"),
        ("max_abs_e", "field"),
        ("max_abs_sigma_cb", "field"),
    ]);
    for p in &profiles {
        let st = components(cfg, &grid, p)?;
        for i in 0..grid.n_z {
            let z = grid.z(i);
            pol.row(vec![p.t.into(), z.into(), p.psi[i].norm().into()]);
            comp.row(vec![p.t.into(), z.into(), st.e[i].re.into(), st.e[i].im.into(), st.s[i].norm().into()]);
        }
        let max = |v: &[C64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let disp = if schedule.retarded { f64::NAN } else { displacement(&schedule, &params, grid.t_min, p.t)? };
        summary.row(vec![p.t.into(), disp.into(), max(&p.psi).into(), max(&st.e).into(), max(&st.s).into()]);
    }
    art.write_table("polariton.csv", &pol)?;
    art.write_table("components.csv", &comp)?;
    art.write_table("summary.csv", &summary)?;

    if full_bloch {
        let traj = run_bloch(cfg)?;
        art.write_table("bloch.csv", &trajectory_table(&traj))?;
        art.write_table("bloch_comparison.csv", &comparison_table(cfg, &traj)?)?;
    }
    art.finish("fig2", &cfg.sha256())?;
    Ok(())
}

pub fn propagate(cfg: &Config, out: &Path) -> Result<()> {
    let traj = run_bloch(cfg)?;
    let mut art = Artifacts::new(out)?;
    art.write_table("trajectory.csv", &trajectory_table(&traj))?;
    art.write_table("diagnostics.csv", &diagnostics_table(&traj))?;
    art.write_table("comparison.csv", &comparison_table(cfg, &traj)?)?;
    art.finish("propagate", &cfg.sha256())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoreReport {
    pub fidelity: f64,
    pub energy_ratio: f64,
    pub adiabaticity_figure: f64,
    pub grade: validity::Grade,
    pub measured_displacement: f64,
    /// `NaN` for retarded control.
    pub predicted_displacement: f64,
    pub fidelity_vs_adiabatic: f64,
    pub energy_ratio_vs_adiabatic: f64,
}

pub fn store_report(cfg: &Config) -> Result<StoreReport> {
    let (params, schedule, grid) = (cfg.params()?, cfg.schedule()?, cfg.grid()?);
    let traj = run_bloch(cfg)?;
    let first = &traj.snapshots[0];
    let last = traj.last();
    let rep = storage_retrieval_fidelity(&first.e, &last.e, grid.dz())?;
    let figure = adiabaticity_figure(&params, cfg.scenario.width)?;
    let predicted = if schedule.retarded { f64::NAN } else { displacement(&schedule, &params, grid.t_min, last.t)? };
    let adiabatic = adiabatic_profiles(cfg, &grid, &[last.t])?;
    let expected = components(cfg, &grid, &adiabatic[0])?;
    let vs = storage_retrieval_fidelity(&expected.e, &last.e, grid.dz())?;
    Ok(StoreReport {
        fidelity: rep.fidelity,
        energy_ratio: rep.energy_ratio,
        adiabaticity_figure: figure.value,
        grade: figure.grade,
        measured_displacement: -rep.shift,
        predicted_displacement: predicted,
        fidelity_vs_adiabatic: vs.fidelity,
        energy_ratio_vs_adiabatic: vs.energy_ratio,
    })
}

pub fn store(cfg: &Config, out: &Path) -> Result<()> {
    let r = store_report(cfg)?;
    let mut t = Table::new(&[("quantity", "-"), ("value", "see unit"), ("unit", "-")]);
    let rows: [(&str, Cell, &str); 8] = [
        ("fidelity", r.fidelity.into(), "1"),
        ("energy_ratio", r.energy_ratio.into(), "1"),
        ("adiabaticity_figure", r.adiabaticity_figure.into(), "1"),
        ("adiabaticity_grade", r.grade.to_string().into(), "-"),
        ("measured_displacement", r.measured_displacement.into(), "L"),
        ("predicted_displacement", r.predicted_displacement.into(), "L"),
        ("fidelity_vs_adiabatic", r.fidelity_vs_adiabatic.into(), "1"),
        ("energy_ratio_vs_adiabatic", r.energy_ratio_vs_adiabatic.into(), "1"),
    ];
    for (q, v, u) in rows {
        t.row(vec![q.into(), v, u.into()]);
    }
    let mut art = Artifacts::new(out)?;
    art.write_table("report.csv", &t)?;
    art.finish("store", &cfg.sha256())?;
    println!("fidelity: {:.9}", r.fidelity);
    println!("energy_ratio: {:.9}", r.energy_ratio);
    println!("adiabaticity_figure: {:.6e} ({})", r.adiabaticity_figure, r.grade);
    println!("displacement: measured {:.6} predicted {:.6}", r.measured_displacement, r.predicted_displacement);
    println!("vs_adiabatic: fidelity {:.9} energy_ratio {:.9}", r.fidelity_vs_adiabatic, r.energy_ratio_vs_adiabatic);
    Ok(())
}

pub fn validity_report(cfg: &Config, out: &Path) -> Result<()> {
    let (params, schedule, grid) = (cfg.params()?, cfg.schedule()?, cfg.grid()?);
    let l_p = cfg.scenario.width;
    let traj = run_bloch(cfg)?;
    let n_e = traj.snapshots.iter().map(|s| excitation_count(s, grid.dz())).max().unwrap_or(1);
    let fig = adiabaticity_figure(&params, l_p)?;
    let zmax = z_max(&params, l_p)?;
    let storage = storage_bound(&params, n_e)?;

    let mut rep = Table::new(&[("quantity", "-"), ("value", "see unit"), ("unit", "-"), ("note", "-")]);
    rep.row(vec!["z_max".into(), zmax.to_string().into(), "L".into(), "loss-free propagation distance".into()]);
    rep.row(vec!["adiabaticity_figure".into(), fig.value.into(), "1".into(), format!("grade {}", fig.grade).into()]);
    rep.row(vec!["excitation_count".into(), n_e.into(), "1".into(), "ceil of the largest matter norm".into()]);
    rep.row(vec!["storage_time_scale".into(), storage.hard.to_string().into(), "T".into(), "1/(gamma_bc n_e)".into()]);
    rep.row(vec!["usable_storage_time".into(), storage.usable.to_string().into(), "T".into(), "0.1 of the scale (report convention)".into()]);

    let mut res = Table::new(&[("t", "T"), ("omega", "1/T"), ("residual", "1"), ("status", "-")]);
    for st in &traj.snapshots {
        let w = omega_at(&schedule, &params, st.t, 0.0)?;
        let (value, status) = if schedule.retarded {
            (f64::NAN, "retarded".to_string())
        } else {
            match intensity_ratio_residual(st, w, &params) {
                Ok(v) => (v, "ok".to_string()),
                Err(Error::DegenerateControl { .. }) => (f64::NAN, "degenerate_control".to_string()),
                Err(Error::UndefinedResidual(_)) => (f64::NAN, "undefined".to_string()),
                Err(e) => return Err(e.into()),
            }
        };
        res.row(vec![st.t.into(), w.into(), value.into(), status.into()]);
    }

    // first correction on the adiabatic solution, relative to the adiabatic s
    let dt = grid.dt();
    let mut corr = Table::new(&[("t", "T"), ("max_abs_correction", "field"), ("max_abs_s", "field"), ("ratio", "1"), ("status", "-")]);
    for t in record_times(&grid, cfg.scenario.record_every) {
        if t - dt < grid.t_min - 1e-12 || t + dt > grid.t_max + 1e-12 {
            continue;
        }
        let profiles = adiabatic_profiles(cfg, &grid, &[t - dt, t, t + dt])?;
        let snaps = profiles.iter().map(|p| components(cfg, &grid, p)).collect::<Result<Vec<_>>>()?;
        let max_s = snaps[1].s.iter().map(|v| v.norm()).fold(0.0, f64::max);
        match first_correction(&snaps, &schedule, &params, &grid, dt) {
            Ok(c) => {
                let m = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
                corr.row(vec![t.into(), m.into(), max_s.into(), (m / max_s).into(), "ok".into()]);
            }
            Err(Error::DegenerateControl { .. }) => {
                corr.row(vec![t.into(), f64::NAN.into(), max_s.into(), f64::NAN.into(), "degenerate_control".into()]);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut art = Artifacts::new(out)?;
    art.write_table("report.csv", &rep)?;
    art.write_table("residuals.csv", &res)?;
    art.write_table("correction.csv", &corr)?;
    art.finish("validity", &cfg.sha256())?;
    Ok(())
}

struct TransferRow {
    n_atoms: usize,
    ramp: f64,
    t_final: f64,
    mapping: f64,
    roundtrip: f64,
    norm_drift: f64,
    excitation_drift: f64,
    trace: Vec<oracle::TransferPoint>,
}

fn transfer_rows(o: &crate::config::OracleSection, n_atoms: usize) -> Result<Vec<TransferRow>> {
    use std::f64::consts::FRAC_PI_2;
    let gn = o.g * (n_atoms as f64).sqrt();
    let mut rows = Vec::new();
    for ramp in [o.slow_ramp, o.fast_ramp] {
        let t = ramp / gn;
        let omega0 = o.omega0_factor * gn;
        let spec = SystemSpec::new(n_atoms, 1, o.g, oracle::cosine_ramp(omega0, t, 2.0 * t)?)?;
        let theta0 = spec.theta(spec.omega(0.0)?);
        let psi0 = oracle::dark_state(&spec, theta0, 1)?;
        let (mid, trace) = oracle::evolve_transfer(&spec, &psi0, t, o.transfer_steps)?;
        let spin = oracle::dark_state(&spec, FRAC_PI_2, 1)?;
        let (back, back_trace) = oracle::evolve_transfer(&spec, &psi0, 2.0 * t, 2 * o.transfer_steps)?;
        let x0 = trace[0].excitation;
        let all = trace.iter().chain(&back_trace);
        let (norm_drift, excitation_drift) = all.fold((0.0f64, 0.0f64), |(a, b), p| (a.max(p.norm_drift), b.max((p.excitation - x0).abs())));
        rows.push(TransferRow {
            n_atoms,
            ramp,
            t_final: t,
            mapping: spin.overlap(&mid).norm_sqr(),
            roundtrip: psi0.overlap(&back).norm_sqr(),
            norm_drift,
            excitation_drift,
            trace,
        });
    }
    Ok(rows)
}

pub fn oracle_report(cfg: &Config, out: &Path) -> Result<()> {
    let o = &cfg.oracle;
    if o.atoms.is_empty() {
        return Err(Error::Config("[oracle] atoms is empty".into()).into());
    }
    let mut res = Table::new(&[
        ("n_atoms", "1"),
        ("n", "1"),
        ("theta", "rad"),
        ("omega", "1/T"),
        ("dark_residual", "1/T"),
        ("commutator", "1"),
    ]);
    for &n_atoms in &o.atoms {
        for &n in &o.excitations {
            for &theta in &o.thetas {
                let spec = SystemSpec::new(n_atoms, o.n_max.max(n), o.g, darkpol::ControlSchedule::constant(0.0)?)?;
                if n > n_atoms {
                    continue;
                }
                let omega = oracle::matched_omega(&spec, theta);
                let r = oracle::dark_residual(&spec, theta, n, omega)?;
                let comm = oracle::commutator_expectation(&spec, theta, None)?;
                res.row(vec![n_atoms.into(), n.into(), theta.into(), omega.into(), r.into(), comm.into()]);
            }
        }
    }

    let rows: Vec<Vec<TransferRow>> = o.atoms.par_iter().map(|&n| transfer_rows(o, n)).collect::<Result<_>>()?;
    let mut tr = Table::new(&[
        ("n_atoms", "1"),
        ("ramp", "1/(g sqrt N)"),
        ("t_final", "T"),
        ("mapping_fidelity", "1"),
        ("roundtrip_fidelity", "1"),
        ("max_norm_drift", "1"),
        ("max_excitation_drift", "1"),
    ]);
    let mut trace = Table::new(&[("n_atoms", "1"), ("ramp", "1/(g sqrt N)"), ("t", "T"), ("omega", "1/T"), ("theta", "rad"), ("fidelity", "1")]);
    for r in rows.iter().flatten() {
        tr.row(vec![
            r.n_atoms.into(),
            r.ramp.into(),
            r.t_final.into(),
            r.mapping.into(),
            r.roundtrip.into(),
            r.norm_drift.into(),
            r.excitation_drift.into(),
        ]);
        for p in &r.trace {
            trace.row(vec![r.n_atoms.into(), r.ramp.into(), p.t.into(), p.omega.into(), p.theta.into(), p.fidelity.into()]);
        }
    }
    let mut art = Artifacts::new(out)?;
    art.write_table("residuals.csv", &res)?;
    art.write_table("transfer.csv", &tr)?;
    art.write_table("trace.csv", &trace)?;
    art.finish("oracle", &cfg.sha256())?;
    Ok(())
}

fn swept(cfg: &Config, value: f64) -> Result<Config> {
    let mut c = cfg.clone();
    match cfg.sweep.parameter {
        SweepParameter::G2n => {
            if !(value >= 0.0) {
                return Err(Error::Config(format!("[sweep] g2n value {value} is negative")).into());
            }
            c.medium.g_root_n = value.sqrt();
        }
        SweepParameter::PulseLength => c.scenario.width = value,
        SweepParameter::GammaBc => c.medium.gamma_bc = value,
        SweepParameter::RampTime => {
            if !matches!(c.schedule.kind, ScheduleKind::TanhPair | ScheduleKind::StopAndRetrieve) {
                return Err(Error::Config("[sweep] ramp_time needs a tanh_pair or stop_and_retrieve schedule".into()).into());
            }
            if !(value > 0.0) {
                return Err(Error::Config(format!("[sweep] ramp_time value {value} must be positive")).into());
            }
            c.schedule.steepness = Some(1.0 / value);
        }
    }
    c.validate()?;
    Ok(c)
}

pub fn sweep(cfg: &Config, out: &Path) -> Result<()> {
    if cfg.sweep.values.is_empty() {
        return Err(Error::Config("[sweep] values is empty".into()).into());
    }
    let configs = cfg.sweep.values.iter().map(|&v| swept(cfg, v)).collect::<Result<Vec<_>>>()?;
    let reports: Vec<StoreReport> = configs
        .par_iter()
        .zip(&cfg.sweep.values)
        .map(|(c, v)| store_report(c).with_context(|| format!("sweep value {v}")))
        .collect::<Result<_>>()?;
    let name = match cfg.sweep.parameter {
        SweepParameter::G2n => ("g2n", "1/T^2"),
        SweepParameter::PulseLength => ("pulse_length", "L"),
        SweepParameter::RampTime => ("ramp_time", "T"),
        SweepParameter::GammaBc => ("gamma_bc", "1/T"),
    };
    let mut t = Table::new(&[name, ("adiabaticity_figure", "1"), ("fidelity", "1"), ("energy_ratio", "1"), ("fidelity_vs_adiabatic", "1")]);
    for (v, r) in cfg.sweep.values.iter().zip(&reports) {
        t.row(vec![(*v).into(), r.adiabaticity_figure.into(), r.fidelity.into(), r.energy_ratio.into(), r.fidelity_vs_adiabatic.into()]);
    }
    let mut art = Artifacts::new(out)?;
    art.write_table("sweep.csv", &t)?;
    art.finish("sweep", &cfg.sha256())?;
    Ok(())
}
