//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line and the test
//! asserts on the outcome, so failures show up both in the log and in the
//! harness summary. Run with `cargo test -p darkpol --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::Instant;

use darkpol::adiabatic::{displacement, inject_boundary, transport, TimeSeries};
use darkpol::bloch::{integrate, measure_peak_velocity, storage_retrieval_fidelity, Method, Scenario, Trajectory};
use darkpol::medium::{mixing_angle, omega_at};
use darkpol::oracle::{
    commutator_expectation, cosine_ramp, dark_residual, dark_state, evolve_transfer, matched_omega, SystemSpec,
};
use darkpol::polariton::{from_polariton_with_rate, polariton_norm};
use darkpol::validity::{adiabaticity_figure, intensity_ratio_residual};
use rayon::prelude::*;

use darkpol::{ControlSchedule, Error, Grid, MediumParams, PolaritonProfile, C64};

fn verdict(id: &str, pass: bool, detail: String) -> bool {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

// Reference displacement of the reference schedule, high-precision quadrature.
const D40: f64 = 37.014_971_617_997_8;
const D70: f64 = 37.944_481_487_234_4;
const D100: f64 = 38.873_991_356_470_98;
const D200: f64 = 135.882_913_178_294_2;

fn reference() -> (MediumParams, ControlSchedule, Grid) {
    (
        MediumParams::lossless(1.0, 420.0).unwrap(),
        ControlSchedule::tanh_pair(100.0, 0.1, 15.0, 125.0).unwrap(),
        Grid::new(-60.0, 360.0, 2101, 0.0, 200.0, 2000).unwrap(),
    )
}

#[test]
fn criterion_1_translation() {
    let clock = Instant::now();
    let (params, schedule, grid) = reference();
    let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 1.0, 0.0, 10.0);
    let n0 = polariton_norm(&psi0, &grid);
    let mut worst = 0.0f64;
    let mut norm_err = 0.0f64;
    for k in 0..=100 {
        let t = 2.0 * k as f64;
        let out = transport(&psi0, &grid, &schedule, &params, t).unwrap();
        let d = displacement(&schedule, &params, 0.0, t).unwrap();
        let exact = PolaritonProfile::gaussian(&grid, t, 1.0, d, 10.0);
        worst = worst.max(rel_l2(&out.psi, &exact.psi));
        norm_err = norm_err.max((polariton_norm(&out, &grid) / n0 - 1.0).abs());
    }
    let refs = [(40.0, D40), (70.0, D70), (100.0, D100), (200.0, D200)];
    let d_err = refs
        .iter()
        .map(|(t, d)| (displacement(&schedule, &params, 0.0, *t).unwrap() - d).abs())
        .fold(0.0, f64::max);
    let secs = clock.elapsed().as_secs_f64();
    let ok = [
        verdict("1a", worst < 1e-6, format!("max relative L2 deviation from translated Gaussian {worst:.3e} (< 1e-6)")),
        verdict("1b", d_err < 1e-9, format!("displacement against reference values, max error {d_err:.3e}")),
        verdict("7a", norm_err < 1e-9, format!("adiabatic polariton norm drift {norm_err:.3e} (< 1e-9)")),
        verdict("1c", secs < 10.0, format!("runtime {secs:.2} s (< 10 s)")),
    ];
    assert!(ok.iter().all(|b| *b));
}

// Expected to fail: with the reference schedule cos θ(70) ≈ 3.34e-3 and
// cos² θ(70) ≈ 1.12e-5, both above the stated plateau thresholds.
#[test]
fn criterion_1_plateau() {
    let (params, schedule, _) = reference();
    let cos0 = mixing_angle(omega_at(&schedule, &params, 0.0, 0.0).unwrap(), &params).cos();
    let mut amp = 0.0f64;
    let mut rate = 0.0f64;
    for k in 0..=600 {
        let t = 40.0 + 0.1 * k as f64;
        let theta = mixing_angle(omega_at(&schedule, &params, t, 0.0).unwrap(), &params);
        amp = amp.max(theta.cos() / cos0);
        rate = rate.max(theta.cos().powi(2));
    }
    let mean_rate = (D100 - D40) / 60.0;
    let ok = [
        verdict("1d", amp < 1e-3, format!("max plateau E amplitude / initial peak {amp:.3e} (< 1e-3)")),
        verdict(
            "1e",
            rate < 1e-5,
            format!("max plateau displacement rate {rate:.3e} c, mean {mean_rate:.3e} c (< 1e-5 c)"),
        ),
    ];
    assert!(ok.iter().all(|b| *b));
}

/// Stop-and-retrieve run: θ 0.1 → π/2 → 0.1, pulse half-width 10.
/// `z_max` must leave room for light that escapes the medium unstopped.
fn store_run(g: f64, gamma_ab: f64, record_every: usize, z_max: f64) -> (Trajectory, MediumParams) {
    let params = MediumParams::new(g, gamma_ab, 0.0, 1.0, z_max + 60.0).unwrap();
    let n_z = (2.0 * (z_max + 60.0)) as usize + 1;
    let grid = Grid::new(-60.0, z_max, n_z, 0.0, 140.0, 140).unwrap();
    (store_on(params, grid, record_every, Method::Spectral), params)
}

fn store_on(params: MediumParams, grid: Grid, record_every: usize, method: Method) -> Trajectory {
    let schedule = ControlSchedule::stop_and_retrieve(0.1, 0.1, 40.0, 60.0).unwrap();
    let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.5, 0.0, 10.0);
    let sc = Scenario::from_polariton(params, schedule, grid, &psi0, record_every, method).unwrap();
    integrate(&sc).unwrap()
}

fn store_fidelity(traj: &Trajectory) -> (f64, f64) {
    let r = storage_retrieval_fidelity(&traj.snapshots[0].e, &traj.last().e, traj.grid.dz()).unwrap();
    (r.fidelity, r.energy_ratio)
}

#[test]
fn criterion_2_stop_and_retrieve() {
    let clock = Instant::now();
    let params = MediumParams::new(100.0, 1.0, 0.0, 1.0, 220.0).unwrap();
    let grid = Grid::aligned(-60.0, 0.0, 140.0, 1400, 160.0, 1.0).unwrap();
    let (f, e) = store_fidelity(&store_on(params, grid, 1400, Method::GridShift));
    let secs = clock.elapsed().as_secs_f64();
    let fig = adiabaticity_figure(&params, 10.0).unwrap().value;
    let (traj, _) = store_run(100.0, 1.0, 10, 160.0);
    let (fs, es) = store_fidelity(&traj);

    // deep-adiabatic snapshots obey the intensity-ratio identity
    let residual = |traj: &Trajectory, params: &MediumParams| {
        let mut worst = 0.0f64;
        for st in traj.snapshots.iter().skip(1) {
            let w = omega_at(&traj.schedule, params, st.t, 0.0).unwrap();
            match intensity_ratio_residual(st, w, params) {
                Ok(r) => worst = worst.max(r),
                Err(Error::DegenerateControl { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        worst
    };
    let deep = residual(&traj, &params);
    let (weak_traj, weak_params) = store_run(0.1f64.sqrt(), 1.0, 10, 260.0);
    let weak = residual(&weak_traj, &weak_params);
    let weak_fig = adiabaticity_figure(&weak_params, 10.0).unwrap().value;

    let ok = [
        verdict("2a", f > 0.99, format!("figure {fig:.0e}, grid shift: fidelity {f:.9} (> 0.99)")),
        verdict("2b", e > 0.98, format!("energy ratio {e:.6} (> 0.98)")),
        verdict("2c", secs < 120.0, format!("runtime {secs:.2} s (< 120 s)")),
        verdict("2d", fs > 0.99 && es > 0.98, format!("spectral cross-check: fidelity {fs:.9}, energy ratio {es:.6}")),
        verdict("9a", deep < 0.05, format!("deep-adiabatic max intensity-ratio residual {deep:.3e} (< 0.05)")),
        verdict("9b", weak > deep, format!("figure {weak_fig:.2}: residual {weak:.3e} exceeds deep value {deep:.3e}")),
    ];
    assert!(ok.iter().all(|b| *b));
}

#[test]
fn criterion_3_group_velocity() {
    let g = 1.0;
    let params = MediumParams::lossless(g, 200.0).unwrap();
    let schedule = ControlSchedule::constant(g / 3f64.sqrt()).unwrap();
    let grid = Grid::aligned(-40.0, 0.0, 160.0, 1600, 100.0, 1.0).unwrap();
    // half-width 10 spans 100 points
    let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.05, 0.0, 10.0);
    let sc = Scenario::from_polariton(params, schedule, grid, &psi0, 100, Method::GridShift).unwrap();
    let traj = integrate(&sc).unwrap();
    let v = measure_peak_velocity(&traj, (20.0, 160.0)).unwrap();
    let e0 = traj.diagnostics[0].excitation;
    let drift = traj.diagnostics.iter().map(|d| (d.excitation / e0 - 1.0).abs()).fold(0.0, f64::max);
    let ok = [
        verdict("3", ((v / 0.25) - 1.0).abs() < 0.02, format!("peak velocity {v:.6} c (0.25 c ± 2%)")),
        verdict("7b", drift < 1e-6, format!("grid-shift excitation drift, constant control {drift:.3e} (< 1e-6)")),
    ];
    assert!(ok.iter().all(|b| *b));
}

#[test]
fn criterion_4_adiabaticity_scaling() {
    let gs = [10f64.sqrt(), 10.0, 1000f64.sqrt(), 100.0];
    let mut fid = Vec::new();
    for g in gs {
        let (traj, params) = store_run(g, 1.0, 140, 160.0);
        let fig = adiabaticity_figure(&params, 10.0).unwrap().value;
        let (f, _) = store_fidelity(&traj);
        println!("  figure {fig:.0e}: fidelity {f:.12}, deficit {:.3e}", 1.0 - f);
        fid.push(f);
    }
    let monotone = fid.windows(2).all(|w| w[1] > w[0]);
    let d: Vec<f64> = fid.iter().map(|f| 1.0 - f).collect();
    let r1 = d[1] / d[2];
    let r2 = d[2] / d[3];
    let ok = [
        verdict("4a", monotone, "fidelity increases with the adiabaticity figure".into()),
        verdict("4b", r1 >= 5.0 && r2 >= 5.0, format!("deficit ratio per decade {r1:.1}, {r2:.1} (>= 5)")),
    ];
    assert!(ok.iter().all(|b| *b));
}

/// Energy lost by a slow-light pulse of half-width `w` after travelling 20.
fn spreading_deficit(w: f64) -> f64 {
    let g = 10.0;
    let omega = g / 3.0;
    let params = MediumParams::new(g, 1.0, 0.0, 1.0, 100.0).unwrap();
    let schedule = ControlSchedule::constant(omega).unwrap();
    let theta = mixing_angle(omega, &params);
    let v = params.c * theta.cos().powi(2);
    let t_end = 20.0 / v;
    let grid = Grid::new(-60.0, 80.0, 561, 0.0, t_end, 200).unwrap();
    let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.05, 0.0, w);
    // adiabatic p for a rigidly moving pulse: ∂t s = sin θ · v · ψ'
    let ds_dt: Vec<C64> = grid
        .z_points()
        .iter()
        .zip(&psi0.psi)
        .map(|(z, p)| theta.sin() * v * (-2.0 * z / (w * w)) * p)
        .collect();
    let initial = from_polariton_with_rate(&psi0, theta, omega, &ds_dt).unwrap();
    let sc = Scenario::new(params, schedule, grid, initial, 200, Method::Spectral);
    let traj = integrate(&sc).unwrap();
    let r = storage_retrieval_fidelity(&traj.snapshots[0].e, &traj.last().e, grid.dz()).unwrap();
    1.0 - r.energy_ratio
}

#[test]
fn criterion_5_quadratic_law() {
    let long = spreading_deficit(10.0);
    let short = spreading_deficit(5.0);
    let ratio = short / long;
    let pass = (ratio / 4.0 - 1.0).abs() <= 0.2;
    assert!(verdict(
        "5",
        pass,
        format!("energy deficit L_p = 10: {long:.4e}, L_p = 5: {short:.4e}, ratio {ratio:.3} (4 ± 20%)")
    ));
}

#[test]
fn criterion_6_oracle() {
    let clock = Instant::now();
    let thetas = [0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0];
    let idle = ControlSchedule::constant(1.0).unwrap();
    let mut residual = 0.0f64;
    let mut commutator = 0.0f64;
    for n_atoms in 2..=5 {
        let spec = SystemSpec::new(n_atoms, 2, 1.0, idle.clone()).unwrap();
        for theta in thetas {
            commutator = commutator.max((commutator_expectation(&spec, theta, None).unwrap() - 1.0).abs());
            for n in 1..=2 {
                residual = residual.max(dark_residual(&spec, theta, n, matched_omega(&spec, theta)).unwrap());
            }
        }
    }

    let mut slow_min = [f64::INFINITY; 2];
    let mut trip_min = f64::INFINITY;
    let mut fast_gap = f64::INFINITY;
    let mut drift = 0.0f64;
    let cases: Vec<(usize, usize)> = (2..=5).flat_map(|a| [(a, 1), (a, 2)]).collect();
    let runs: Vec<_> = cases
        .par_iter()
        .map(|&(n_atoms, n)| {
            let probe = SystemSpec::new(n_atoms, n, 1.0, idle.clone()).unwrap();
            let gn = probe.collective_coupling();
            let transfer = |ramp: f64| {
                let sched = cosine_ramp(10.0 * gn, ramp, 2.0 * ramp).unwrap();
                let spec = SystemSpec::new(n_atoms, n, 1.0, sched).unwrap();
                let psi0 = dark_state(&spec, spec.theta(spec.omega(0.0).unwrap()), n).unwrap();
                let (_, trace) = evolve_transfer(&spec, &psi0, 2.0 * ramp, 100).unwrap();
                trace
            };
            (n_atoms, n, transfer(200.0 / gn), transfer(0.2 / gn))
        })
        .collect();
    for (n_atoms, n, slow, fast) in &runs {
        drift = slow.iter().chain(fast).map(|p| p.norm_drift).fold(drift, f64::max);
        slow_min[n - 1] = slow_min[n - 1].min(slow[50].fidelity);
        trip_min = trip_min.min(slow[100].fidelity);
        fast_gap = fast_gap.min(slow[50].fidelity - fast[50].fidelity);
        println!(
            "  N = {n_atoms}, n = {n}: mapping {:.9}, round trip {:.9}, fast mapping {:.6}",
            slow[50].fidelity, slow[100].fidelity, fast[50].fidelity
        );
    }
    let secs = clock.elapsed().as_secs_f64();
    let ok = [
        verdict("6a", residual < 1e-12, format!("max dark-state residual {residual:.3e} (< 1e-12)")),
        verdict("6b", commutator < 1e-12, format!("ground-state commutator deviation {commutator:.3e} (< 1e-12)")),
        verdict("6c", slow_min[0] > 0.999, format!("n = 1: min slow-ramp mapping fidelity {:.9} (> 0.999)", slow_min[0])),
        // expected to fail: the two-excitation dark subspace is degenerate at
        // finite N and adiabatic following leaves the normalized Ψ†²|0⟩ branch
        verdict("6c", slow_min[1] > 0.999, format!("n = 2: min slow-ramp mapping fidelity {:.9} (> 0.999)", slow_min[1])),
        verdict("6d", trip_min > 0.998, format!("min round-trip fidelity {trip_min:.9} (> 0.998)")),
        verdict("6e", fast_gap > 0.0, format!("fast ramp lower than slow by at least {fast_gap:.3e}")),
        verdict("7c", drift < 1e-10, format!("oracle norm drift {drift:.3e} (< 1e-10)")),
        verdict("6f", secs < 60.0, format!("runtime {secs:.2} s (< 60 s)")),
    ];
    assert!(ok.iter().all(|b| *b));
}

#[test]
fn criterion_7_lossless_bloch() {
    // reference schedule on an aligned grid: control swings over four decades
    let (params, schedule, _) = reference();
    let grid = Grid::aligned(-60.0, 0.0, 200.0, 2000, 360.0, 1.0).unwrap();
    let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.05, 0.0, 10.0);
    let sc = Scenario::from_polariton(params, schedule, grid, &psi0, 100, Method::GridShift).unwrap();
    let traj = integrate(&sc).unwrap();
    let e0 = traj.diagnostics[0].excitation;
    let grid_drift = traj.diagnostics.iter().map(|d| (d.excitation / e0 - 1.0).abs()).fold(0.0, f64::max);

    let (traj, _) = store_run(10.0, 0.0, 10, 160.0);
    let e0 = traj.diagnostics[0].excitation;
    let spec_drift = traj.diagnostics.iter().map(|d| (d.excitation / e0 - 1.0).abs()).fold(0.0, f64::max);
    let ok = [
        verdict("7d", grid_drift < 1e-6, format!("grid-shift excitation drift, reference schedule {grid_drift:.3e} (< 1e-6)")),
        verdict("7e", spec_drift < 1e-6, format!("spectral excitation drift, stop and retrieve {spec_drift:.3e} (< 1e-6)")),
    ];
    assert!(ok.iter().all(|b| *b));
}

#[test]
fn criterion_8_compression() {
    let g = 1.0;
    let params = MediumParams::lossless(g, 1.0).unwrap();
    // cos² θ = 0.01
    let schedule = ControlSchedule::constant(g / 99f64.sqrt()).unwrap();
    let tau = 10.0;
    let input = TimeSeries::from_fn(0.0, 0.01, 8001, |t| C64::new((-((t - 40.0) / tau).powi(2)).exp(), 0.0));
    let grid = Grid::new(-0.05, 1.0, 1051, 0.0, 1.0, 1).unwrap();
    let psi = inject_boundary(&input, &schedule, &params, &grid).unwrap();

    let second_moment = |x0: f64, dx: f64, v: &[C64]| {
        let w: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
        let m: f64 = w.iter().sum();
        let mean = w.iter().enumerate().map(|(i, a)| (x0 + dx * i as f64) * a).sum::<f64>() / m;
        (w.iter().enumerate().map(|(i, a)| (x0 + dx * i as f64 - mean).powi(2) * a).sum::<f64>() / m).sqrt()
    };
    let len_in = params.c * second_moment(input.t0, input.dt, &input.values);
    let len_out = second_moment(grid.z_min, grid.dz(), &psi.psi);
    let ratio = len_out / len_in;
    let peak_in = input.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let gain = psi.peak() / peak_in;
    let norm_in = params.c * input.energy();
    let norm_out = polariton_norm(&psi, &grid);
    let norm_err = (norm_out / norm_in - 1.0).abs();
    let ok = [
        verdict("8a", (ratio / 0.01 - 1.0).abs() < 0.02, format!("length ratio {ratio:.6} (0.01 ± 2%)")),
        verdict("8b", (gain / 10.0 - 1.0).abs() < 0.01, format!("amplitude factor {gain:.6} (10 ± 1%)")),
        verdict("8c", norm_err < 1e-6, format!("norm mismatch {norm_err:.3e} (< 1e-6)")),
    ];
    assert!(ok.iter().all(|b| *b));
}
