use darkpol::adiabatic::transport;
use darkpol::bloch::{integrate, storage_retrieval_fidelity, Method, Scenario};
use darkpol::medium::{mixing_angle, omega_at};
use darkpol::polariton::from_polariton;
use darkpol::{ControlSchedule, Grid, MediumParams, PolaritonProfile, C64};
use proptest::prelude::*;

fn final_probe(n_t: usize) -> (Vec<C64>, Grid) {
    let params = MediumParams::lossless(1.0, 60.0).unwrap();
    let schedule = ControlSchedule::tanh_pair(2.0, 0.3, 6.0, 1e3).unwrap();
    let grid = Grid::aligned(-30.0, 0.0, 20.0, n_t, 30.0, 1.0).unwrap();
    let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.05, -5.0, 5.0);
    let sc = Scenario::from_polariton(params, schedule, grid, &psi0, n_t, Method::GridShift).unwrap();
    (integrate(&sc).unwrap().last().e.clone(), grid)
}

#[test]
fn grid_shift_is_second_order() {
    let (a, ga) = final_probe(200);
    let (b, gb) = final_probe(400);
    let (c, _) = final_probe(800);
    // discrete L2 on the coarser grid of each pair
    let err = |coarse: &[C64], fine: &[C64], dz: f64| {
        (coarse.iter().enumerate().map(|(i, v)| (v - fine[2 * i]).norm_sqr()).sum::<f64>() * dz).sqrt()
    };
    let e1 = err(&a, &b, ga.dz());
    let e2 = err(&b, &c, gb.dz());
    let order = (e1 / e2).log2();
    assert!(order >= 2.0 - 0.05, "observed order {order}");
}

#[test]
fn converges_to_adiabatic_transport() {
    let mut deficits = Vec::new();
    for g in [10f64.sqrt(), 10.0, 1000f64.sqrt()] {
        let params = MediumParams::new(g, 1.0, 0.0, 1.0, 220.0).unwrap();
        let schedule = ControlSchedule::stop_and_retrieve(0.1, 0.1, 40.0, 60.0).unwrap();
        let grid = Grid::new(-60.0, 160.0, 441, 0.0, 140.0, 140).unwrap();
        let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.5, 0.0, 10.0);
        let sc = Scenario::from_polariton(params, schedule.clone(), grid, &psi0, 140, Method::Spectral).unwrap();
        let traj = integrate(&sc).unwrap();
        let moved = transport(&psi0, &grid, &schedule, &params, 140.0).unwrap();
        let theta = mixing_angle(omega_at(&schedule, &params, 140.0, 0.0).unwrap(), &params);
        let expected = from_polariton(&moved, theta);
        let r = storage_retrieval_fidelity(&expected.e, &traj.last().e, grid.dz()).unwrap();
        deficits.push(1.0 - r.fidelity);
    }
    assert!(deficits.windows(2).all(|w| w[1] < w[0]), "{deficits:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lossless_excitation_is_conserved(
        g in 0.5f64..3.0,
        omega in 0.2f64..3.0,
        width in 3.0f64..8.0,
    ) {
        let params = MediumParams::lossless(g, 60.0).unwrap();
        let schedule = ControlSchedule::constant(omega).unwrap();
        let grid = Grid::aligned(-30.0, 0.0, 20.0, 200, 30.0, 1.0).unwrap();
        let psi0 = PolaritonProfile::gaussian(&grid, 0.0, 0.01, -5.0, width);
        let sc = Scenario::from_polariton(params, schedule, grid, &psi0, 20, Method::GridShift).unwrap();
        let traj = integrate(&sc).unwrap();
        let e0 = traj.diagnostics[0].excitation;
        for d in &traj.diagnostics {
            prop_assert!((d.excitation / e0 - 1.0).abs() < 1e-6);
        }
    }
}
