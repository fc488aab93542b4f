//! The dark-state polariton map between light and collective Raman coherence.
//!
//! Matter amplitudes are carried scaled by `√N`: `p = √N σ_ba` and
//! `s = √N σ_bc`. With this convention the polariton is
//! `ψ = cos θ · E − sin θ · s`, and only `g√N` enters the dynamics.

use crate::medium::Grid;
use crate::numerics::trapezoid_norm_sqr;
use crate::{Error, Result, C64};

/// Semiclassical envelopes on one grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    /// Probe envelope `E`.
    pub e: Vec<C64>,
    /// Optical coherence `√N σ_ba`.
    pub p: Vec<C64>,
    /// Raman coherence `√N σ_bc`.
    pub s: Vec<C64>,
}

impl FieldState {
    pub fn zeros(t: f64, n: usize) -> Self {
        Self { t, e: vec![C64::default(); n], p: vec![C64::default(); n], s: vec![C64::default(); n] }
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.e.len();
        for found in [self.p.len(), self.s.len()] {
            if found != n {
                return Err(Error::GridMismatch { expected: n, found });
            }
        }
        Ok(())
    }

    /// ∫(|E|² + |p|² + |s|²) dz, conserved by lossless dynamics up to boundary flux.
    pub fn excitation(&self, dz: f64) -> f64 {
        trapezoid_norm_sqr(&self.e, dz) + trapezoid_norm_sqr(&self.p, dz) + trapezoid_norm_sqr(&self.s, dz)
    }
}

/// Polariton amplitude `ψ(z)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonProfile {
    pub t: f64,
    pub psi: Vec<C64>,
}

impl PolaritonProfile {
    pub fn new(t: f64, psi: Vec<C64>) -> Self {
        Self { t, psi }
    }

    /// Samples `f` on the grid's z points.
    pub fn from_fn<F: Fn(f64) -> C64>(grid: &Grid, t: f64, f: F) -> Self {
        Self { t, psi: grid.z_points().into_iter().map(f).collect() }
    }

    /// Real Gaussian `amplitude · exp{−((z − z0)/width)²}`.
    pub fn gaussian(grid: &Grid, t: f64, amplitude: f64, z0: f64, width: f64) -> Self {
        Self::from_fn(grid, t, |z| C64::new(amplitude * (-((z - z0) / width).powi(2)).exp(), 0.0))
    }

    pub fn peak(&self) -> f64 {
        self.psi.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `ψ = cos θ · E − sin θ · s`.
pub fn to_polariton(state: &FieldState, theta: f64) -> Result<PolaritonProfile> {
    state.check_shape()?;
    let (sn, cs) = theta.sin_cos();
    let psi = state.e.iter().zip(&state.s).map(|(e, s)| cs * e - sn * s).collect();
    Ok(PolaritonProfile { t: state.t, psi })
}

/// Adiabatic-branch reconstruction: `E = cos θ · ψ`, `s = −sin θ · ψ`, `p = 0`.
///
/// Setting the optical coherence to zero drops a term first order in the slow
/// time derivative; use [`from_polariton_with_rate`] when `∂s/∂t` is known.
pub fn from_polariton(profile: &PolaritonProfile, theta: f64) -> FieldState {
    let (sn, cs) = theta.sin_cos();
    let n = profile.psi.len();
    FieldState {
        t: profile.t,
        e: profile.psi.iter().map(|v| cs * v).collect(),
        p: vec![C64::default(); n],
        s: profile.psi.iter().map(|v| -sn * v).collect(),
    }
}

/// As [`from_polariton`], with `p = −(i/Ω) ∂s/∂t`.
pub fn from_polariton_with_rate(
    profile: &PolaritonProfile,
    theta: f64,
    omega: f64,
    ds_dt: &[C64],
) -> Result<FieldState> {
    if ds_dt.len() != profile.psi.len() {
        return Err(Error::GridMismatch { expected: profile.psi.len(), found: ds_dt.len() });
    }
    if !(omega > 0.0) {
        return Err(Error::DegenerateControl { omega, floor: 0.0 });
    }
    let mut st = from_polariton(profile, theta);
    let k = -C64::i() / omega;
    st.p = ds_dt.iter().map(|d| k * d).collect();
    Ok(st)
}

/// Trapezoidal `∫|ψ|² dz`.
pub fn polariton_norm(profile: &PolaritonProfile, grid: &Grid) -> f64 {
    trapezoid_norm_sqr(&profile.psi, grid.dz())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn state() -> FieldState {
        FieldState {
            t: 0.5,
            e: vec![c(1.0, 0.5), c(-0.3, 0.0), c(0.0, 2.0)],
            p: vec![c(0.1, 0.0); 3],
            s: vec![c(0.2, -0.1), c(1.0, 1.0), c(-1.0, 0.0)],
        }
    }

    #[test]
    fn photon_and_matter_limits() {
        let st = state();
        assert_eq!(to_polariton(&st, 0.0).unwrap().psi, st.e);
        let m = to_polariton(&st, FRAC_PI_2).unwrap();
        for (a, b) in m.psi.iter().zip(&st.s) {
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn symmetric_point_arithmetic() {
        let st = FieldState { t: 0.0, e: vec![c(1.0, 0.0)], p: vec![c(0.0, 0.0)], s: vec![c(-1.0, 0.0)] };
        let psi = to_polariton(&st, FRAC_PI_4).unwrap().psi[0];
        assert!((psi - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let mut st = state();
        st.s.pop();
        assert!(matches!(to_polariton(&st, 0.3), Err(Error::GridMismatch { expected: 3, found: 2 })));
    }

    #[test]
    fn reconstruction_limits() {
        let prof = PolaritonProfile::new(0.0, vec![c(1.0, 0.0), c(0.5, -0.5)]);
        let a = from_polariton(&prof, 0.0);
        assert_eq!(a.e, prof.psi);
        assert!(a.s.iter().all(|v| v.norm() == 0.0));
        let b = from_polariton(&prof, FRAC_PI_2);
        assert!(b.e.iter().all(|v| v.norm() < 1e-16));
        assert!(b.s.iter().zip(&prof.psi).all(|(s, p)| (s + p).norm() < 1e-15));
        assert!(b.p.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn rate_reconstruction() {
        let prof = PolaritonProfile::new(0.0, vec![c(1.0, 0.0)]);
        let st = from_polariton_with_rate(&prof, 0.3, 2.0, &[c(4.0, 0.0)]).unwrap();
        assert!((st.p[0] - c(0.0, -2.0)).norm() < 1e-15);
        assert!(from_polariton_with_rate(&prof, 0.3, 0.0, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn gaussian_norm() {
        let grid = Grid::new(-60.0, 60.0, 2401, 0.0, 1.0, 1).unwrap();
        let zero = PolaritonProfile::from_fn(&grid, 0.0, |_| C64::default());
        assert_eq!(polariton_norm(&zero, &grid), 0.0);
        let g = PolaritonProfile::gaussian(&grid, 0.0, 1.0, 0.0, 10.0);
        // ∫ exp(−2z²/100) dz = √(50π)
        assert!((polariton_norm(&g, &grid) - (50.0 * PI).sqrt()).abs() < 1e-10);
        let g2 = PolaritonProfile::gaussian(&grid, 0.0, 2.0, 0.0, 10.0);
        assert!((polariton_norm(&g2, &grid) / polariton_norm(&g, &grid) - 4.0).abs() < 1e-13);
    }

    fn amp() -> impl Strategy<Value = C64> {
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn adiabatic_branch_splits_energy(theta in 0.0f64..FRAC_PI_2, psi in prop::collection::vec(amp(), 1..20)) {
            let prof = PolaritonProfile::new(0.0, psi);
            let st = from_polariton(&prof, theta);
            for ((e, s), p) in st.e.iter().zip(&st.s).zip(&prof.psi) {
                prop_assert!((e.norm_sqr() + s.norm_sqr() - p.norm_sqr()).abs() < 1e-12);
            }
            let back = to_polariton(&st, theta).unwrap();
            for (a, b) in back.psi.iter().zip(&prof.psi) {
                prop_assert!((a - b).norm() < 1e-13);
            }
        }

        #[test]
        fn to_polariton_is_linear(theta in 0.0f64..FRAC_PI_2, k in -3.0f64..3.0,
                                  a in prop::collection::vec((amp(), amp()), 4), b in prop::collection::vec((amp(), amp()), 4)) {
            let mk = |v: &Vec<(C64, C64)>| FieldState {
                t: 0.0,
                e: v.iter().map(|x| x.0).collect(),
                p: vec![C64::default(); v.len()],
                s: v.iter().map(|x| x.1).collect(),
            };
            let (sa, sb) = (mk(&a), mk(&b));
            let sum = FieldState {
                t: 0.0,
                e: sa.e.iter().zip(&sb.e).map(|(x, y)| x + k * y).collect(),
                p: sa.p.clone(),
                s: sa.s.iter().zip(&sb.s).map(|(x, y)| x + k * y).collect(),
            };
            let (pa, pb, ps) = (to_polariton(&sa, theta).unwrap(), to_polariton(&sb, theta).unwrap(), to_polariton(&sum, theta).unwrap());
            for i in 0..4 {
                prop_assert!((ps.psi[i] - pa.psi[i] - k * pb.psi[i]).norm() < 1e-12);
            }
        }

        #[test]
        fn adiabatic_relation_amplifies_by_secant(theta in 0.0f64..1.5, e in prop::collection::vec(amp(), 1..10)) {
            let st = FieldState {
                t: 0.0,
                p: vec![C64::default(); e.len()],
                s: e.iter().map(|v| -theta.tan() * v).collect(),
                e,
            };
            let prof = to_polariton(&st, theta).unwrap();
            for (p, e) in prof.psi.iter().zip(&st.e) {
                prop_assert!((p.norm() - e.norm() / theta.cos()).abs() < 1e-10 * (1.0 + e.norm() / theta.cos()));
            }
        }
    }
}
