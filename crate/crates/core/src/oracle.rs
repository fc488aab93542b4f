//! Exact few-atom check of the dark-state algebra.
//!
//! `N` three-level atoms share one resonant probe mode truncated at `n_max`
//! photons. With `ħ = 1`,
//!
//! ```text
//! V = −Σ_j (g a σ_ab^j + Ω σ_ac^j) + h.c.
//! ```
//!
//! Basis index = `config · (n_max + 1) + photons`, where `config` reads the
//! atom levels as base-3 digits with atom 0 most significant and digit values
//! `b = 0`, `c = 1`, `a = 2`. Operators are stored in compressed sparse rows.

use std::cell::RefCell;

use crate::medium::{mixing_angle, ControlSchedule, MediumParams};
use crate::numerics::ode::{dopri5, Tolerances};
use crate::{Error, Result, C64};

pub const MAX_ATOMS: usize = 8;
pub const MAX_PHOTONS: usize = 4;
/// Norm drift at which [`evolve_transfer`] gives up.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    B = 0,
    C = 1,
    A = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub n_atoms: usize,
    pub n_max: usize,
    /// Single-atom coupling.
    pub g: f64,
    /// `Ω(t)`; tanh-pair amplitudes are in units of `g√N`.
    pub schedule: ControlSchedule,
}

impl SystemSpec {
    pub fn new(n_atoms: usize, n_max: usize, g: f64, schedule: ControlSchedule) -> Result<Self> {
        let s = Self { n_atoms, n_max, g, schedule };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 || self.n_atoms > MAX_ATOMS || self.n_max > MAX_PHOTONS {
            let dim = 3usize.saturating_pow(self.n_atoms as u32).saturating_mul(self.n_max + 1);
            return Err(Error::DimensionOverflow {
                dim,
                reason: format!("need 1 ≤ N ≤ {MAX_ATOMS} and n_max ≤ {MAX_PHOTONS}"),
            });
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::param("g", "must be positive"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.n_atoms as u32) * (self.n_max + 1)
    }

    /// `g√N`
    pub fn collective_coupling(&self) -> f64 {
        self.g * (self.n_atoms as f64).sqrt()
    }

    fn medium(&self) -> MediumParams {
        MediumParams { g_root_n: self.collective_coupling(), gamma_ab: 0.0, gamma_bc: 0.0, c: 1.0, length: 1.0 }
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        self.schedule.omega_local(&self.medium(), t)
    }

    /// Mixing angle matching `omega` for this ensemble.
    pub fn theta(&self, omega: f64) -> f64 {
        mixing_angle(omega, &self.medium())
    }

    pub fn index(&self, levels: &[Level], photons: usize) -> usize {
        let config = levels.iter().fold(0, |acc, l| acc * 3 + *l as usize);
        config * (self.n_max + 1) + photons
    }

    /// Inverse of [`SystemSpec::index`].
    pub fn decode(&self, index: usize) -> (Vec<Level>, usize) {
        let photons = index % (self.n_max + 1);
        let mut config = index / (self.n_max + 1);
        let mut levels = vec![Level::B; self.n_atoms];
        for slot in levels.iter_mut().rev() {
            *slot = match config % 3 {
                0 => Level::B,
                1 => Level::C,
                _ => Level::A,
            };
            config /= 3;
        }
        (levels, photons)
    }

    /// Photons plus atoms outside `|b⟩`.
    pub fn excitation_number(&self, index: usize) -> usize {
        let (levels, n) = self.decode(index);
        n + levels.iter().filter(|l| **l != Level::B).count()
    }
}

/// State vector over the product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegister {
    pub amplitudes: Vec<C64>,
}

impl QuantumRegister {
    pub fn basis(spec: &SystemSpec, levels: &[Level], photons: usize) -> Result<Self> {
        if levels.len() != spec.n_atoms || photons > spec.n_max {
            return Err(Error::param("levels", "configuration does not fit the system"));
        }
        let mut amplitudes = vec![C64::default(); spec.dim()];
        amplitudes[spec.index(levels, photons)] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn ground(spec: &SystemSpec) -> Self {
        Self::basis(spec, &vec![Level::B; spec.n_atoms], 0).expect("ground state always fits")
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::Numerical("cannot normalize a null state".into()));
        }
        for a in self.amplitudes.iter_mut() {
            *a /= n;
        }
        Ok(self)
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.sort_by_key(|e| (e.0, e.1));
        let mut row_start = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_start[r + 1] += 1;
            cols.push(c);
            values.push(v);
        }
        for r in 0..dim {
            row_start[r + 1] += row_start[r];
        }
        Self { dim, row_start, cols, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| (self.row_start[r]..self.row_start[r + 1]).map(move |k| (r, self.cols[k], self.values[k])))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_start[r]..self.row_start[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => C64::default(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| (self.row_start[r]..self.row_start[r + 1]).map(|k| self.values[k] * x[self.cols[k]]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    /// Largest entry of `A − A†`.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.adjoint();
        let a = self.entries().map(|(r, c, v)| (v - adj.get(r, c)).norm());
        let b = adj.entries().map(|(r, c, v)| (v - self.get(r, c)).norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Largest entry of `[A, D]` for diagonal `D`: `A_rc (d_c − d_r)`.
    pub fn diagonal_commutator_residual(&self, diag: &[f64]) -> f64 {
        self.entries().map(|(r, c, v)| (v * (diag[c] - diag[r])).norm()).fold(0.0, f64::max)
    }
}

/// Interaction Hamiltonian at control strength `omega`.
pub fn build_interaction(spec: &SystemSpec, omega: f64) -> Result<SparseOperator> {
    spec.validate()?;
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::param("omega", "must be finite and non-negative"));
    }
    Ok(interaction_terms(spec, spec.g, omega))
}

/// Probe-coupling part of `V` (`Ω = 0`).
pub fn coupling_operator(spec: &SystemSpec) -> SparseOperator {
    interaction_terms(spec, spec.g, 0.0)
}

/// Control part of `V` at unit `Ω`; also the limit `V/Ω` for `Ω → ∞`.
pub fn control_operator(spec: &SystemSpec) -> SparseOperator {
    interaction_terms(spec, 0.0, 1.0)
}

fn interaction_terms(spec: &SystemSpec, g: f64, omega: f64) -> SparseOperator {
    let dim = spec.dim();
    let mut entries = Vec::new();
    let push_pair = |entries: &mut Vec<(usize, usize, C64)>, to: usize, from: usize, v: f64| {
        // ⟨to|V|from⟩ = −v and its conjugate
        entries.push((to, from, C64::new(-v, 0.0)));
        entries.push((from, to, C64::new(-v, 0.0)));
    };
    for idx in 0..dim {
        let (levels, n) = spec.decode(idx);
        for j in 0..spec.n_atoms {
            let mut up = levels.clone();
            up[j] = Level::A;
            match levels[j] {
                // a σ_ab^j: |b, n⟩ → √n |a, n−1⟩
                Level::B if n > 0 && g != 0.0 => push_pair(&mut entries, spec.index(&up, n - 1), idx, g * (n as f64).sqrt()),
                // σ_ac^j: |c⟩ → |a⟩
                Level::C if omega != 0.0 => push_pair(&mut entries, spec.index(&up, n), idx, omega),
                _ => {}
            }
        }
    }
    SparseOperator::from_triplets(dim, entries)
}

/// Diagonal of the excitation-number operator.
pub fn excitation_operator(spec: &SystemSpec) -> Vec<f64> {
    (0..spec.dim()).map(|i| spec.excitation_number(i) as f64).collect()
}

/// `Ψ₀† = cos θ a† − (sin θ/√N) Σ_j σ_cb^j` applied to `x`; photons beyond
/// `n_max` are dropped.
pub fn apply_polariton_creation(spec: &SystemSpec, theta: f64, x: &[C64]) -> Vec<C64> {
    let (s, c) = theta.sin_cos();
    let k = s / (spec.n_atoms as f64).sqrt();
    let mut out = vec![C64::default(); x.len()];
    for (idx, amp) in x.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (levels, n) = spec.decode(idx);
        if n < spec.n_max {
            out[idx + 1] += c * ((n + 1) as f64).sqrt() * amp;
        }
        for j in 0..spec.n_atoms {
            if levels[j] == Level::B {
                let mut l = levels.clone();
                l[j] = Level::C;
                out[spec.index(&l, n)] -= k * amp;
            }
        }
    }
    out
}

/// Adjoint of [`apply_polariton_creation`].
pub fn apply_polariton_annihilation(spec: &SystemSpec, theta: f64, x: &[C64]) -> Vec<C64> {
    let (s, c) = theta.sin_cos();
    let k = s / (spec.n_atoms as f64).sqrt();
    let mut out = vec![C64::default(); x.len()];
    for (idx, amp) in x.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (levels, n) = spec.decode(idx);
        if n > 0 {
            out[idx - 1] += c * (n as f64).sqrt() * amp;
        }
        for j in 0..spec.n_atoms {
            if levels[j] == Level::C {
                let mut l = levels.clone();
                l[j] = Level::B;
                out[spec.index(&l, n)] -= k * amp;
            }
        }
    }
    out
}

/// `(Ψ₀†)ⁿ |0⟩|b…b⟩`, normalized.
///
/// For `n ≥ 2` the `1/√n!` prefactor normalizes only as `N → ∞`; at finite `N`
/// the state is rescaled explicitly.
pub fn dark_state(spec: &SystemSpec, theta: f64, n: usize) -> Result<QuantumRegister> {
    spec.validate()?;
    if n > spec.n_max || n > spec.n_atoms {
        return Err(Error::param("n", format!("{n} excitations exceed n_max = {} or N = {}", spec.n_max, spec.n_atoms)));
    }
    let mut v = QuantumRegister::ground(spec).amplitudes;
    for _ in 0..n {
        v = apply_polariton_creation(spec, theta, &v);
    }
    QuantumRegister { amplitudes: v }.normalized()
}

/// `‖V(Ω) |D_n(θ)⟩‖`. `Ω = ∞` (the match for `θ = 0`) uses the limit `V/Ω`.
pub fn dark_residual(spec: &SystemSpec, theta: f64, n: usize, omega: f64) -> Result<f64> {
    let d = dark_state(spec, theta, n)?;
    let v = if omega == f64::INFINITY { control_operator(spec) } else { build_interaction(spec, omega)? };
    Ok(norm(&v.apply(&d.amplitudes)))
}

/// Control strength whose mixing angle is `theta`: `g√N cot θ`, infinite at 0.
pub fn matched_omega(spec: &SystemSpec, theta: f64) -> f64 {
    if theta == 0.0 {
        f64::INFINITY
    } else {
        (spec.collective_coupling() / theta.tan()).max(0.0)
    }
}

/// `⟨ψ|[Ψ₀, Ψ₀†]|ψ⟩ = ‖Ψ₀†ψ‖² − ‖Ψ₀ψ‖²`, in the ground state by default.
///
/// Exact only for states without amplitude at `n_max` photons.
pub fn commutator_expectation(spec: &SystemSpec, theta: f64, state: Option<&QuantumRegister>) -> Result<f64> {
    spec.validate()?;
    let ground = QuantumRegister::ground(spec);
    let psi = state.unwrap_or(&ground);
    if psi.amplitudes.len() != spec.dim() {
        return Err(Error::GridMismatch { expected: spec.dim(), found: psi.amplitudes.len() });
    }
    let up = apply_polariton_creation(spec, theta, &psi.amplitudes);
    let down = apply_polariton_annihilation(spec, theta, &psi.amplitudes);
    Ok(norm(&up).powi(2) - norm(&down).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPoint {
    pub t: f64,
    pub omega: f64,
    pub theta: f64,
    /// `|⟨target(t)|ψ(t)⟩|²` with the target mapped along the dark states.
    pub fidelity: f64,
    pub norm_drift: f64,
    pub excitation: f64,
}

/// Integrates `i ψ' = V(t) ψ` over `[0, t_final]`, reporting at `steps + 1`
/// equally spaced times.
///
/// The target decomposes `psi0` on the dark states at `θ(0)`,
/// `ξ_n = ⟨D_n(θ(0))|ψ₀⟩`, and follows `Σ_n ξ_n |D_n(θ(t))⟩`. Dark states have
/// zero energy and real amplitudes, so no phase accrues along the way.
pub fn evolve_transfer(
    spec: &SystemSpec,
    psi0: &QuantumRegister,
    t_final: f64,
    steps: usize,
) -> Result<(QuantumRegister, Vec<TransferPoint>)> {
    spec.validate()?;
    if psi0.amplitudes.len() != spec.dim() {
        return Err(Error::GridMismatch { expected: spec.dim(), found: psi0.amplitudes.len() });
    }
    if (psi0.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::param("psi0", format!("norm {} differs from 1", psi0.norm())));
    }
    if !(t_final > 0.0) || steps == 0 {
        return Err(Error::param("t_final", "need t_final > 0 and at least one step"));
    }
    let n_top = spec.n_max.min(spec.n_atoms);
    let theta0 = spec.theta(spec.omega(0.0)?);
    let xi: Vec<C64> = (0..=n_top)
        .map(|n| Ok(dark_state(spec, theta0, n)?.overlap(psi0)))
        .collect::<Result<_>>()?;
    let excitation_diag = excitation_operator(spec);
    let coupling = coupling_operator(spec);
    let control = control_operator(spec);

    let point = |t: f64, psi: &QuantumRegister| -> Result<TransferPoint> {
        let omega = spec.omega(t)?;
        let theta = spec.theta(omega);
        let mut target = vec![C64::default(); spec.dim()];
        for (n, x) in xi.iter().enumerate() {
            if x.norm() == 0.0 {
                continue;
            }
            for (a, d) in target.iter_mut().zip(dark_state(spec, theta, n)?.amplitudes) {
                *a += x * d;
            }
        }
        let target = QuantumRegister { amplitudes: target };
        let fidelity = target.overlap(psi).norm_sqr();
        let excitation = psi.amplitudes.iter().zip(&excitation_diag).map(|(a, d)| a.norm_sqr() * d).sum();
        Ok(TransferPoint { t, omega, theta, fidelity, norm_drift: (psi.norm() - 1.0).abs(), excitation })
    };

    let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Tolerances::default() };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let rhs = |t: f64, y: &Vec<C64>| -> Vec<C64> {
        let omega = spec.omega(t).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        });
        let mut out = coupling.apply(y);
        for (o, c) in out.iter_mut().zip(control.apply(y)) {
            // ψ' = −i V ψ
            *o = -C64::i() * (*o + omega * c);
        }
        out
    };

    let mut psi = psi0.clone();
    let mut trace = vec![point(0.0, &psi)?];
    let dt = t_final / steps as f64;
    let mut h = 0.0;
    for k in 0..steps {
        let (t0, t1) = (k as f64 * dt, (k + 1) as f64 * dt);
        let (y, stats) = dopri5(rhs, t0, psi.amplitudes, t1, h, &tol)?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        h = stats.last_step;
        psi = QuantumRegister { amplitudes: y };
        let p = point(t1, &psi)?;
        if p.norm_drift > NORM_DRIFT_LIMIT {
            return Err(Error::Numerical(format!("norm drift {:.3e} at t = {t1}", p.norm_drift)));
        }
        trace.push(p);
    }
    Ok((psi, trace))
}

/// `Ω₀ cos²(π t / 2T)` sampled densely on `[0, span]`: falls to zero at `T`
/// and, for `span = 2T`, rises back.
pub fn cosine_ramp(omega0: f64, ramp: f64, span: f64) -> Result<ControlSchedule> {
    if !(ramp > 0.0 && span > 0.0) {
        return Err(Error::param("ramp", "ramp and span must be positive"));
    }
    ControlSchedule::sampled_from_fn(
        |t| omega0 * (std::f64::consts::FRAC_PI_2 * t / ramp).cos().powi(2),
        0.0,
        span,
        4001,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn spec(n: usize, n_max: usize) -> SystemSpec {
        SystemSpec::new(n, n_max, 1.0, ControlSchedule::constant(1.0).unwrap()).unwrap()
    }

    #[test]
    fn bounds_enforced() {
        let s = ControlSchedule::constant(1.0).unwrap();
        assert!(matches!(SystemSpec::new(9, 1, 1.0, s.clone()), Err(Error::DimensionOverflow { .. })));
        assert!(matches!(SystemSpec::new(0, 1, 1.0, s.clone()), Err(Error::DimensionOverflow { .. })));
        assert!(matches!(SystemSpec::new(2, 5, 1.0, s), Err(Error::DimensionOverflow { .. })));
        assert_eq!(spec(8, 4).dim(), 6561 * 5);
    }

    #[test]
    fn index_round_trip() {
        let s = spec(4, 2);
        for i in 0..s.dim() {
            let (l, n) = s.decode(i);
            assert_eq!(s.index(&l, n), i);
        }
        assert_eq!(s.index(&[Level::C, Level::B, Level::B, Level::B], 0), 27 * 3);
    }

    #[test]
    fn jaynes_cummings_pair() {
        let s = spec(1, 1);
        let v = build_interaction(&s, 0.0).unwrap();
        let nz: Vec<_> = v.entries().filter(|e| e.2.norm() > 0.0).collect();
        let b1 = s.index(&[Level::B], 1);
        let a0 = s.index(&[Level::A], 0);
        assert_eq!(nz.len(), 2);
        for (r, c, val) in nz {
            assert!((r, c) == (b1, a0) || (r, c) == (a0, b1));
            assert!((val.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hermitian_and_number_conserving() {
        let s = spec(4, 2);
        let v = build_interaction(&s, 1.7).unwrap();
        assert!(v.hermiticity_residual() < 1e-14);
        assert!(v.diagonal_commutator_residual(&excitation_operator(&s)) < 1e-13);
    }

    #[test]
    fn dark_state_examples() {
        let s = spec(3, 2);
        let d0 = dark_state(&s, 0.7, 0).unwrap();
        assert_eq!(d0, QuantumRegister::ground(&s));
        let photon = dark_state(&s, 0.0, 1).unwrap();
        assert_eq!(photon, QuantumRegister::basis(&s, &[Level::B; 3], 1).unwrap());
        let spin = dark_state(&s, FRAC_PI_2, 1).unwrap();
        let k = -1.0 / 3f64.sqrt();
        for j in 0..3 {
            let mut l = [Level::B; 3];
            l[j] = Level::C;
            let a = spin.amplitudes[s.index(&l, 0)];
            assert!((a.re - k).abs() < 1e-15 && a.im == 0.0);
        }
        assert!((spin.norm() - 1.0).abs() < 1e-15);
        assert!(dark_state(&s, 0.3, 3).is_err());
        assert!(dark_state(&spec(1, 2), 0.3, 2).is_err());
    }

    #[test]
    fn dark_states_have_no_excited_amplitude() {
        let s = spec(4, 2);
        for n in 0..=2 {
            let d = dark_state(&s, 0.9, n).unwrap();
            for (i, a) in d.amplitudes.iter().enumerate() {
                if s.decode(i).0.contains(&Level::A) {
                    assert_eq!(*a, C64::default());
                }
            }
        }
    }

    #[test]
    fn residuals() {
        for n_atoms in 2..=5 {
            let s = spec(n_atoms, 2);
            for n in 0..=2 {
                for theta in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2] {
                    let omega = matched_omega(&s, theta);
                    assert!(dark_residual(&s, theta, n, omega).unwrap() < 1e-12, "{n_atoms} {n} {theta}");
                }
            }
        }
        let s = spec(3, 1);
        assert!(dark_residual(&s, FRAC_PI_4, 1, 0.0).unwrap() > 0.1);
        assert!(dark_residual(&s, FRAC_PI_4, 1, f64::INFINITY).unwrap() > 0.1);
        assert!(build_interaction(&s, f64::INFINITY).is_err());
        assert_eq!(dark_residual(&s, 0.4, 0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn commutator_values() {
        for n_atoms in 1..=4 {
            let s = spec(n_atoms, 1);
            for theta in [0.0, 0.3, FRAC_PI_4, FRAC_PI_2] {
                assert!((commutator_expectation(&s, theta, None).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        let s = spec(2, 1);
        let one_c = QuantumRegister::basis(&s, &[Level::C, Level::B], 0).unwrap();
        assert!(commutator_expectation(&s, FRAC_PI_2, Some(&one_c)).unwrap().abs() < 1e-12);
        assert!((commutator_expectation(&s, 0.0, Some(&one_c)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_transfer_is_trivial() {
        let g = 1.0;
        let n = 2;
        let ramp = cosine_ramp(10.0 * g * (n as f64).sqrt(), 5.0, 5.0).unwrap();
        let s = SystemSpec::new(n, 1, g, ramp).unwrap();
        let (out, trace) = evolve_transfer(&s, &QuantumRegister::ground(&s), 5.0, 5).unwrap();
        assert_eq!(out, QuantumRegister::ground(&s));
        assert!(trace.iter().all(|p| (p.fidelity - 1.0).abs() < 1e-14));
    }

    #[test]
    fn slow_transfer_maps_photon_to_spin_wave() {
        let (n_atoms, g) = (4, 1.0);
        let gn = g * (n_atoms as f64).sqrt();
        let t = 200.0 / gn;
        let s = SystemSpec::new(n_atoms, 1, g, cosine_ramp(10.0 * gn, t, t).unwrap()).unwrap();
        let psi0 = dark_state(&s, s.theta(s.omega(0.0).unwrap()), 1).unwrap();
        let (out, trace) = evolve_transfer(&s, &psi0, t, 50).unwrap();
        let spin = dark_state(&s, FRAC_PI_2, 1).unwrap();
        assert!(spin.overlap(&out).norm_sqr() > 0.999);
        let x0 = trace[0].excitation;
        for p in &trace {
            assert!(p.norm_drift < 1e-10, "{}", p.norm_drift);
            assert!((p.excitation - x0).abs() < 1e-10);
        }

        let fast_t = 0.2 / gn;
        let fast = SystemSpec::new(n_atoms, 1, g, cosine_ramp(10.0 * gn, fast_t, fast_t).unwrap()).unwrap();
        let (fo, _) = evolve_transfer(&fast, &psi0, fast_t, 10).unwrap();
        assert!(spin.overlap(&fo).norm_sqr() < spin.overlap(&out).norm_sqr() - 0.1);
    }

    #[test]
    fn round_trip_returns_the_photon() {
        let (n_atoms, g) = (3, 1.0);
        let gn = g * (n_atoms as f64).sqrt();
        let t = 200.0 / gn;
        let s = SystemSpec::new(n_atoms, 1, g, cosine_ramp(10.0 * gn, t, 2.0 * t).unwrap()).unwrap();
        let psi0 = dark_state(&s, s.theta(s.omega(0.0).unwrap()), 1).unwrap();
        let (out, trace) = evolve_transfer(&s, &psi0, 2.0 * t, 40).unwrap();
        assert!(psi0.overlap(&out).norm_sqr() > 0.998);
        assert!(trace.last().unwrap().fidelity > 0.998);
    }
}
