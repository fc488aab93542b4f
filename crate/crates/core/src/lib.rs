//! Dark-state polariton propagation in resonant Λ-type EIT media.
//!
//! The crate is organised around the quantities a slow-light experiment
//! manipulates:
//!
//! - [`medium`]: physical parameters, control-field schedules and space–time grids.
//! - [`polariton`]: the canonical map between (probe field, Raman coherence) and
//!   the dark-state polariton amplitude.
//! - [`adiabatic`]: shape-preserving polariton transport, its retarded-control
//!   generalisation and boundary injection with group-velocity compression.
//! - [`bloch`]: the linearized Maxwell–Bloch integrator used as ground truth.
//! - [`validity`]: non-adiabatic corrections and the bounds that follow from them.
//! - [`oracle`]: exact pure-state evolution of N three-level atoms and one photon
//!   mode, used to check dark states, commutators and light–matter state mapping.
//!
//! Units are dimensionless with `c = 1` unless configured otherwise. The
//! collective coupling `g√N` is the only place the atom number enters the
//! continuum modules; matter amplitudes are carried pre-multiplied by `√N`.

pub mod adiabatic;
pub mod bloch;
pub mod error;
pub mod medium;
pub mod numerics;
pub mod oracle;
pub mod polariton;
pub mod validity;

pub use error::{Error, Result};
pub use medium::{ControlSchedule, Grid, MediumParams, Shape};
pub use polariton::{FieldState, PolaritonProfile};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
