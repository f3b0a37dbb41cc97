//! Steady-state single-photon transport through a chain of two-level
//! emitters side-coupled to two waveguides (a four-port "ladder" router).
//!
//! The crate is `no_std` + `alloc` when built with `default-features = false`.
//! The default `std` and `parallel` features enable host floating-point
//! routines and rayon-backed batch evaluation.
//!
//! Units: every rate and detuning is expressed in units of the free-space
//! decay rate Γ0; lengths are in nanometres.
//!
//! Module map:
//!
//! - [`params`]: physical configuration and validation.
//! - [`ddi`]: dipole-dipole coupling law and the all-to-all coupling matrix.
//! - [`linalg`]: dense complex LU with partial pivoting.
//! - [`scattering`]: the 5N-unknown steady-state linear system and its solve.
//! - [`analytic`]: closed-form one- and two-emitter amplitudes.
//! - [`spectra`]: detuning scans, peak extraction, separation and
//!   emitter-number sweeps.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod ddi;
pub mod linalg;
pub mod params;
pub mod scattering;
pub mod spectra;

mod math;
mod model;

pub use analytic::FourPortAmplitudes;
pub use ddi::{ddi_coupling, ddi_matrix, DdiError, DdiMatrix};
pub use model::{Ladder, ModelError};
pub use num_complex::Complex64;
pub use params::{
    derive_phases, validate, ConfigError, ConfigErrors, DdiMode, EmitterOverride, EmitterRates,
    Phases, SystemConfig, ValidatedConfig,
};
pub use scattering::{
    assemble_system, solve_batch, solve_transport, Intensities, LinearSystem, SolveError,
    TransportSolution,
};
pub use spectra::{
    find_peaks, refine_peak, scale_emitters, scan, sweep_separation, Channel, Peak, ScalingRecord,
    ScalingReport, SeparationSweep, SpectraError, SpectrumResult, UniformGrid,
};
