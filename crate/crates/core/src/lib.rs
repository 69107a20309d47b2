//! Pulsed single-photon emission from a two-level emitter coupled to a lossy
//! plasmonic quasinormal mode.
//!
//! Energies and rates are in eV, times in ps. Conversion uses
//! [`units::HBAR_EV_PS`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod correlations;
pub mod dynamics;
pub mod emission;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod ode;
pub mod qnm;
pub mod quadrature;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};
pub use hilbert::{HilbertSpace, OperatorMatrix};
pub use liouvillian::{DensityOperator, PulseSpec, SystemModel};
pub use qnm::{DrudeModel, Emitter, FieldSamples, QnmMode};
pub use scenario::{run_scenario, ScenarioConfig, ScenarioResult};
