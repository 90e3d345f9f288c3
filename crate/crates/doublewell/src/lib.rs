//! Driven double-well in a photon bath: instantaneous eigenbasis on a grid,
//! blackbody rates, a step-split propagator and the time-averaged work.
//!
//! Units: energies in k_BT, times in βħ, lengths in λ_th (so m = 2π, ħ = 1).

pub mod config;
pub mod device;
pub mod error;
pub mod gates;
pub mod output;
pub mod potential;
pub mod protocol;
pub mod rates;
pub mod spectrum;
pub mod stepper;
pub mod tridiag;

pub use config::{DoubleWellConfig, Grid, PhysicalUnits};
pub use device::DoubleWellDevice;
pub use error::{DwError, Result};
pub use protocol::{RunOutput, SpectrumSequence};
pub use stepper::WorkEstimator;
