//! Command-line driver: devices → tomography → optimizers, with every result
//! written to disk in natural units.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod setup;
pub mod suite;
pub mod sweep;

pub use config::{DeviceSpec, RunConfig};
pub use error::{CliError, Result};
