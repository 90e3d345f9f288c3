//! Run configuration. Every field has a default, so `{}` is a valid file and
//! command-line flags override whatever the file sets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thermops_core::tomography::Label;
use thermops_core::type2::{FwOptions, StepRule};
use thermops_doublewell::{DoubleWellConfig, WorkEstimator};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum DeviceSpec {
    QubitReset {
        #[serde(default = "defaults::tau")]
        tau: f64,
        #[serde(default = "defaults::coupling")]
        coupling: f64,
        #[serde(default = "defaults::steps")]
        steps: usize,
        #[serde(default = "defaults::records")]
        records: usize,
    },
    Doublewell {
        #[serde(default)]
        config: DoubleWellConfig,
        #[serde(default)]
        estimator: WorkEstimator,
    },
    /// Random `r_τ` and `𝒳` drawn from the seed unless given explicitly as
    /// row-major `[re, im]` pairs.
    ExactOverwrite {
        #[serde(default = "defaults::dim")]
        d: usize,
        #[serde(default)]
        x: Option<Vec<[f64; 2]>>,
        #[serde(default)]
        r_tau: Option<Vec<[f64; 2]>>,
    },
    RandomChannel {
        #[serde(default = "defaults::dim")]
        d: usize,
        #[serde(default = "defaults::env")]
        env: usize,
    },
}

mod defaults {
    pub fn tau() -> f64 {
        50.0
    }
    pub fn coupling() -> f64 {
        0.2
    }
    pub fn steps() -> usize {
        10_000
    }
    pub fn records() -> usize {
        200
    }
    pub fn dim() -> usize {
        2
    }
    pub fn env() -> usize {
        2
    }
}

impl DeviceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DeviceSpec::QubitReset { .. } => "qubit_reset",
            DeviceSpec::Doublewell { .. } => "doublewell",
            DeviceSpec::ExactOverwrite { .. } => "exact_overwrite",
            DeviceSpec::RandomChannel { .. } => "random_channel",
        }
    }

    /// Device with default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        let json = format!(r#"{{"name": "{name}"}}"#);
        serde_json::from_str(&json).map_err(|_| {
            CliError::Usage(format!(
                "unknown device `{name}` (expected qubit_reset, doublewell, exact_overwrite or random_channel)"
            ))
        })
    }
}

impl Default for DeviceSpec {
    fn default() -> Self {
        Self::by_name("qubit_reset").expect("built-in device")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub device: DeviceSpec,
    /// Labels to reconstruct; empty means every label the device reports.
    pub labels: Vec<Label>,
    pub seed: u64,
    pub out: PathBuf,
    /// Holdout threshold (k_BT) for `tomography`.
    pub tol: f64,
    pub max_iter: usize,
    pub step_rule: StepRule,
    /// Frank–Wolfe gap tolerance; `None` uses the optimizer default.
    pub gap_tol: Option<f64>,
    pub holdout: usize,
    /// Random inputs used by `simulate`, and by `sweep` to check the bands.
    pub trajectories: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            device: DeviceSpec::default(),
            labels: Vec::new(),
            seed: 0,
            out: PathBuf::from("out"),
            tol: 1e-8,
            max_iter: 100_000,
            step_rule: StepRule::Classic,
            gap_tol: None,
            holdout: 100,
            trajectories: 100,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
    }

    pub fn fw_options(&self) -> FwOptions {
        FwOptions { max_iter: self.max_iter, tol: self.gap_tol, step: self.step_rule }
    }

    /// Seed offset per purpose, so tomography inputs, holdout states and
    /// device randomness never share a stream.
    pub fn rng(&self, stream: u64) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

pub mod streams {
    pub const DEVICE: u64 = 1;
    pub const INPUTS: u64 = 2;
    pub const HOLDOUT: u64 = 3;
    pub const TRAJECTORIES: u64 = 4;
    pub const DESCENT: u64 = 5;
}
