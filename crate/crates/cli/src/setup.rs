//! Device construction from a [`DeviceSpec`], plus the test inputs each
//! device is probed with.

use thermops_core::devices::{Device, ExactOverwrite, QubitReset, QubitResetProtocol, RandomChannel};
use thermops_core::linalg;
use thermops_core::serde_mat::from_pairs;
use thermops_core::tomography::{default_inputs, Label};
use thermops_core::{DensityMatrix, OperatorBasis};
use thermops_doublewell::DoubleWellDevice;

use crate::config::{streams, DeviceSpec, RunConfig};
use crate::error::{CliError, Result};

pub struct Setup {
    pub device: Box<dyn Device>,
    pub basis: OperatorBasis,
    pub inputs: Vec<DensityMatrix>,
    pub labels: Vec<Label>,
    /// Typed handle kept for double-well specific output.
    pub doublewell: Option<DoubleWellDevice>,
}

fn explicit_matrix(d: usize, pairs: &Option<Vec<[f64; 2]>>) -> Result<Option<linalg::CMatrix>> {
    pairs.as_ref().map(|p| from_pairs(d, p)).transpose().map_err(CliError::from)
}

pub fn build(cfg: &RunConfig) -> Result<Setup> {
    let mut rng = cfg.rng(streams::DEVICE);
    let mut doublewell = None;
    let (device, basis, inputs): (Box<dyn Device>, OperatorBasis, Option<Vec<DensityMatrix>>) = match &cfg.device {
        DeviceSpec::QubitReset { tau, coupling, steps, records } => {
            let dev = QubitReset {
                protocol: QubitResetProtocol { tau: *tau, coupling: *coupling },
                steps: *steps,
                records: *records,
                frozen_at: None,
            };
            (Box::new(dev), OperatorBasis::pauli(), None)
        }
        DeviceSpec::Doublewell { config, estimator } => {
            let mut dev = DoubleWellDevice::with_snapshots(config, &[0])?;
            dev.estimator = *estimator;
            let basis = dev.subspace_basis()?;
            let n = config.subspace_dim * config.subspace_dim;
            let inputs = dev.random_inputs(n, &mut cfg.rng(streams::INPUTS))?;
            doublewell = Some(dev.clone());
            (Box::new(dev), basis, Some(inputs))
        }
        DeviceSpec::ExactOverwrite { d, x, r_tau } => {
            let x = match explicit_matrix(*d, x)? {
                Some(m) => m,
                None => linalg::random_hermitian(*d, &mut rng),
            };
            let r_tau = match explicit_matrix(*d, r_tau)? {
                Some(m) => DensityMatrix::new(m)?,
                None => DensityMatrix::random(*d, &mut rng),
            };
            (Box::new(ExactOverwrite::new(r_tau, x, Label::Work)?), OperatorBasis::gellmann(*d)?, None)
        }
        DeviceSpec::RandomChannel { d, env } => {
            use rand::Rng;
            let dev = RandomChannel::new(*d, *env, rng.random())?;
            (Box::new(dev), OperatorBasis::gellmann(*d)?, None)
        }
    };
    let inputs = match inputs {
        Some(v) => v,
        None => default_inputs(&basis)?,
    };
    let labels = if cfg.labels.is_empty() { device.labels() } else { cfg.labels.clone() };
    for l in &labels {
        if !device.labels().contains(l) {
            return Err(CliError::Usage(format!("device `{}` does not report `{l}`", device.name())));
        }
    }
    Ok(Setup { device, basis, inputs, labels, doublewell })
}

impl Setup {
    /// Random states in the device's input space.
    pub fn random_states(&self, n: usize, stream: u64, cfg: &RunConfig) -> Vec<DensityMatrix> {
        let mut rng = cfg.rng(stream);
        (0..n).map(|_| self.basis.random_state(&mut rng)).collect()
    }

    pub fn device_error(&self, source: thermops_core::Error) -> CliError {
        CliError::Device { device: self.device.name().to_string(), source }
    }
}
