use std::sync::Arc;

use rand::Rng;
use thermops_core::basis::OperatorBasis;
use thermops_core::devices::{collect_ensemble, Device, Trajectory};
use thermops_core::linalg::{self, CMatrix, C64};
use thermops_core::state::DensityMatrix;
use thermops_core::tomography::{restricted_reconstruct, Label, TestEnsemble, ThermoOperator};

use crate::config::DoubleWellConfig;
use crate::error::{DwError, Result};
use crate::protocol::SpectrumSequence;
use crate::stepper::WorkEstimator;

/// The double-well protocol as a device acting on reduced states written in
/// the t = 0 eigenbasis of the `n_keep` lowest levels.
#[derive(Debug, Clone)]
pub struct DoubleWellDevice {
    pub sequence: Arc<SpectrumSequence>,
    pub estimator: WorkEstimator,
}

impl DoubleWellDevice {
    pub fn new(cfg: &DoubleWellConfig) -> Result<Self> {
        Self::with_snapshots(cfg, &[])
    }

    pub fn with_snapshots(cfg: &DoubleWellConfig, snapshot_steps: &[usize]) -> Result<Self> {
        let sequence = SpectrumSequence::build(cfg, snapshot_steps)?;
        Ok(Self { sequence: Arc::new(sequence), estimator: WorkEstimator::TimeAveraged })
    }

    pub fn cfg(&self) -> &DoubleWellConfig {
        &self.sequence.cfg
    }

    /// Restricted basis on the `subspace_dim` lowest t = 0 levels.
    pub fn subspace_basis(&self) -> Result<OperatorBasis> {
        let cfg = self.cfg();
        let mut p = CMatrix::zeros(cfg.n_keep, cfg.n_keep);
        for a in 0..cfg.subspace_dim {
            p[(a, a)] = linalg::ONE;
        }
        Ok(OperatorBasis::restricted(&[p])?)
    }

    /// Random states supported on the input subspace.
    pub fn random_inputs<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<DensityMatrix>> {
        let basis = self.subspace_basis()?;
        Ok((0..n).map(|_| basis.random_state(rng)).collect())
    }

    /// `tr(ρ₀𝒲)`-style work of an arbitrary operator input, by linearity.
    pub fn operator_work(&self, x: &CMatrix) -> Result<C64> {
        Ok(self.sequence.evolve(x, self.estimator, false)?.final_work())
    }

    /// Expected-work operator on the input subspace from the given inputs.
    pub fn work_operator(&self, inputs: Vec<DensityMatrix>) -> Result<(ThermoOperator, TestEnsemble)> {
        let basis = self.subspace_basis()?;
        let (ens, _) = collect_ensemble(self, &basis, inputs, &[Label::Work])?;
        let op = restricted_reconstruct(&ens, &Label::Work)?;
        Ok((op, ens))
    }

    fn check_input(&self, rho0: &DensityMatrix) -> Result<()> {
        let cfg = self.cfg();
        if rho0.dim() != cfg.n_keep {
            return Err(DwError::Dimension { expected: cfg.n_keep, found: rho0.dim() });
        }
        let weight: f64 = (cfg.subspace_dim..cfg.n_keep).map(|a| rho0.mat()[(a, a)].re).sum();
        if weight > 1e-10 {
            return Err(DwError::OutsideSubspace { weight, dim: cfg.subspace_dim });
        }
        Ok(())
    }
}

impl Device for DoubleWellDevice {
    fn name(&self) -> &str {
        "doublewell"
    }

    fn input_dim(&self) -> usize {
        self.cfg().n_keep
    }

    fn labels(&self) -> Vec<Label> {
        vec![Label::Work, Label::Heat, Label::EntropyFlow, Label::EnergyChange]
    }

    fn run(&self, rho0: &DensityMatrix) -> thermops_core::Result<Trajectory> {
        self.check_input(rho0)?;
        let out = self.sequence.evolve(rho0.mat(), self.estimator, true)?;
        Ok(out.into_trajectory()?)
    }
}
