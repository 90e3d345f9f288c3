//! Finite-time processes with thermodynamic bookkeeping.

mod qubit_reset;
mod synthetic;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

pub use qubit_reset::{QubitReset, QubitResetProtocol};
pub use synthetic::{ExactOverwrite, RandomChannel};

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::state::DensityMatrix;
use crate::tomography::{make_ensemble, Label, TestEnsemble};

/// States and accumulated thermodynamic quantities on a time grid. Entropy
/// flow is `Φ = −Q/T` for a single bath; natural units (k_B = 1).
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub work: Vec<f64>,
    pub heat: Vec<f64>,
    pub entropy_flow: Vec<f64>,
    /// `tr(ρ_t H_t)` where a Hamiltonian is defined.
    pub energy: Vec<f64>,
    /// Final-time scalars a device reports beyond the columns above.
    pub extra: BTreeMap<Label, f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("non-empty trajectory")
    }

    /// Value of `label` accumulated up to grid index `i`. Extra scalars only
    /// exist at the final time.
    pub fn value_at(&self, label: &Label, i: usize) -> Option<f64> {
        let last = i + 1 == self.len();
        if last {
            if let Some(v) = self.extra.get(label) {
                return Some(*v);
            }
        }
        match label {
            Label::Work => self.work.get(i).copied(),
            Label::Heat => self.heat.get(i).copied(),
            Label::EntropyFlow => self.entropy_flow.get(i).copied(),
            Label::EnergyChange => Some(self.work.get(i)? + self.heat.get(i)?),
            _ => None,
        }
    }

    pub fn final_value(&self, label: &Label) -> Option<f64> {
        self.value_at(label, self.len().checked_sub(1)?)
    }

    /// `S(ρ_t)`.
    pub fn entropy(&self, i: usize) -> f64 {
        self.states[i].entropy()
    }

    /// `Σ_t = Φ_t + S(ρ_t) − S(ρ_0)`.
    pub fn entropy_production(&self, i: usize) -> f64 {
        self.entropy_flow[i] + self.entropy(i) - self.entropy(0)
    }

    /// Columns `t, W, Q, Phi, S, purity` preceded by a units comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# units: t in hbar/(kB T), W and Q in kB T, Phi and S in kB")?;
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "W", "Q", "Phi", "S", "purity"])?;
        for i in 0..self.len() {
            wtr.serialize((
                self.times[i],
                self.work[i],
                self.heat[i],
                self.entropy_flow[i],
                self.entropy(i),
                self.states[i].purity(),
            ))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub trait Device: Send + Sync {
    fn name(&self) -> &str;

    fn input_dim(&self) -> usize;

    /// Labels this device can report for every run.
    fn labels(&self) -> Vec<Label>;

    fn run(&self, rho0: &DensityMatrix) -> Result<Trajectory>;
}

/// Runs every input through the device (in parallel) and returns the
/// trajectories in input order.
pub fn run_all(device: &dyn Device, inputs: &[DensityMatrix]) -> Result<Vec<Trajectory>> {
    inputs.par_iter().map(|rho| device.run(rho)).collect()
}

/// Ensemble at grid index `i` (or the final time when `None`) from trajectories
/// already computed for `inputs`.
pub fn ensemble_from_trajectories(
    basis: &OperatorBasis,
    inputs: &[DensityMatrix],
    trajectories: &[Trajectory],
    labels: &[Label],
    index: Option<usize>,
) -> Result<TestEnsemble> {
    let at = |t: &Trajectory| index.unwrap_or(t.len() - 1);
    let outputs = trajectories.iter().map(|t| t.states[at(t)].clone()).collect();
    let mut ens = make_ensemble(basis, inputs.to_vec())?.with_outputs(outputs)?;
    for label in labels {
        let values = trajectories
            .iter()
            .map(|t| t.value_at(label, at(t)))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::IncompleteEnsemble(format!("device does not report {label}")))?;
        ens.add_measurement(label.clone(), values)?;
    }
    Ok(ens)
}

/// Runs the inputs and builds a measured ensemble at the final time.
pub fn collect_ensemble(
    device: &dyn Device,
    basis: &OperatorBasis,
    inputs: Vec<DensityMatrix>,
    labels: &[Label],
) -> Result<(TestEnsemble, Vec<Trajectory>)> {
    // validate the inputs before spending time on simulation
    make_ensemble(basis, inputs.clone())?;
    let trajectories = run_all(device, &inputs)?;
    let ens = ensemble_from_trajectories(basis, &inputs, &trajectories, labels, None)?;
    Ok((ens, trajectories))
}
