//! Discretization checks for a configuration.

use serde::Serialize;

use crate::config::DoubleWellConfig;
use crate::error::Result;
use crate::protocol::SpectrumSequence;
use crate::spectrum::grid_refinement_change;

pub const GRID_TOL: f64 = 1e-6;
pub const UNITARITY_TOL: f64 = 1e-6;
pub const SPLITTING_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    /// Largest change of the kept energies under grid refinement, over the
    /// protocol's four junction times.
    pub grid_energy_change: f64,
    pub unitarity_deficit: f64,
    /// `(γδt)²`.
    pub splitting_parameter: f64,
}

impl GateReport {
    pub fn grid_passes(&self) -> bool {
        self.grid_energy_change < GRID_TOL
    }

    pub fn tracking_passes(&self) -> bool {
        self.unitarity_deficit < UNITARITY_TOL
    }

    pub fn splitting_passes(&self) -> bool {
        self.splitting_parameter < SPLITTING_TOL
    }

    pub fn all_pass(&self) -> bool {
        self.grid_passes() && self.tracking_passes() && self.splitting_passes()
    }
}

pub fn grid_gate(cfg: &DoubleWellConfig) -> Result<f64> {
    let mut worst = 0.0_f64;
    for k in 0..4 {
        worst = worst.max(grid_refinement_change(cfg, cfg.tau * k as f64 / 4.0)?);
    }
    Ok(worst)
}

pub fn gate_report(seq: &SpectrumSequence) -> Result<GateReport> {
    Ok(GateReport {
        grid_energy_change: grid_gate(&seq.cfg)?,
        unitarity_deficit: seq.max_unitarity_deficit,
        splitting_parameter: seq.cfg.splitting_parameter(),
    })
}
