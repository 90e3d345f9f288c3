use serde::{Deserialize, Serialize};

use crate::error::{DwError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points as f64 - 1.0)
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_points).map(|i| self.x_min + i as f64 * dx).collect()
    }

    /// Same interval with every spacing halved.
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points - 1, ..*self }
    }
}

/// Simulation parameters in units of k_BT (energy), βħ (time) and λ_th
/// (length).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DoubleWellConfig {
    pub h0: f64,
    pub w0: f64,
    pub f_max: f64,
    pub tau: f64,
    pub dt: f64,
    pub n_keep: usize,
    /// Input states live on this many lowest t = 0 levels.
    pub subspace_dim: usize,
    pub grid: Grid,
    pub gamma: f64,
    /// Largest tolerated `‖OOᵀ − I‖_max` of a step's overlap matrix.
    pub basis_tolerance: f64,
    /// Trajectory samples are taken every this many steps.
    pub record_every: usize,
}

impl Default for DoubleWellConfig {
    fn default() -> Self {
        Self {
            h0: 8.0,
            w0: 3.0,
            f_max: 8.0 / (3.0 * (2.0 * std::f64::consts::PI).sqrt()),
            tau: 4e9,
            dt: 4e5,
            n_keep: 20,
            subspace_dim: 8,
            grid: Grid { x_min: -4.5, x_max: 4.5, n_points: 1024 },
            gamma: PhysicalUnits::electron_300k().gamma(),
            basis_tolerance: 1e-5,
            record_every: 50,
        }
    }
}

impl DoubleWellConfig {
    pub fn steps(&self) -> usize {
        (self.tau / self.dt).round() as usize
    }

    /// Particle mass in these units, from `λ_th = ħ√(2πβ/m) = 1`.
    pub fn mass(&self) -> f64 {
        2.0 * std::f64::consts::PI
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(DwError::Config(reason.into()));
        if self.grid.n_points < 16 || self.grid.x_max <= self.grid.x_min {
            return bad("grid needs at least 16 points on a non-empty interval");
        }
        if self.n_keep < self.subspace_dim || self.subspace_dim == 0 {
            return bad("need 0 < subspace_dim <= n_keep");
        }
        if self.n_keep >= self.grid.n_points {
            return bad("n_keep must be below the number of grid points");
        }
        if !(self.tau > 0.0 && self.dt > 0.0 && self.dt <= self.tau) {
            return bad("need 0 < dt <= tau");
        }
        let steps = self.tau / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps {
            return bad("tau must be an integer multiple of dt");
        }
        if self.gamma < 0.0 || self.record_every == 0 {
            return bad("gamma must be non-negative and record_every positive");
        }
        Ok(())
    }

    /// `(γδt)²`, required to be well below one.
    pub fn splitting_parameter(&self) -> f64 {
        (self.gamma * self.dt).powi(2)
    }
}

/// Physical scales used to convert to and from SI.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub temperature_k: f64,
    /// Rest energy of the particle in eV.
    pub rest_energy_ev: f64,
    /// Charge in units of e.
    pub charge: f64,
}

const BOLTZMANN_EV: f64 = 8.617_333_262e-5;
const HBAR_EV_S: f64 = 6.582_119_569e-16;
const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
const HBAR_C_EV_NM: f64 = 197.326_980_4;

impl PhysicalUnits {
    pub fn electron_300k() -> Self {
        Self { temperature_k: 300.0, rest_energy_ev: 510_998.95, charge: 1.0 }
    }

    pub fn kt_ev(&self) -> f64 {
        BOLTZMANN_EV * self.temperature_k
    }

    /// `γ = 8πα(q/e)² k_BT/(mc²)` in units of 1/(βħ).
    pub fn gamma(&self) -> f64 {
        8.0 * std::f64::consts::PI * FINE_STRUCTURE * self.charge * self.charge * self.kt_ev() / self.rest_energy_ev
    }

    /// `λ_th = ħc√(2π/(mc² k_BT))` in nm.
    pub fn lambda_th_nm(&self) -> f64 {
        HBAR_C_EV_NM * (2.0 * std::f64::consts::PI / (self.rest_energy_ev * self.kt_ev())).sqrt()
    }

    /// `βħ` in femtoseconds.
    pub fn beta_hbar_fs(&self) -> f64 {
        HBAR_EV_S / self.kt_ev() * 1e15
    }
}
