//! One protocol step in the instantaneous eigenbasis: exact phase rotation,
//! first-order dissipation, and the step's work increment.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thermops_core::linalg::{CMatrix, C64};

use crate::error::{DwError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkEstimator {
    /// Coherences averaged over the step with the sinc envelope.
    #[default]
    TimeAveraged,
    /// `tr[ρ(H_{n+1} − H_n)]` with the state at the start of the step.
    Naive,
}

/// `sinc(h)·e^{−ih}` for `h = ωδt/2`, zero exactly at the sinc zeros.
fn coherence_factor(omega: f64, dt: f64) -> C64 {
    let h = 0.5 * omega * dt;
    if h.abs() < 1e-8 {
        return C64::new(1.0, -h);
    }
    let turns = h / std::f64::consts::PI;
    if (turns - turns.round()).abs() < 1e-12 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(h.sin() / h, -h)
}

/// State averaged over one step of free evolution, with `ω_ab = E_a − E_b`.
pub fn time_averaged(rho: &CMatrix, energies: &[f64], dt: f64) -> CMatrix {
    let k = energies.len();
    CMatrix::from_fn(k, k, |a, b| {
        if a == b {
            rho[(a, b)]
        } else {
            rho[(a, b)] * coherence_factor(energies[a] - energies[b], dt)
        }
    })
}

/// `tr[ρ̃ ΔH]` where `ρ̃` is the raw or time-averaged state. Complex so that
/// non-Hermitian operator inputs (matrix units) can be pushed through.
pub fn work_increment(rho: &CMatrix, energies: &[f64], dh: &DMatrix<f64>, dt: f64, estimator: WorkEstimator) -> C64 {
    let k = energies.len();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..k {
        for b in 0..k {
            let r = match estimator {
                WorkEstimator::Naive => rho[(a, b)],
                WorkEstimator::TimeAveraged if a == b => rho[(a, b)],
                WorkEstimator::TimeAveraged => rho[(a, b)] * coherence_factor(energies[a] - energies[b], dt),
            };
            acc += r * dh[(b, a)];
        }
    }
    acc
}

/// `ρ ↦ UρU† − ½δt{Γ, UρU†} + δt Σ_m r^{m→n} ⟨m|UρU†|m⟩ |n⟩⟨n|` with
/// `U = e^{−iHδt}` diagonal and `Γ_m = Σ_n r^{m→n}`.
pub fn step(rho: &CMatrix, energies: &[f64], rates: &DMatrix<f64>, escape: &[f64], dt: f64) -> CMatrix {
    let k = energies.len();
    let mut s = CMatrix::from_fn(k, k, |a, b| rho[(a, b)] * C64::from_polar(1.0, -(energies[a] - energies[b]) * dt));
    let pops: Vec<C64> = (0..k).map(|a| s[(a, a)]).collect();
    for a in 0..k {
        for b in 0..k {
            s[(a, b)] *= 1.0 - 0.5 * dt * (escape[a] + escape[b]);
        }
    }
    for n in 0..k {
        let gain: C64 = (0..k).map(|m| pops[m] * rates[(m, n)]).sum();
        s[(n, n)] += gain * dt;
    }
    s
}

/// Trace drift and population checks for a physical reduced state.
pub fn check_state(rho: &CMatrix, step_index: usize) -> Result<()> {
    let tr: C64 = rho.diagonal().iter().sum();
    let drift = (tr - C64::new(1.0, 0.0)).norm();
    if drift > 1e-8 {
        return Err(DwError::Stepper { step: step_index, reason: format!("trace drift {drift:.3e}") });
    }
    let min_pop = rho.diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if min_pop < -1e-9 {
        return Err(DwError::Stepper { step: step_index, reason: format!("population {min_pop:.3e} below zero") });
    }
    Ok(())
}
