//! The driven quartic landscape and its control protocol.

use std::f64::consts::PI;

use crate::config::DoubleWellConfig;
use crate::error::{DwError, Result};

/// Barrier control `g_t` and tilt fraction `f_t/f_max`. Exact at the
/// endpoints so that `H_0 = H_τ` on the grid.
pub fn protocol(t: f64, tau: f64) -> Result<(f64, f64)> {
    if !(0.0..=tau).contains(&t) {
        return Err(DwError::TimeOutOfRange { t, tau });
    }
    if t == tau {
        return Ok((1.0, 0.0));
    }
    let phase = 2.0 * PI * t / tau;
    let (s2, c2) = (phase.sin().powi(2), phase.cos().powi(2));
    let q = t / tau;
    Ok(if q < 0.25 {
        (1.0, s2)
    } else if q < 0.5 {
        (s2, 1.0)
    } else if q < 0.75 {
        (0.0, c2)
    } else {
        (c2, 0.0)
    })
}

/// Potential shape on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Landscape {
    DoubleWell,
    /// `½mω²x²`, for checking the eigensolver against `(n + ½)ω`.
    Harmonic {
        omega: f64,
    },
}

/// `16h₀u⁴ − 8h₀u²g − h₀u f f_max` with `u = x/w₀`.
pub fn quartic(cfg: &DoubleWellConfig, x: f64, g: f64, f: f64) -> f64 {
    let u = x / cfg.w0;
    let u2 = u * u;
    16.0 * cfg.h0 * u2 * u2 - 8.0 * cfg.h0 * u2 * g - cfg.h0 * u * f * cfg.f_max
}

pub fn potential(cfg: &DoubleWellConfig, t: f64, x: f64) -> Result<f64> {
    let (g, f) = protocol(t, cfg.tau)?;
    Ok(quartic(cfg, x, g, f))
}

impl Landscape {
    pub fn values(&self, cfg: &DoubleWellConfig, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        match *self {
            Landscape::DoubleWell => {
                let (g, f) = protocol(t, cfg.tau)?;
                Ok(xs.iter().map(|&x| quartic(cfg, x, g, f)).collect())
            }
            Landscape::Harmonic { omega } => Ok(xs.iter().map(|&x| 0.5 * cfg.mass() * omega * omega * x * x).collect()),
        }
    }
}

/// Coefficients `(a, b)` with `V_{t₁} − V_{t₀} = a x² + b x`.
pub fn potential_change(cfg: &DoubleWellConfig, t0: f64, t1: f64) -> Result<(f64, f64)> {
    let (g0, f0) = protocol(t0, cfg.tau)?;
    let (g1, f1) = protocol(t1, cfg.tau)?;
    let a = -8.0 * cfg.h0 / (cfg.w0 * cfg.w0) * (g1 - g0);
    let b = -cfg.h0 / cfg.w0 * cfg.f_max * (f1 - f0);
    Ok((a, b))
}
