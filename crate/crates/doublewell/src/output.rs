//! CSV emitters for spatial densities.

use std::io::Write;

use thermops_core::linalg::{self, CMatrix, C64};
use thermops_core::tomography::ThermoOperator;

use crate::config::DoubleWellConfig;
use crate::error::Result;
use crate::potential::Landscape;
use crate::spectrum::InstantSpectrum;

const UNITS: &str = "# units: x in lambda_th, densities per lambda_th, energies in kB T";

/// Gibbs state over the kept levels, diagonal in their basis.
pub fn instantaneous_equilibrium(energies: &[f64]) -> CMatrix {
    let e0 = energies[0];
    let w: Vec<f64> = energies.iter().map(|e| (-(e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(w.len(), w.iter().map(|x| C64::new(x / z, 0.0))))
}

/// Columns `x, p, p_eq, V` for a reduced state written in `spec`'s basis.
pub fn write_density_csv<W: Write>(
    mut w: W,
    cfg: &DoubleWellConfig,
    spec: &InstantSpectrum,
    rho: &CMatrix,
) -> Result<()> {
    writeln!(w, "{UNITS}; t = {} hbar/(kB T)", spec.time)?;
    let xs = cfg.grid.points();
    let dx = cfg.grid.spacing();
    let p = spec.density(rho, dx);
    let p_eq = spec.density(&instantaneous_equilibrium(&spec.energies), dx);
    let v = Landscape::DoubleWell.values(cfg, spec.time, &xs)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x", "p", "p_eq", "V"])?;
    for i in 0..xs.len() {
        wtr.serialize((xs[i], p[i], p_eq[i], v[i]))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Densities of the work eigenstates at t = 0: one row per grid point, one
/// column per eigenstate headed by its eigenvalue.
pub fn write_work_eigenstates_csv<W: Write>(
    mut w: W,
    cfg: &DoubleWellConfig,
    spec0: &InstantSpectrum,
    op: &ThermoOperator,
) -> Result<()> {
    writeln!(w, "{UNITS}; column headers after x are work eigenvalues")?;
    let (vals, vecs) = linalg::eigh(&op.compressed());
    let support = op.support.clone().unwrap_or_else(|| linalg::identity(op.dim()));
    let dx = cfg.grid.spacing();
    let densities: Vec<Vec<f64>> = (0..vals.len())
        .map(|k| {
            let psi = &support * vecs.column(k);
            spec0.density(&linalg::projector(&psi), dx)
        })
        .collect();
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["x".to_string()];
    header.extend(vals.iter().map(|v| format!("{v:.10}")));
    wtr.write_record(&header)?;
    for (i, x) in cfg.grid.points().iter().enumerate() {
        let mut row = vec![x.to_string()];
        row.extend(densities.iter().map(|d| d[i].to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
