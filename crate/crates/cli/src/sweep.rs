//! Time-resolved bands: at each recorded time the operators are rebuilt from
//! the test trajectories truncated there.

use rayon::prelude::*;
use serde::Serialize;
use thermops_core::devices::{ensemble_from_trajectories, Trajectory};
use thermops_core::extremal::range;
use thermops_core::tomography::{reconstruct_operator, Label, ThermoOperator};
use thermops_core::type2::{frank_wolfe_max, frank_wolfe_min, FwOptions, Type2Objective};
use thermops_core::{DensityMatrix, OperatorBasis};

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct BandRow {
    pub t: f64,
    pub work: [f64; 2],
    pub heat: [f64; 2],
    /// `[min, max]` entropy production; the upper edge is a local maximum.
    pub entropy_production: [f64; 2],
}

/// Bands at every recorded time of the test trajectories.
pub fn bands(
    basis: &OperatorBasis,
    inputs: &[DensityMatrix],
    trajectories: &[Trajectory],
    opts: &FwOptions,
) -> Result<Vec<BandRow>> {
    let labels = [Label::Work, Label::Heat];
    let n = trajectories.iter().map(Trajectory::len).min().unwrap_or(0);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let ens = ensemble_from_trajectories(basis, inputs, trajectories, &labels, Some(i))?;
            let work = reconstruct_operator(&ens, &Label::Work)?;
            let heat = reconstruct_operator(&ens, &Label::Heat)?;
            let flow = ThermoOperator::combine(Label::EntropyFlow, &[(-1.0, &heat)])?;
            let obj = Type2Objective::from_ensemble(&ens, &Label::Work, 1.0)?.with_operator(flow, 1.0)?;
            let lo = frank_wolfe_min(&obj, &basis.reference_state(), opts)?;
            let hi = frank_wolfe_max(&obj, opts)?;
            Ok(BandRow {
                t: trajectories[0].times[i],
                work: range(&work),
                heat: range(&heat),
                entropy_production: [lo.final_value, hi.final_value],
            })
        })
        .collect()
}

/// How far sample trajectories stray outside the bands.
#[derive(Debug, Clone, Serialize)]
pub struct BandCheck {
    pub trajectories: usize,
    /// Largest distance of a sample work or heat value outside its band.
    pub max_violation: f64,
    /// Smallest entropy production of any sample at any time.
    pub min_sample_entropy_production: f64,
    /// Smallest lower edge of the entropy-production band.
    pub min_band_entropy_production: f64,
    /// Largest amount a sample falls below the entropy-production lower edge.
    pub max_ep_undershoot: f64,
}

pub fn check(rows: &[BandRow], samples: &[Trajectory]) -> BandCheck {
    let outside = |v: f64, band: [f64; 2]| (band[0] - v).max(v - band[1]).max(0.0);
    let mut c = BandCheck {
        trajectories: samples.len(),
        max_violation: 0.0,
        min_sample_entropy_production: f64::INFINITY,
        min_band_entropy_production: rows.iter().map(|r| r.entropy_production[0]).fold(f64::INFINITY, f64::min),
        max_ep_undershoot: 0.0,
    };
    for s in samples {
        for (i, row) in rows.iter().enumerate().take(s.len()) {
            c.max_violation = c.max_violation.max(outside(s.work[i], row.work)).max(outside(s.heat[i], row.heat));
            let ep = s.entropy_production(i);
            c.min_sample_entropy_production = c.min_sample_entropy_production.min(ep);
            c.max_ep_undershoot = c.max_ep_undershoot.max(row.entropy_production[0] - ep);
        }
    }
    c
}
