//! Ideal inputs for every type-I and type-II quantity built from the work and
//! heat operators of one device.

use serde::Serialize;
use thermops_core::extremal::{extremize, Direction};
use thermops_core::linalg::CMatrix;
use thermops_core::tomography::{Label, TestEnsemble, ThermoOperator};
use thermops_core::type2::{frank_wolfe_max, frank_wolfe_min, FwOptions, Type2Objective};
use thermops_core::DensityMatrix;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Heat,
    Work,
    EnergyChange,
    EntropyProduction,
    FreeEnergyChange,
    EntropyChange,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub quantity: Quantity,
    pub direction: Direction,
    pub value: f64,
    pub state: DensityMatrix,
    /// `spectral` (exact) or `frank_wolfe`.
    pub method: &'static str,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Suite {
    pub entries: Vec<SuiteEntry>,
    /// Trace distances among the min-EP, max-ΔF and max-extraction inputs.
    pub distinct: Vec<(String, String, f64)>,
}

impl Suite {
    pub fn get(&self, q: Quantity, d: Direction) -> Option<&SuiteEntry> {
        self.entries.iter().find(|e| e.quantity == q && e.direction == d)
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        self.distinct.iter().map(|p| p.2).fold(f64::INFINITY, f64::min)
    }
}

fn spectral_pair(q: Quantity, op: &ThermoOperator) -> [SuiteEntry; 2] {
    [Direction::Min, Direction::Max].map(|d| {
        let e = extremize(op, d);
        SuiteEntry { quantity: q, direction: d, value: e.value, state: e.state, method: "spectral", converged: true }
    })
}

/// Type-II extremum of `sign·f`, reported as `sign·f`.
fn type2_entry(q: Quantity, obj: &Type2Objective, sign: f64, want: Direction, opts: &FwOptions) -> Result<SuiteEntry> {
    let minimize = matches!((want, sign > 0.0), (Direction::Min, true) | (Direction::Max, false));
    let trace =
        if minimize { frank_wolfe_min(obj, &obj.basis.reference_state(), opts)? } else { frank_wolfe_max(obj, opts)? };
    Ok(SuiteEntry {
        quantity: q,
        direction: want,
        value: sign * trace.final_value,
        state: trace.final_state,
        method: "frank_wolfe",
        converged: trace.converged,
    })
}

/// `ens` must carry work measurements. Entropy flow and energy change are
/// formed as `−𝒬` and `𝒲 + 𝒬`.
pub fn fig1_suite(ens: &TestEnsemble, work: &ThermoOperator, heat: &ThermoOperator, opts: &FwOptions) -> Result<Suite> {
    let energy = ThermoOperator::combine(Label::EnergyChange, &[(1.0, work), (1.0, heat)])?;
    let flow = ThermoOperator::combine(Label::EntropyFlow, &[(-1.0, heat)])?;
    let neg_energy = ThermoOperator::combine(Label::Custom("neg_energy_change".into()), &[(-1.0, &energy)])?;
    let zero = ThermoOperator::combine(Label::Custom("zero".into()), &[(0.0, work)])?;

    let base = Type2Objective::from_ensemble(ens, &Label::Work, 1.0)?;
    let ep = base.with_operator(flow, 1.0)?;
    let neg_df = base.with_operator(neg_energy, 1.0)?;
    let ds = base.with_operator(zero, 1.0)?;

    let mut entries = Vec::new();
    entries.extend(spectral_pair(Quantity::Heat, heat));
    entries.extend(spectral_pair(Quantity::Work, work));
    entries.extend(spectral_pair(Quantity::EnergyChange, &energy));
    for d in [Direction::Min, Direction::Max] {
        entries.push(type2_entry(Quantity::EntropyProduction, &ep, 1.0, d, opts)?);
        // ΔF = ΔE − ΔS is minus the objective with 𝒳 = −ΔE
        entries.push(type2_entry(Quantity::FreeEnergyChange, &neg_df, -1.0, d, opts)?);
    }
    entries.push(type2_entry(Quantity::EntropyChange, &ds, 1.0, Direction::Min, opts)?);

    let mut suite = Suite { entries, distinct: Vec::new() };
    let named: Vec<(&str, DensityMatrix)> = vec![
        ("min_entropy_production", suite.get(Quantity::EntropyProduction, Direction::Min).unwrap().state.clone()),
        ("max_free_energy_gain", suite.get(Quantity::FreeEnergyChange, Direction::Max).unwrap().state.clone()),
        ("max_work_extraction", suite.get(Quantity::Work, Direction::Min).unwrap().state.clone()),
    ];
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            let td = named[i].1.trace_distance(&named[j].1);
            suite.distinct.push((named[i].0.to_string(), named[j].0.to_string(), td));
        }
    }
    Ok(suite)
}

/// `S(ρτ) − S(ρ₀) + tr(ρ₀𝒳)` evaluated through a device trajectory, for
/// checking suite values against direct simulation.
pub fn direct_type2(x: &CMatrix, rho0: &DensityMatrix, out: &DensityMatrix) -> f64 {
    rho0.expect(x) + out.entropy() - rho0.entropy()
}
