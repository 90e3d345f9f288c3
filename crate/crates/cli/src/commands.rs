//! One function per subcommand. Each writes its files under `cfg.out` and
//! returns a summary that the binary prints as JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use thermops_core::devices::{run_all, Trajectory};
use thermops_core::extremal::{extremize, spectral, Direction};
use thermops_core::perturbative::{build_model, ModelFile};
use thermops_core::tomography::{predict, reconstruct_operator, EnsembleFile, Label, TestEnsemble, ThermoOperator};
use thermops_core::type2::{
    frank_wolfe_max, frank_wolfe_min, is_overwriting, overwrite_spread, overwriting_minimizer, DescentTrace,
    Type2Objective,
};
use thermops_core::DensityMatrix;

use crate::config::{streams, RunConfig};
use crate::error::{CliError, Result};
use crate::output::OutDir;
use crate::setup::{build, Setup};
use crate::suite::{fig1_suite, Suite};
use crate::sweep::{bands, check, BandCheck, BandRow};

const ENSEMBLE: &str = "ensemble.json";

fn operator_file(label: &Label) -> String {
    format!("operator_{label}.json")
}

fn run_inputs(setup: &Setup, inputs: &[DensityMatrix]) -> Result<Vec<Trajectory>> {
    run_all(setup.device.as_ref(), inputs).map_err(|e| setup.device_error(e))
}

fn load_ensemble(out: &OutDir) -> Result<TestEnsemble> {
    let file: EnsembleFile = out.read_json(ENSEMBLE, "tomography")?;
    Ok(file.into_ensemble()?)
}

fn load_operator(out: &OutDir, label: &Label) -> Result<ThermoOperator> {
    out.read_json(&operator_file(label), "tomography")
}

/// The requested label, or entropy flow when measured, or the first
/// measured label.
fn objective_label(cfg: &RunConfig, ens: &TestEnsemble) -> Result<Label> {
    if let Some(l) = cfg.labels.first() {
        return Ok(l.clone());
    }
    if ens.measurements.contains_key(&Label::EntropyFlow) {
        return Ok(Label::EntropyFlow);
    }
    ens.measurements.keys().next().cloned().ok_or_else(|| CliError::Usage("ensemble has no measurements".into()))
}

fn objective(out: &OutDir, ens: &TestEnsemble, label: &Label) -> Result<Type2Objective> {
    let op = load_operator(out, label)?;
    Ok(Type2Objective::from_ensemble(ens, label, 1.0)?.with_operator(op, 1.0)?)
}

#[derive(Debug, Serialize)]
pub struct HoldoutReport {
    pub inputs: usize,
    pub max_abs_error: BTreeMap<Label, f64>,
    pub threshold: f64,
}

#[derive(Debug, Serialize)]
pub struct TomographyReport {
    pub device: String,
    pub condition_number: f64,
    pub files: Vec<PathBuf>,
    pub eigenvalues: BTreeMap<Label, Vec<f64>>,
    pub holdout: HoldoutReport,
}

pub fn tomography(cfg: &RunConfig) -> Result<TomographyReport> {
    let setup = build(cfg)?;
    let out = OutDir::create(&cfg.out)?;
    let trajs = run_inputs(&setup, &setup.inputs)?;
    let ens =
        thermops_core::devices::ensemble_from_trajectories(&setup.basis, &setup.inputs, &trajs, &setup.labels, None)?;
    let mut files = vec![out.write_json(ENSEMBLE, &EnsembleFile::from_ensemble(&ens, setup.device.name()))?];
    let mut ops = BTreeMap::new();
    let mut eigenvalues = BTreeMap::new();
    for label in &setup.labels {
        let op = reconstruct_operator(&ens, label)?;
        files.push(out.write_json(&operator_file(label), &op)?);
        let spec = spectral(&op);
        files.push(out.write_json(&format!("spectrum_{label}.json"), &spec)?);
        eigenvalues.insert(label.clone(), spec.eigenvalues.clone());
        ops.insert(label.clone(), op);
    }
    if let (Some(dw), Some(work)) = (&setup.doublewell, ops.get(&Label::Work)) {
        let spec0 = &dw.sequence.snapshots[&0];
        let name = "work_eigenstates.csv";
        thermops_doublewell::output::write_work_eigenstates_csv(out.raw(name)?, dw.cfg(), spec0, work)?;
        files.push(out.path(name));
    }

    let held = setup.random_states(cfg.holdout, streams::HOLDOUT, cfg);
    let held_trajs = run_inputs(&setup, &held)?;
    let mut max_abs_error = BTreeMap::new();
    for (label, op) in &ops {
        let mut worst = 0.0_f64;
        for (rho, t) in held.iter().zip(&held_trajs) {
            let direct = t.final_value(label).ok_or_else(|| CliError::Usage(format!("holdout run lacks `{label}`")))?;
            worst = worst.max((predict(op, rho)? - direct).abs());
        }
        max_abs_error.insert(label.clone(), worst);
    }
    let holdout = HoldoutReport { inputs: held.len(), max_abs_error, threshold: cfg.tol };
    files.push(out.write_json("holdout.json", &holdout)?);
    let report = TomographyReport {
        device: setup.device.name().to_string(),
        condition_number: ens.condition_number(),
        files,
        eigenvalues,
        holdout,
    };
    if let Some((label, err)) = report.holdout.max_abs_error.iter().find(|(_, e)| **e > cfg.tol) {
        return Err(CliError::Validation(format!("holdout error for `{label}` is {err:.3e}, above {:.1e}", cfg.tol)));
    }
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct ExtremeValues {
    pub min: f64,
    pub max: f64,
    pub min_state: DensityMatrix,
    pub max_state: DensityMatrix,
    pub min_degenerate: bool,
    pub max_degenerate: bool,
}

#[derive(Debug, Serialize)]
pub struct ExtremizeReport {
    pub extremes: BTreeMap<Label, [f64; 2]>,
    pub suite: Option<Suite>,
    pub files: Vec<PathBuf>,
}

pub fn extremize_cmd(cfg: &RunConfig) -> Result<ExtremizeReport> {
    let out = OutDir::open(&cfg.out);
    let ens = load_ensemble(&out)?;
    let labels: Vec<Label> =
        if cfg.labels.is_empty() { ens.measurements.keys().cloned().collect() } else { cfg.labels.clone() };
    let mut files = Vec::new();
    let mut extremes = BTreeMap::new();
    let mut ops = BTreeMap::new();
    for label in labels {
        let op = load_operator(&out, &label)?;
        let (lo, hi) = (extremize(&op, Direction::Min), extremize(&op, Direction::Max));
        let ev = ExtremeValues {
            min: lo.value,
            max: hi.value,
            min_state: lo.state,
            max_state: hi.state,
            min_degenerate: lo.degenerate,
            max_degenerate: hi.degenerate,
        };
        files.push(out.write_json(&format!("extremes_{label}.json"), &ev)?);
        extremes.insert(label.clone(), [ev.min, ev.max]);
        ops.insert(label, op);
    }
    let suite = match (ops.get(&Label::Work), ops.get(&Label::Heat)) {
        (Some(w), Some(q)) => {
            let s = fig1_suite(&ens, w, q, &cfg.fw_options())?;
            files.push(out.write_json("suite.json", &s)?);
            Some(s)
        }
        _ => None,
    };
    Ok(ExtremizeReport { extremes, suite, files })
}

#[derive(Debug, Serialize)]
pub struct OptimumReport {
    pub label: Label,
    pub direction: Direction,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_gap: f64,
    pub state: DensityMatrix,
    /// Present when the test outputs are input independent.
    pub overwriting: Option<OverwriteComparison>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct OverwriteComparison {
    pub output_spread: f64,
    /// Closed-form minimizer (descent) or top eigenstate of 𝒳 (ascent).
    pub reference: DensityMatrix,
    pub trace_distance: f64,
}

fn write_trace(out: &OutDir, name: &str, trace: &DescentTrace) -> Result<PathBuf> {
    let path = out.path(name);
    let mut w = out.raw(name)?;
    use std::io::Write;
    writeln!(w, "# units: {}", crate::output::UNITS).map_err(|source| CliError::Io { path: path.clone(), source })?;
    trace.write_csv(w)?;
    Ok(path)
}

fn optimize(cfg: &RunConfig, direction: Direction) -> Result<OptimumReport> {
    let out = OutDir::open(&cfg.out);
    let ens = load_ensemble(&out)?;
    let label = objective_label(cfg, &ens)?;
    let obj = objective(&out, &ens, &label)?;
    let trace = match direction {
        Direction::Min => frank_wolfe_min(&obj, &obj.basis.reference_state(), &cfg.fw_options())?,
        Direction::Max => frank_wolfe_max(&obj, &cfg.fw_options())?,
    };
    let tag = match direction {
        Direction::Min => "min",
        Direction::Max => "max",
    };
    let spread = overwrite_spread(&ens.outputs);
    let overwriting = is_overwriting(&ens.outputs).then(|| {
        let reference = match direction {
            Direction::Min => overwriting_minimizer(&obj.op, 1.0).state,
            Direction::Max => extremize(&obj.op, Direction::Max).state,
        };
        OverwriteComparison {
            output_spread: spread,
            trace_distance: trace.final_state.trace_distance(&reference),
            reference,
        }
    });
    let last = trace.iterates.last();
    let files = vec![write_trace(&out, &format!("descent_{tag}_{label}.csv"), &trace)?];
    let mut report = OptimumReport {
        label: label.clone(),
        direction,
        value: trace.final_value,
        converged: trace.converged,
        iterations: trace.iterates.len(),
        final_gap: last.map_or(0.0, |i| i.gap),
        state: trace.final_state,
        overwriting,
        files,
    };
    report.files.push(out.write_json(&format!("ideal_{tag}_{label}.json"), &report)?);
    Ok(report)
}

pub fn descend(cfg: &RunConfig) -> Result<OptimumReport> {
    optimize(cfg, Direction::Min)
}

pub fn ascend(cfg: &RunConfig) -> Result<OptimumReport> {
    optimize(cfg, Direction::Max)
}

#[derive(Debug, Serialize)]
pub struct PerturbReport {
    pub label: Label,
    pub state: DensityMatrix,
    pub model_value: f64,
    pub exact_value: f64,
    pub hessian_min_eigenvalue: f64,
    pub regime_exceeded: bool,
    pub out_of_range: Option<f64>,
    pub files: Vec<PathBuf>,
}

pub fn perturb(cfg: &RunConfig) -> Result<PerturbReport> {
    let out = OutDir::open(&cfg.out);
    let ens = load_ensemble(&out)?;
    let label = objective_label(cfg, &ens)?;
    let obj = objective(&out, &ens, &label)?;
    let model = build_model(&obj, &obj.basis.reference_state())?;
    let sol = model.solve_optimal()?;
    let mut report = PerturbReport {
        label: label.clone(),
        exact_value: obj.evaluate(&sol.state),
        state: sol.state,
        model_value: sol.value,
        hessian_min_eigenvalue: model.min_eigenvalue(),
        regime_exceeded: sol.regime_exceeded,
        out_of_range: sol.out_of_range,
        files: vec![out.write_json(&format!("model_{label}.json"), &ModelFile::from(&model))?],
    };
    report.files.push(out.write_json(&format!("perturbative_{label}.json"), &report)?);
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub device: String,
    pub runs: usize,
    pub final_values: BTreeMap<Label, Vec<f64>>,
    pub files: Vec<PathBuf>,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulateReport> {
    let setup = build(cfg)?;
    let out = OutDir::create(&cfg.out)?;
    let inputs = setup.random_states(cfg.trajectories, streams::TRAJECTORIES, cfg);
    let trajs = run_inputs(&setup, &inputs)?;
    let mut files = vec![out.write_json("simulate_inputs.json", &inputs)?];
    let mut final_values: BTreeMap<Label, Vec<f64>> = BTreeMap::new();
    for (k, t) in trajs.iter().enumerate() {
        let name = format!("trajectory_{k:03}.csv");
        t.write_csv(out.raw(&name)?)?;
        files.push(out.path(&name));
        for label in &setup.labels {
            final_values.entry(label.clone()).or_default().extend(t.final_value(label));
        }
    }
    Ok(SimulateReport { device: setup.device.name().to_string(), runs: trajs.len(), final_values, files })
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub device: String,
    pub times: usize,
    pub check: BandCheck,
    pub files: Vec<PathBuf>,
    #[serde(skip)]
    pub rows: Vec<BandRow>,
}

pub fn sweep(cfg: &RunConfig) -> Result<SweepReport> {
    let setup = build(cfg)?;
    let out = OutDir::create(&cfg.out)?;
    for l in [Label::Work, Label::Heat] {
        if !setup.device.labels().contains(&l) {
            return Err(CliError::Usage(format!("sweep needs `{l}` from device `{}`", setup.device.name())));
        }
    }
    let trajs = run_inputs(&setup, &setup.inputs)?;
    let rows = bands(&setup.basis, &setup.inputs, &trajs, &cfg.fw_options())?;
    let samples = setup.random_states(cfg.trajectories, streams::TRAJECTORIES, cfg);
    let sample_trajs = run_inputs(&setup, &samples)?;
    let c = check(&rows, &sample_trajs);

    let mut w = out.csv("sweep.csv")?;
    w.write_record(["t", "work_min", "work_max", "heat_min", "heat_max", "ep_min", "ep_max"])?;
    for r in &rows {
        let v = [r.t, r.work[0], r.work[1], r.heat[0], r.heat[1], r.entropy_production[0], r.entropy_production[1]];
        w.write_record(v.iter().map(|x| x.to_string()))?;
    }
    w.flush().map_err(|source| CliError::Io { path: out.path("sweep.csv"), source })?;
    let mut s = out.csv("sweep_samples.csv")?;
    s.write_record(["sample", "t", "work", "heat", "entropy_production"])?;
    for (k, t) in sample_trajs.iter().enumerate() {
        for i in 0..t.len() {
            let row = [k as f64, t.times[i], t.work[i], t.heat[i], t.entropy_production(i)];
            s.write_record(row.iter().map(|x| x.to_string()))?;
        }
    }
    s.flush().map_err(|source| CliError::Io { path: out.path("sweep_samples.csv"), source })?;
    let files = vec![out.path("sweep.csv"), out.path("sweep_samples.csv"), out.write_json("sweep_check.json", &c)?];
    let report = SweepReport { device: setup.device.name().to_string(), times: rows.len(), check: c, files, rows };
    if report.check.max_violation > cfg.tol {
        return Err(CliError::Validation(format!(
            "a sample left the work/heat band by {:.3e}",
            report.check.max_violation
        )));
    }
    if report.check.min_band_entropy_production < -1e-6 {
        return Err(CliError::Validation(format!(
            "entropy-production band reaches {:.3e}",
            report.check.min_band_entropy_production
        )));
    }
    Ok(report)
}
