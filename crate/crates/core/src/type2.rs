//! Type-II objectives `f(ρ) = p·[tr(ρ𝒳) + S(ρτ) − S(ρ)]`: evaluation,
//! gradient, Frank–Wolfe descent and ascent, the mismatch identity, and the
//! closed-form minimizer for overwriting processes.

use std::io::Write;

use serde::Serialize;

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::extremal::Direction;
use crate::linalg::{self, CMatrix};
use crate::state::DensityMatrix;
use crate::tomography::{propagate_basis, reconstruct_operator, Label, PropagatedBasis, TestEnsemble, ThermoOperator};

/// Mixing weight toward `I_P/d_P` applied to rank-deficient starting states.
pub const REGULARIZATION: f64 = 1e-6;
/// Outputs closer than this (trace distance) to their mean count as overwritten.
pub const OVERWRITE_TOL: f64 = 1e-6;
const RANK_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct Type2Objective {
    pub op: ThermoOperator,
    pub propagated: PropagatedBasis,
    pub basis: OperatorBasis,
    pub scale: f64,
}

impl Type2Objective {
    pub fn new(op: ThermoOperator, propagated: PropagatedBasis, basis: OperatorBasis, scale: f64) -> Result<Self> {
        if op.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: op.dim() });
        }
        if propagated.gamma_primes.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: propagated.gamma_primes.len() });
        }
        Ok(Self { op, propagated, basis, scale })
    }

    /// Objective for `label` with operator and propagated basis both
    /// reconstructed from the ensemble.
    pub fn from_ensemble(ens: &TestEnsemble, label: &Label, scale: f64) -> Result<Self> {
        let op = reconstruct_operator(ens, label)?;
        Self::new(op, propagate_basis(ens)?, ens.basis.clone(), scale)
    }

    /// Same channel, different operator.
    pub fn with_operator(&self, op: ThermoOperator, scale: f64) -> Result<Self> {
        Self::new(op, self.propagated.clone(), self.basis.clone(), scale)
    }

    /// `ρτ = Γ′₀ + Σ bₙΓ′ₙ`.
    pub fn output(&self, rho: &CMatrix) -> CMatrix {
        self.propagated.output_of_coords(&self.basis.coords_of(rho))
    }

    /// Unscaled `tr(ρ𝒳) + S(ρτ) − S(ρ)` for any Hermitian unit-trace matrix.
    pub fn raw_value(&self, rho: &CMatrix) -> f64 {
        let out = self.output(rho);
        linalg::trace_product(rho, &self.op.mat).re + linalg::entropy(&out) - linalg::entropy(rho)
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> f64 {
        self.scale * self.raw_value(rho.mat())
    }

    /// `∂f/∂bₘ = p[tr(Γₘ𝒳) + tr(Γₘ ln ρ) − tr(Γ′ₘ ln ρτ)]`.
    pub fn gradient_coords(&self, rho: &CMatrix) -> Vec<f64> {
        let log_in = log_on_support(&self.basis, rho);
        let log_out = linalg::log_clamped(&self.output(rho));
        self.basis
            .gammas()
            .iter()
            .zip(&self.propagated.gamma_primes[1..])
            .map(|(g, gp)| {
                let v = linalg::trace_product(g, &self.op.mat).re + linalg::trace_product(g, &log_in).re
                    - linalg::trace_product(gp, &log_out).re;
                self.scale * v
            })
            .collect()
    }

    /// `∇f = Σ Γₘ ∂f/∂bₘ`. The directional derivative along a traceless
    /// `Δ` is `tr(Δ∇f)/η`.
    pub fn gradient(&self, rho: &DensityMatrix) -> CMatrix {
        self.basis.combine(&self.gradient_coords(rho.mat()))
    }

    fn gradient_matrix(&self, rho: &CMatrix) -> CMatrix {
        self.basis.combine(&self.gradient_coords(rho))
    }
}

/// `ln ρ` computed on the basis' subspace (zero outside it).
pub fn log_on_support(basis: &OperatorBasis, rho: &CMatrix) -> CMatrix {
    match basis.support() {
        Some(v) => linalg::embed(&linalg::log_clamped(&linalg::compress(rho, v)), v),
        None => linalg::log_clamped(rho),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `ρ ← ρ − a_k n̂ tr(n̂∇f)` with `n̂ = (σ−ρ)/‖σ−ρ‖₂`, clamped to stay in
    /// the state set. Stalls well above the optimum for d ≥ 3.
    GapScaled,
    /// `ρ ← ρ + a_k(σ−ρ)` with `a_k = 2/(k+2)`.
    #[default]
    Classic,
    /// Exact line search along `σ−ρ`.
    LineSearch,
}

#[derive(Debug, Clone, Copy)]
pub struct FwOptions {
    pub max_iter: usize,
    /// Gap tolerance; `None` means `1e−8·max(1, ‖𝒳‖)`.
    pub tol: Option<f64>,
    pub step: StepRule,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self { max_iter: 100_000, tol: None, step: StepRule::Classic }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Iterate {
    pub k: usize,
    pub f: f64,
    pub a_k: f64,
    pub gap: f64,
    /// Trace distance between consecutive iterates.
    pub moved: f64,
}

#[derive(Debug, Clone)]
pub struct DescentTrace {
    pub iterates: Vec<Iterate>,
    pub final_state: DensityMatrix,
    pub final_value: f64,
    pub converged: bool,
}

impl DescentTrace {
    /// CSV with columns `k,f,a_k,gap`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["k", "f", "a_k", "gap"])?;
        for it in &self.iterates {
            wtr.serialize((it.k, it.f, it.a_k, it.gap))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Pure state minimizing (or maximizing) `tr(σG)` over block-diagonal states.
fn linear_oracle(basis: &OperatorBasis, g: &CMatrix, direction: Direction) -> CMatrix {
    let blocks: Vec<CMatrix> = match basis.support() {
        None => vec![linalg::identity(basis.dim())],
        Some(v) => {
            let mut offset = 0;
            basis
                .block_sizes()
                .iter()
                .map(|&s| {
                    let b = v.columns(offset, s).into_owned();
                    offset += s;
                    b
                })
                .collect()
        }
    };
    let mut best: Option<(f64, CMatrix)> = None;
    for v in blocks {
        let (vals, vecs) = linalg::eigh(&linalg::compress(g, &v));
        let k = match direction {
            Direction::Min => 0,
            Direction::Max => vals.len() - 1,
        };
        let better = match (&best, direction) {
            (None, _) => true,
            (Some((b, _)), Direction::Min) => vals[k] < *b,
            (Some((b, _)), Direction::Max) => vals[k] > *b,
        };
        if better {
            let psi = &v * vecs.column(k);
            best = Some((vals[k], linalg::projector(&psi)));
        }
    }
    linalg::hermitize(&best.expect("at least one block").1)
}

fn regularize(basis: &OperatorBasis, rho: &DensityMatrix) -> CMatrix {
    if basis.min_eigenvalue(rho.mat()) < RANK_TOL {
        rho.mat().scale(1.0 - REGULARIZATION) + basis.reference().scale(REGULARIZATION)
    } else {
        rho.mat().clone()
    }
}

/// Longest step toward a vertex. The vertex itself is pure, where the clamped
/// logarithms no longer give a meaningful gradient.
const MAX_STEP: f64 = 1.0 - 1e-8;

/// Bisection on the sign of the directional derivative along `dir`.
fn line_search(obj: &Type2Objective, rho: &CMatrix, dir: &CMatrix) -> f64 {
    let slope = |c: f64| {
        let g = obj.gradient_matrix(&(rho + dir.scale(c)));
        linalg::trace_product(dir, &g).re
    };
    if slope(MAX_STEP) <= 0.0 {
        return MAX_STEP;
    }
    let (mut lo, mut hi) = (0.0, MAX_STEP);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn frank_wolfe(
    obj: &Type2Objective,
    start: &DensityMatrix,
    opts: &FwOptions,
    direction: Direction,
) -> Result<DescentTrace> {
    let tol = opts.tol.unwrap_or(1e-8 * obj.op.norm().max(1.0));
    let mut rho = regularize(&obj.basis, start);
    let mut iterates = Vec::new();
    let mut converged = false;
    for k in 0..opts.max_iter {
        let g = obj.gradient_matrix(&rho);
        let sigma = linear_oracle(&obj.basis, &g, direction);
        let dir = &sigma - &rho;
        let gap = linalg::trace_product(&dir, &g).re;
        let f = obj.scale * obj.raw_value(&rho);
        let done = match direction {
            Direction::Min => gap > -tol,
            Direction::Max => gap < tol,
        };
        if done {
            iterates.push(Iterate { k, f, a_k: 0.0, gap, moved: 0.0 });
            converged = true;
            break;
        }
        let a_k = 2.0 / (k as f64 + 2.0);
        let c = match (opts.step, direction) {
            (StepRule::Classic, _) => a_k,
            (StepRule::GapScaled, _) => {
                let norm2 = linalg::frobenius(&dir);
                (a_k * gap.abs() / (norm2 * norm2)).clamp(0.0, 1.0)
            }
            (StepRule::LineSearch, Direction::Min) => line_search(obj, &rho, &dir),
            // a convex function restricted to a segment peaks at an endpoint,
            // and a positive gap rules out c = 0
            (StepRule::LineSearch, Direction::Max) => 1.0,
        };
        let c = c.min(MAX_STEP);
        let moved = 0.5 * c * linalg::trace_norm(&dir);
        iterates.push(Iterate { k, f, a_k: c, gap, moved });
        rho = linalg::hermitize(&(rho.scale(1.0 - c) + sigma.scale(c)));
    }
    let final_state = DensityMatrix::from_approx(&rho)?;
    let final_value = obj.evaluate(&final_state);
    Ok(DescentTrace { iterates, final_state, final_value, converged })
}

/// Frank–Wolfe descent from `rho_init`, regularized toward `I_P/d_P` if it is
/// rank deficient.
pub fn frank_wolfe_min(obj: &Type2Objective, rho_init: &DensityMatrix, opts: &FwOptions) -> Result<DescentTrace> {
    frank_wolfe(obj, rho_init, opts, Direction::Min)
}

/// Frank–Wolfe ascent seeded at the pure state maximizing `tr(ρ𝒳)`. Only
/// local stationarity is certified.
pub fn frank_wolfe_max(obj: &Type2Objective, opts: &FwOptions) -> Result<DescentTrace> {
    let seed = crate::extremal::extremize(&obj.op, Direction::Max).state;
    frank_wolfe(obj, &seed, opts, Direction::Max)
}

/// Closed-form minimizer `ω = e^{−𝒳}/tr e^{−𝒳}` of an overwriting process.
#[derive(Debug, Clone)]
pub struct OverwritingSolution {
    pub state: DensityMatrix,
    /// `ln tr e^{−𝒳}`.
    pub log_partition: f64,
    pub scale: f64,
}

impl OverwritingSolution {
    /// `p[S(r_τ) − ln tr e^{−𝒳}]`.
    pub fn min_value(&self, s_rtau: f64) -> f64 {
        self.scale * (s_rtau - self.log_partition)
    }
}

pub fn overwriting_minimizer(op: &ThermoOperator, scale: f64) -> OverwritingSolution {
    let (vals, vecs) = linalg::eigh(&op.compressed());
    let shift = vals[0];
    let w: Vec<f64> = vals.iter().map(|v| (-(v - shift)).exp()).collect();
    let z: f64 = w.iter().sum();
    let local = linalg::from_spectrum(&w.iter().map(|x| x / z).collect::<Vec<_>>(), &vecs);
    let mat = match &op.support {
        Some(v) => linalg::embed(&local, v),
        None => local,
    };
    OverwritingSolution {
        state: DensityMatrix::from_approx(&mat).expect("Gibbs-form state is physical"),
        log_partition: z.ln() - shift,
        scale,
    }
}

/// `I/2 − (x̂·σ/2) tanh|x|` for `𝒳 = c I + x·σ`.
pub fn qubit_overwriting_minimizer(x: [f64; 3]) -> DensityMatrix {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut m = linalg::identity(2).unscale(2.0);
    if r > 0.0 {
        let t = r.tanh() / (2.0 * r);
        m -= linalg::pauli_x().scale(x[0] * t) + linalg::pauli_y().scale(x[1] * t) + linalg::pauli_z().scale(x[2] * t);
    }
    DensityMatrix::from_approx(&m).expect("|tanh| < 1")
}

/// Largest trace distance of any output to the mean output.
pub fn overwrite_spread(outputs: &[DensityMatrix]) -> f64 {
    if outputs.is_empty() {
        return 0.0;
    }
    let d = outputs[0].dim();
    let mean = outputs.iter().fold(CMatrix::zeros(d, d), |acc, o| acc + o.mat()).unscale(outputs.len() as f64);
    outputs.iter().map(|o| linalg::trace_distance(o.mat(), &mean)).fold(0.0, f64::max)
}

pub fn is_overwriting(outputs: &[DensityMatrix]) -> bool {
    overwrite_spread(outputs) < OVERWRITE_TOL
}

/// `D[a‖b] = tr a ln a − tr a ln b`; errors when `a` has weight outside the
/// support of `b`.
pub fn relative_entropy(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let (vals, vecs) = linalg::eigh(b);
    let floor = 1e-14 * vals.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut weight = 0.0;
    let mut cross = 0.0;
    for (k, &lam) in vals.iter().enumerate() {
        let v = vecs.column(k);
        let p = (v.adjoint() * a * v)[(0, 0)].re;
        if lam <= floor {
            weight += p.max(0.0);
        } else {
            cross += p * lam.ln();
        }
    }
    if weight > 1e-12 {
        return Err(Error::SupportMismatch { weight });
    }
    Ok(-linalg::entropy(a) - cross)
}

/// `|(f_ρ − f_α) − (D[ρ‖α] − D[ρτ‖ατ])|` from explicit input/output pairs,
/// using the unscaled objective.
pub fn mismatch_check(
    obj: &Type2Objective,
    rho: &DensityMatrix,
    alpha: &DensityMatrix,
    alpha_out: &DensityMatrix,
    rho_out: &DensityMatrix,
) -> Result<f64> {
    let f = |x: &DensityMatrix, out: &DensityMatrix| x.expect(&obj.op.mat) + out.entropy() - x.entropy();
    let lhs = f(rho, rho_out) - f(alpha, alpha_out);
    let rhs = relative_entropy(rho.mat(), alpha.mat())? - relative_entropy(rho_out.mat(), alpha_out.mat())?;
    Ok((lhs - rhs).abs())
}
