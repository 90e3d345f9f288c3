//! Operator tomography: thermodynamic operators and the propagated basis from
//! a device's response to L linearly independent test inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::basis::{adapted_basis, BlochVector, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::serde_mat::{from_pairs, to_pairs};
use crate::state::DensityMatrix;

/// Singular values of B below this mark the inputs as linearly dependent.
pub const SINGULAR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Label {
    Work,
    Heat,
    EntropyFlow,
    EnergyChange,
    TpmWork,
    Custom(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::Work => "work",
            Label::Heat => "heat",
            Label::EntropyFlow => "entropy_flow",
            Label::EnergyChange => "energy_change",
            Label::TpmWork => "tpm_work",
            Label::Custom(name) => name,
        };
        f.write_str(s)
    }
}

impl FromStr for Label {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "work" => Label::Work,
            "heat" => Label::Heat,
            "entropy_flow" => Label::EntropyFlow,
            "energy_change" => Label::EnergyChange,
            "tpm_work" => Label::TpmWork,
            other => Label::Custom(other.to_string()),
        })
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        s.parse().unwrap()
    }
}

impl From<Label> for String {
    fn from(l: Label) -> Self {
        l.to_string()
    }
}

/// Hermitian operator 𝒳 with `⟨X⟩_ρ = tr(ρ𝒳)`, stored both as a matrix and
/// as `(⟨X⟩_{I/d}, x)` with `xₙ = tr(Γₙ𝒳)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoOperator {
    pub label: Label,
    pub mat: CMatrix,
    pub ref_value: f64,
    pub vec: BlochVector,
    /// Orthonormal columns spanning the subspace the operator is defined on.
    pub support: Option<CMatrix>,
}

impl ThermoOperator {
    /// `𝒳 = ⟨X⟩_{I/d} I_P + x·Γ/η`.
    pub fn from_vector(label: Label, ref_value: f64, x: Vec<f64>, basis: &OperatorBasis) -> Result<Self> {
        if x.len() != basis.gammas().len() {
            return Err(Error::DimensionMismatch { expected: basis.gammas().len(), found: x.len() });
        }
        let mut mat = basis.identity_p().scale(ref_value);
        for (g, &xi) in basis.gammas().iter().zip(&x) {
            mat += g.scale(xi / basis.eta());
        }
        Ok(Self {
            label,
            mat: linalg::hermitize(&mat),
            ref_value,
            vec: BlochVector::new(x, basis.dim()),
            support: basis.support().cloned(),
        })
    }

    /// Wrap a Hermitian matrix, computing its reference value and vector in `basis`.
    pub fn from_matrix(label: Label, mat: CMatrix, basis: &OperatorBasis) -> Result<Self> {
        if mat.nrows() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: mat.nrows() });
        }
        let deviation = linalg::hermiticity_defect(&mat);
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        let mat = basis.pinch(&linalg::hermitize(&mat));
        let ref_value = linalg::trace_product(&basis.reference(), &mat).re;
        let x = basis.gammas().iter().map(|g| linalg::trace_product(g, &mat).re).collect();
        Ok(Self { label, mat, ref_value, vec: BlochVector::new(x, basis.dim()), support: basis.support().cloned() })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// The operator as seen on its subspace (`V†𝒳V`), or the full matrix.
    pub fn compressed(&self) -> CMatrix {
        match &self.support {
            Some(v) => linalg::compress(&self.mat, v),
            None => self.mat.clone(),
        }
    }

    /// Operator norm (largest absolute eigenvalue on the subspace).
    pub fn norm(&self) -> f64 {
        linalg::eigvalsh(&self.compressed()).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `Σ cₖ 𝒳ₖ`; all terms must share dimension and subspace.
    pub fn combine(label: Label, terms: &[(f64, &ThermoOperator)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| Error::IncompleteEnsemble("no operators to combine".into()))?;
        let d = first.dim();
        let mut mat = CMatrix::zeros(d, d);
        let mut ref_value = 0.0;
        let mut x = vec![0.0; first.vec.len()];
        for (c, op) in terms {
            if op.dim() != d || op.vec.len() != x.len() {
                return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
            }
            mat += op.mat.scale(*c);
            ref_value += c * op.ref_value;
            x.iter_mut().zip(&op.vec.coords).for_each(|(a, b)| *a += c * b);
        }
        Ok(Self { label, mat, ref_value, vec: BlochVector::new(x, d), support: first.support.clone() })
    }

    /// `⟨X⟩_{I/d} + b·x`, the vector form of the prediction.
    pub fn predict_from_bloch(&self, b: &BlochVector) -> f64 {
        self.ref_value + b.coords.iter().zip(&self.vec.coords).map(|(a, c)| a * c).sum::<f64>()
    }
}

pub fn predict(op: &ThermoOperator, rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: rho.dim() });
    }
    Ok(rho.expect(&op.mat))
}

#[derive(Debug, Clone)]
pub struct TestEnsemble {
    pub basis: OperatorBasis,
    pub inputs: Vec<DensityMatrix>,
    pub bloch_matrix: DMatrix<f64>,
    pub outputs: Vec<DensityMatrix>,
    pub measurements: BTreeMap<Label, Vec<f64>>,
}

/// Assemble B with rows `[1, b₀⁽ⁿ⁾]` and check the inputs are independent.
pub fn make_ensemble(basis: &OperatorBasis, inputs: Vec<DensityMatrix>) -> Result<TestEnsemble> {
    let l = basis.len();
    if inputs.len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: inputs.len() });
    }
    let mut b = DMatrix::zeros(l, l);
    for (n, rho) in inputs.iter().enumerate() {
        let v = basis.to_bloch(rho)?;
        b[(n, 0)] = 1.0;
        for (m, c) in v.coords.iter().enumerate() {
            b[(n, m + 1)] = *c;
        }
    }
    let svd = b.clone().svd(true, false);
    let (imin, smin) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    if smin < SINGULAR_FLOOR {
        let u = svd.u.expect("left singular vectors requested");
        return Err(Error::DependentInputs {
            smallest_singular_value: smin,
            combination: u.column(imin).iter().copied().collect(),
        });
    }
    Ok(TestEnsemble {
        basis: basis.clone(),
        inputs,
        bloch_matrix: b,
        outputs: Vec::new(),
        measurements: BTreeMap::new(),
    })
}

/// `I_P/d_P` followed by `I_P/d_P + κΓₙ`, with κ as large as possible up to
/// `0.9/d_P` while keeping every input at least 10% away from the PSD boundary.
pub fn default_inputs(basis: &OperatorBasis) -> Result<Vec<DensityMatrix>> {
    let dp = basis.subspace_dim() as f64;
    let kappa = basis
        .gammas()
        .iter()
        .map(|g| {
            let mu = basis.min_eigenvalue(g);
            if mu < 0.0 {
                0.9 / (dp * mu.abs())
            } else {
                f64::INFINITY
            }
        })
        .fold(0.9 / dp, f64::min);
    let reference = basis.reference();
    let mut inputs = vec![basis.reference_state()];
    for g in basis.gammas() {
        inputs.push(DensityMatrix::from_approx(&(&reference + g.scale(kappa)))?);
    }
    Ok(inputs)
}

/// L Hilbert–Schmidt random states in the basis' subspace.
pub fn random_inputs<R: rand::Rng + ?Sized>(basis: &OperatorBasis, rng: &mut R) -> Vec<DensityMatrix> {
    (0..basis.len()).map(|_| basis.random_state(rng)).collect()
}

impl TestEnsemble {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn with_outputs(mut self, outputs: Vec<DensityMatrix>) -> Result<Self> {
        if outputs.len() != self.inputs.len() {
            return Err(Error::IncompleteEnsemble(format!(
                "{} outputs for {} inputs",
                outputs.len(),
                self.inputs.len()
            )));
        }
        self.outputs = outputs;
        Ok(self)
    }

    pub fn with_measurement(mut self, label: Label, values: Vec<f64>) -> Result<Self> {
        self.add_measurement(label, values)?;
        Ok(self)
    }

    pub fn add_measurement(&mut self, label: Label, values: Vec<f64>) -> Result<()> {
        if values.len() != self.inputs.len() {
            return Err(Error::IncompleteEnsemble(format!(
                "{} values for label {label} but {} inputs",
                values.len(),
                self.inputs.len()
            )));
        }
        self.measurements.insert(label, values);
        Ok(())
    }

    /// Smallest singular value of B.
    pub fn min_singular_value(&self) -> f64 {
        self.bloch_matrix.singular_values().iter().fold(f64::INFINITY, |m, &s| m.min(s))
    }

    pub fn condition_number(&self) -> f64 {
        let s = self.bloch_matrix.singular_values();
        s.max() / s.min()
    }

    /// Solve `B Y = R` for one or more right-hand sides.
    fn solve(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let svd = self.bloch_matrix.clone().svd(true, true);
        svd.solve(rhs, SINGULAR_FLOOR).map_err(|e| Error::IncompleteEnsemble(format!("linear solve failed: {e}")))
    }
}

/// `[⟨X⟩_{I/d}; x] = B⁻¹[⟨X⟩_{ρ⁽¹⁾}; …]`, solved by SVD. Works for full and
/// restricted bases alike.
pub fn reconstruct_operator(ens: &TestEnsemble, label: &Label) -> Result<ThermoOperator> {
    let values = ens
        .measurements
        .get(label)
        .ok_or_else(|| Error::IncompleteEnsemble(format!("no measurements for label {label}")))?;
    let rhs = DMatrix::from_column_slice(values.len(), 1, values);
    let y = ens.solve(&rhs)?;
    let x = y.column(0).iter().skip(1).copied().collect();
    ThermoOperator::from_vector(label.clone(), y[(0, 0)], x, &ens.basis)
}

/// Reconstruction on a restricted subspace; identical to [`reconstruct_operator`]
/// but refuses full-space ensembles so callers can't mix them up.
pub fn restricted_reconstruct(ens: &TestEnsemble, label: &Label) -> Result<ThermoOperator> {
    if !ens.basis.is_restricted() {
        return Err(Error::InvalidProjector("ensemble basis is not restricted".into()));
    }
    reconstruct_operator(ens, label)
}

/// `Γ′ₘ = Σₙ (B⁻¹)ₘₙ ρτ⁽ⁿ⁾`, the time-evolved basis; `Γ′₀` is the image of `I/d`.
#[derive(Debug, Clone)]
pub struct PropagatedBasis {
    pub gamma_primes: Vec<CMatrix>,
}

impl PropagatedBasis {
    pub fn output_dim(&self) -> usize {
        self.gamma_primes[0].nrows()
    }

    /// `ρτ = Γ′₀ + Σ bₙΓ′ₙ` for input Bloch coordinates `b`.
    pub fn output_of_coords(&self, b: &[f64]) -> CMatrix {
        let mut m = self.gamma_primes[0].clone();
        for (g, &c) in self.gamma_primes[1..].iter().zip(b) {
            if c != 0.0 {
                m += g.scale(c);
            }
        }
        m
    }

    /// `Σ cₙΓ′ₙ` over n ≥ 1.
    pub fn combine(&self, c: &[f64]) -> CMatrix {
        let d = self.output_dim();
        let mut m = CMatrix::zeros(d, d);
        for (g, &x) in self.gamma_primes[1..].iter().zip(c) {
            m += g.scale(x);
        }
        m
    }

    /// Channel with a constant output.
    pub fn constant(output: &DensityMatrix, inputs: usize) -> Self {
        let d = output.dim();
        let mut gamma_primes = vec![output.mat().clone()];
        gamma_primes.extend((1..inputs).map(|_| CMatrix::zeros(d, d)));
        Self { gamma_primes }
    }
}

pub fn propagate_basis(ens: &TestEnsemble) -> Result<PropagatedBasis> {
    if ens.outputs.len() != ens.inputs.len() {
        return Err(Error::IncompleteEnsemble(format!(
            "{} outputs for {} inputs",
            ens.outputs.len(),
            ens.inputs.len()
        )));
    }
    let d = ens.outputs[0].dim();
    let l = ens.len();
    // real and imaginary parts of the vectorized outputs side by side
    let mut rhs = DMatrix::zeros(l, 2 * d * d);
    for (n, out) in ens.outputs.iter().enumerate() {
        if out.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: out.dim() });
        }
        for (k, z) in out.mat().iter().enumerate() {
            rhs[(n, k)] = z.re;
            rhs[(n, d * d + k)] = z.im;
        }
    }
    let g = ens.solve(&rhs)?;
    let gamma_primes = (0..l)
        .map(|m| {
            let mut mat = CMatrix::from_fn(d, d, |i, j| {
                let k = i + j * d;
                C64::new(g[(m, k)], g[(m, d * d + k)])
            });
            mat = linalg::hermitize(&mat);
            mat
        })
        .collect();
    Ok(PropagatedBasis { gamma_primes })
}

/// Additive Gaussian noise on measured expectation values, for studying
/// finite-shot effects. Not part of the exact reconstruction contract.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementNoise {
    pub sigma: f64,
    pub seed: u64,
}

impl MeasurementNoise {
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.sigma.max(0.0)).expect("finite sigma");
        values.iter().map(|v| v + normal.sample(&mut rng)).collect()
    }

    pub fn apply_to(&self, ens: &TestEnsemble) -> TestEnsemble {
        let mut noisy = ens.clone();
        for (k, (label, values)) in ens.measurements.iter().enumerate() {
            let n = MeasurementNoise { seed: self.seed.wrapping_add(k as u64), ..*self };
            noisy.measurements.insert(label.clone(), n.apply(values));
        }
        noisy
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    label: Label,
    dim: usize,
    mat: Vec<[f64; 2]>,
    ref_value: f64,
    vec: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subspace: Option<Vec<[f64; 2]>>,
}

impl Serialize for ThermoOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRepr {
            label: self.label.clone(),
            dim: self.dim(),
            mat: to_pairs(&self.mat),
            ref_value: self.ref_value,
            vec: self.vec.coords.clone(),
            subspace: self.support.as_ref().map(|v| to_pairs(&(v * v.adjoint()))),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ThermoOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = OperatorRepr::deserialize(d)?;
        let mat = from_pairs(r.dim, &r.mat).map_err(D::Error::custom)?;
        let support = match r.subspace {
            Some(p) => {
                let proj = from_pairs(r.dim, &p).map_err(D::Error::custom)?;
                Some(adapted_basis(&[proj]).map_err(D::Error::custom)?.0)
            }
            None => None,
        };
        Ok(Self { label: r.label, mat, ref_value: r.ref_value, vec: BlochVector::new(r.vec, r.dim), support })
    }
}

#[derive(Serialize, Deserialize)]
pub struct EnsembleFile {
    pub basis_ref: String,
    pub basis: OperatorBasis,
    pub inputs: Vec<DensityMatrix>,
    pub outputs: Vec<DensityMatrix>,
    pub measurements: BTreeMap<Label, Vec<f64>>,
}

impl EnsembleFile {
    pub fn from_ensemble(ens: &TestEnsemble, basis_ref: impl Into<String>) -> Self {
        Self {
            basis_ref: basis_ref.into(),
            basis: ens.basis.clone(),
            inputs: ens.inputs.clone(),
            outputs: ens.outputs.clone(),
            measurements: ens.measurements.clone(),
        }
    }

    pub fn into_ensemble(self) -> Result<TestEnsemble> {
        let mut ens = make_ensemble(&self.basis, self.inputs)?;
        if !self.outputs.is_empty() {
            ens = ens.with_outputs(self.outputs)?;
        }
        for (label, values) in self.measurements {
            ens.add_measurement(label, values)?;
        }
        Ok(ens)
    }
}

/// Right-hand-side helper used by tests and callers with raw vectors.
pub fn solve_bloch_system(ens: &TestEnsemble, values: &[f64]) -> Result<DVector<f64>> {
    let rhs = DMatrix::from_column_slice(values.len(), 1, values);
    Ok(ens.solve(&rhs)?.column(0).into_owned())
}
