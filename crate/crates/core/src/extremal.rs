//! Type-I analysis: spectra of thermodynamic operators, their extremal pure
//! inputs and attainable ranges, and the two-point-measurement work operator.

use serde::{Deserialize, Serialize};

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::serde_mat::to_pairs;
use crate::state::DensityMatrix;
use crate::tomography::{Label, ThermoOperator};

/// Relative eigenvalue gap below which eigenvectors are grouped as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are ambient-space eigenvectors.
    pub eigenstates: CMatrix,
    pub degenerate_groups: Vec<Vec<usize>>,
}

impl SpectralResult {
    pub fn eigenstate(&self, k: usize) -> DensityMatrix {
        DensityMatrix::pure(&self.eigenstates.column(k).into_owned())
    }

    pub fn is_degenerate(&self, k: usize) -> bool {
        self.degenerate_groups.iter().any(|g| g.len() > 1 && g.contains(&k))
    }
}

/// Eigendecomposition on the operator's subspace. Each eigenvector is phased
/// so its largest-magnitude component is real and positive.
pub fn spectral(op: &ThermoOperator) -> SpectralResult {
    let (values, local) = linalg::eigh(&op.compressed());
    let mut vecs = match &op.support {
        Some(v) => v * local,
        None => local,
    };
    for mut col in vecs.column_iter_mut() {
        let mut v = col.clone_owned();
        linalg::fix_phase(&mut v);
        col.copy_from(&v);
    }
    let tol = DEGENERACY_TOL * op.norm().max(1.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &lam) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if lam - values[*g.last().unwrap()] < tol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    SpectralResult { eigenvalues: values, eigenstates: vecs, degenerate_groups: groups }
}

#[derive(Debug, Clone)]
pub struct Extremum {
    pub value: f64,
    pub state: DensityMatrix,
    pub degenerate: bool,
}

/// The pure input extremizing `tr(ρ𝒳)`: an extremal eigenprojector.
pub fn extremize(op: &ThermoOperator, direction: Direction) -> Extremum {
    let spec = spectral(op);
    let k = match direction {
        Direction::Min => 0,
        Direction::Max => spec.eigenvalues.len() - 1,
    };
    Extremum { value: spec.eigenvalues[k], state: spec.eigenstate(k), degenerate: spec.is_degenerate(k) }
}

/// `[λ_min, λ_max]`.
pub fn range(op: &ThermoOperator) -> [f64; 2] {
    let v = linalg::eigvalsh(&op.compressed());
    [v[0], v[v.len() - 1]]
}

/// Eigenprojectors of a Hermitian matrix, grouping degenerate eigenvalues.
pub fn eigenprojectors(h: &CMatrix) -> Vec<(f64, CMatrix)> {
    let (values, vecs) = linalg::eigh(h);
    let tol = DEGENERACY_TOL * values.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let d = h.nrows();
    let mut out: Vec<(f64, CMatrix, usize)> = Vec::new();
    for (k, &e) in values.iter().enumerate() {
        let v = vecs.column(k);
        let p = v * v.adjoint();
        match out.last_mut() {
            Some((e0, acc, n)) if (e - *e0).abs() < tol => {
                *acc += p;
                *e0 = (*e0 * *n as f64 + e) / (*n as f64 + 1.0);
                *n += 1;
            }
            _ => out.push((e, p, 1)),
        }
    }
    debug_assert_eq!(out.iter().map(|x| x.2).sum::<usize>(), d);
    out.into_iter().map(|(e, p, _)| (e, p)).collect()
}

/// Expected work of a two-point energy measurement scheme:
/// `Σ_{E,E′} (E′−E) P_E U† P′_{E′} U P_E`, which equals `Σ_E P_E U†H′U P_E − H`.
/// Degenerate energy levels are handled through their eigenprojectors.
pub fn tpm_work_operator(h: &CMatrix, h_final: &CMatrix, u: &CMatrix) -> Result<ThermoOperator> {
    let d = h.nrows();
    for m in [h_final, u] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
        }
    }
    let deviation = linalg::unitarity_defect(u);
    if deviation > UNITARY_TOL {
        return Err(Error::InvalidPropagator { deviation });
    }
    for m in [h, h_final] {
        let deviation = linalg::hermiticity_defect(m);
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
    }
    let heis = u.adjoint() * h_final * u;
    let mut w = CMatrix::zeros(d, d);
    for (e, p) in eigenprojectors(h) {
        w += &p * (&heis - linalg::identity(d).scale(e)) * &p;
    }
    ThermoOperator::from_matrix(Label::TpmWork, linalg::hermitize(&w), &OperatorBasis::gellmann(d.max(2))?)
}

/// Work operator of an unmeasured unitary process, `U†H′U − H`.
pub fn unitary_work_operator(h: &CMatrix, h_final: &CMatrix, u: &CMatrix) -> Result<ThermoOperator> {
    let deviation = linalg::unitarity_defect(u);
    if deviation > UNITARY_TOL {
        return Err(Error::InvalidPropagator { deviation });
    }
    let w = u.adjoint() * h_final * u - h;
    ThermoOperator::from_matrix(Label::Work, linalg::hermitize(&w), &OperatorBasis::gellmann(h.nrows().max(2))?)
}

#[derive(Serialize)]
struct SpectralRepr<'a> {
    eigenvalues: &'a [f64],
    eigenstates: Vec<Vec<[f64; 2]>>,
    degenerate_groups: &'a [Vec<usize>],
}

impl Serialize for SpectralResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectralRepr {
            eigenvalues: &self.eigenvalues,
            eigenstates: self
                .eigenstates
                .column_iter()
                .map(|c| to_pairs(&CMatrix::from_column_slice(c.len(), 1, c.as_slice())))
                .collect(),
            degenerate_groups: &self.degenerate_groups,
        }
        .serialize(s)
    }
}
