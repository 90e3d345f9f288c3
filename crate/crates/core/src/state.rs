use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::serde_mat::MatrixRepr;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = -1e-10;

/// A validated d×d density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Strict constructor: rejects anything outside the tolerances.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState(format!("{}x{} matrix is not square", mat.nrows(), mat.ncols())));
        }
        let herm = linalg::hermiticity_defect(&mat);
        if herm >= HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = linalg::trace(&mat);
        if (tr - linalg::ONE).norm() >= TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = linalg::eigvalsh(&mat)[0];
        if min <= PSD_TOL {
            return Err(Error::NonPhysicalState { min_eigenvalue: min });
        }
        Ok(Self(mat))
    }

    /// Hermitize and renormalize the trace first, then validate positivity.
    /// Used for states produced by arithmetic that drifts at round-off level.
    pub fn from_approx(mat: &CMatrix) -> Result<Self> {
        let h = linalg::hermitize(mat);
        let tr = linalg::trace(&h).re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let mut m = h.unscale(tr);
        // restore exact Hermiticity of the diagonal after scaling
        for i in 0..m.nrows() {
            m[(i, i)].im = 0.0;
        }
        Self::new(m)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(linalg::identity(d).unscale(d as f64))
    }

    /// `|k⟩⟨k|` in the computational basis.
    pub fn basis_state(d: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = linalg::ONE;
        Self(m)
    }

    /// Pure state from a (not necessarily normalized) vector.
    pub fn pure(v: &nalgebra::DVector<linalg::C64>) -> Self {
        Self(linalg::hermitize(&linalg::projector(v)))
    }

    pub fn random<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self(linalg::random_density(d, rng))
    }

    pub fn random_pure<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self(linalg::hermitize(&linalg::random_pure(d, rng)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        linalg::purity(&self.0)
    }

    pub fn entropy(&self) -> f64 {
        linalg::entropy(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.0)
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        linalg::trace_distance(&self.0, &other.0)
    }

    /// `t·self + (1−t)·other`.
    pub fn mix(&self, other: &Self, t: f64) -> Self {
        Self(self.0.scale(t) + other.0.scale(1.0 - t))
    }

    /// `tr(ρ X)` for Hermitian `X` (real part).
    pub fn expect(&self, x: &CMatrix) -> f64 {
        linalg::trace_product(&self.0, x).re
    }
}

impl TryFrom<MatrixRepr> for DensityMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        Self::new(r.into_matrix()?)
    }
}

impl From<DensityMatrix> for MatrixRepr {
    fn from(d: DensityMatrix) -> Self {
        MatrixRepr::from_matrix(&d.0)
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}
