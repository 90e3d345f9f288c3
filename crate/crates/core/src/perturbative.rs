//! Second-order model of a type-II objective around a full-rank reference
//! state and its closed-form minimizer `ε* = −H^# j`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::{BlochVector, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::serde_mat::{real_rows, MatrixRepr};
use crate::state::DensityMatrix;
use crate::type2::Type2Objective;

/// Eigenvalue pairs closer than this use the confluent branch `φ(a,a) = 1/a`.
pub const DEGENERATE_GAP: f64 = 1e-12;
/// Output eigenvalues below this are dropped from the output entropy Hessian.
pub const OUTPUT_RANK_FLOOR: f64 = 1e-12;
/// Relative eigenvalue cutoff of the group inverse.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Reciprocal logarithmic mean `(ln a − ln b)/(a − b)`.
pub fn phi(a: f64, b: f64) -> f64 {
    if (a - b).abs() < DEGENERATE_GAP {
        1.0 / a
    } else {
        (a.ln() - b.ln()) / (a - b)
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub pi: DensityMatrix,
    pub ref_bloch: BlochVector,
    pub j: DVector<f64>,
    pub h: DMatrix<f64>,
    pub f_ref: f64,
    pub basis: OperatorBasis,
}

/// `Σ_{k,ℓ} φ(λ_k,λ_ℓ) ⟨k|Aₙ|ℓ⟩⟨ℓ|Aₘ|k⟩` over eigenpairs of `rho`, with pairs
/// involving eigenvalues at or below `floor` skipped.
fn phi_form(rho: &CMatrix, ops: &[CMatrix], floor: f64) -> DMatrix<f64> {
    let (vals, vecs) = linalg::eigh(rho);
    let rotated: Vec<CMatrix> = ops.iter().map(|a| vecs.adjoint() * a * &vecs).collect();
    let n = vals.len();
    let mut kernel = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            if vals[k] > floor && vals[l] > floor {
                kernel[(k, l)] = phi(vals[k], vals[l]);
            }
        }
    }
    let m = ops.len();
    let mut out = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    if kernel[(k, l)] != 0.0 {
                        acc += kernel[(k, l)] * (rotated[b][(k, l)] * rotated[a][(l, k)]).re;
                    }
                }
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc;
        }
    }
    out
}

fn ensure_positive_definite(basis: &OperatorBasis, rho: &DensityMatrix) -> Result<()> {
    let min = basis.min_eigenvalue(rho.mat());
    if min < 1e-14 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(())
}

/// Hessian of the von Neumann entropy in Bloch coordinates,
/// `∂ₘ∂ₙS = −Σ φ(λ_k,λ_ℓ)⟨k|Γₙ|ℓ⟩⟨ℓ|Γₘ|k⟩`.
pub fn entropy_hessian(rho: &DensityMatrix, basis: &OperatorBasis) -> Result<DMatrix<f64>> {
    ensure_positive_definite(basis, rho)?;
    let form = match basis.support() {
        Some(v) => {
            let local: Vec<CMatrix> = basis.gammas().iter().map(|g| linalg::compress(g, v)).collect();
            phi_form(&linalg::compress(rho.mat(), v), &local, 0.0)
        }
        None => phi_form(rho.mat(), basis.gammas(), 0.0),
    };
    Ok(-form)
}

/// Gradient `j` and Hessian `H` of `f` in Bloch coordinates at `pi`.
pub fn build_model(obj: &Type2Objective, pi: &DensityMatrix) -> Result<QuadraticModel> {
    let basis = &obj.basis;
    let s_in = entropy_hessian(pi, basis)?;
    let out = obj.output(pi.mat());
    let s_out = phi_form(&out, &obj.propagated.gamma_primes[1..], OUTPUT_RANK_FLOOR);
    // f = tr(ρ𝒳) + S(ρτ) − S(ρ), so H = ∂²S(ρτ) − ∂²S(ρ) with ∂²S(ρτ) = −s_out
    let h = (-s_out - s_in).scale(obj.scale);
    let h = (&h + h.transpose()).scale(0.5);
    let j = DVector::from_vec(obj.gradient_coords(pi.mat()));
    Ok(QuadraticModel {
        pi: pi.clone(),
        ref_bloch: basis.to_bloch(pi)?,
        j,
        h,
        f_ref: obj.evaluate(pi),
        basis: basis.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct PerturbativeSolution {
    pub state: DensityMatrix,
    /// Model value at the returned state.
    pub value: f64,
    pub epsilon: DVector<f64>,
    /// The full step left the state set and was halved until it fit.
    pub regime_exceeded: bool,
    /// `‖j − H H^# j‖` when it exceeds tolerance: `j` is not in the range of `H`.
    pub out_of_range: Option<f64>,
}

impl QuadraticModel {
    /// `f̃(π) + εᵀj + ½εᵀHε`.
    pub fn predict(&self, eps: &DVector<f64>) -> f64 {
        self.f_ref + eps.dot(&self.j) + 0.5 * eps.dot(&(&self.h * eps))
    }

    /// Group inverse of the symmetric Hessian, dropping eigenvalues below
    /// `1e−10·λ_max`.
    pub fn group_inverse(&self) -> DMatrix<f64> {
        let eig = self.h.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let cutoff = PINV_CUTOFF * lmax;
        let inv = eig.eigenvalues.map(|x| if x.abs() > cutoff { 1.0 / x } else { 0.0 });
        &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.h.clone().symmetric_eigen().eigenvalues.min()
    }

    /// `ρ(π) − (H^# j)·Γ` with value `f̃(π) − ½ jᵀH^# j`.
    pub fn solve_optimal(&self) -> Result<PerturbativeSolution> {
        let hinv = self.group_inverse();
        let hj = &hinv * &self.j;
        let residual = (&self.j - &self.h * &hj).norm();
        let out_of_range = (residual > 1e-8 * self.j.norm().max(1.0)).then_some(residual);
        let mut eps = -hj;
        let mut regime_exceeded = false;
        for _ in 0..200 {
            let coords: Vec<f64> = self.ref_bloch.coords.iter().zip(eps.iter()).map(|(b, e)| b + e).collect();
            let m = linalg::hermitize(&self.basis.matrix_from_coords(&coords));
            if self.basis.min_eigenvalue(&m) >= 0.0 {
                let value = self.predict(&eps);
                let state = DensityMatrix::from_approx(&m)?;
                return Ok(PerturbativeSolution { state, value, epsilon: eps, regime_exceeded, out_of_range });
            }
            eps.scale_mut(0.5);
            regime_exceeded = true;
        }
        Err(Error::NonPhysicalState { min_eigenvalue: self.basis.min_eigenvalue(self.pi.mat()) })
    }
}

#[derive(Serialize)]
pub struct ModelFile {
    pub pi: MatrixRepr,
    pub j: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub f_ref: f64,
}

impl From<&QuadraticModel> for ModelFile {
    fn from(m: &QuadraticModel) -> Self {
        Self {
            pi: MatrixRepr::from_matrix(m.pi.mat()),
            j: m.j.iter().copied().collect(),
            h: real_rows(&m.h),
            f_ref: m.f_ref,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_continuous_at_degeneracy() {
        let a = 0.5 + 1e-12;
        let b = 0.5 - 1e-12;
        assert!((phi(a, b) - 2.0).abs() < 1e-9);
        let a = 0.5 + 1e-8;
        let b = 0.5 - 1e-8;
        assert!((phi(a, b) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn maximally_mixed_entropy_hessian() {
        for d in 2..5 {
            let basis = OperatorBasis::gellmann(d).unwrap();
            let h = entropy_hessian(&DensityMatrix::maximally_mixed(d), &basis).unwrap();
            let expect = DMatrix::<f64>::identity(d * d - 1, d * d - 1).scale(-(d as f64) * basis.eta());
            assert!((h - expect).abs().max() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_reference_rejected() {
        let basis = OperatorBasis::gellmann(2).unwrap();
        let r = entropy_hessian(&DensityMatrix::basis_state(2, 0), &basis);
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }
}
