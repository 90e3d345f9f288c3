//! Dense complex linear algebra helpers shared by every module.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry of `|M - M†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral decomposition of a Hermitian matrix with eigenvalues ascending.
/// The input is Hermitized first.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)].re], identity(1));
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// `V diag(f(λ)) V†` for Hermitian `m`.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    from_spectrum(&vals.iter().map(|&v| f(v)).collect::<Vec<_>>(), &vecs)
}

pub fn from_spectrum(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for i in 0..n {
            let vi = v[i] * lam;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    out
}

/// Smallest eigenvalue kept when taking `ln ρ` of a (possibly singular) state.
pub const LOG_FLOOR: f64 = 1e-300;

/// `ln ρ` with eigenvalues clamped below at [`LOG_FLOOR`].
pub fn log_clamped(m: &CMatrix) -> CMatrix {
    hermitian_fn(m, |x| x.max(LOG_FLOOR).ln())
}

/// Von Neumann entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(rho: &CMatrix) -> f64 {
    entropy_of_spectrum(&eigvalsh(rho))
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

pub fn purity(rho: &CMatrix) -> f64 {
    trace_product(rho, rho).re
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|x| x.abs()).sum()
}

pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * trace_norm(&(a - b))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Projector `|v⟩⟨v| / ⟨v|v⟩`.
pub fn projector(v: &nalgebra::DVector<C64>) -> CMatrix {
    let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (v * v.adjoint()).unscale(n2)
}

/// Multiply a vector by the phase that makes its largest-magnitude entry real
/// and positive.
pub fn fix_phase(v: &mut nalgebra::DVector<C64>) {
    let mut best = ZERO;
    for z in v.iter() {
        if z.norm() > best.norm() * (1.0 + 1e-12) {
            best = *z;
        }
    }
    if best.norm() > 0.0 {
        let phase = best.conj() / best.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Compress `m` onto the subspace spanned by the orthonormal columns of `iso`.
pub fn compress(m: &CMatrix, iso: &CMatrix) -> CMatrix {
    iso.adjoint() * m * iso
}

/// Embed a subspace operator back into the ambient space.
pub fn embed(m: &CMatrix, iso: &CMatrix) -> CMatrix {
    iso * m * iso.adjoint()
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Random density matrix from the Hilbert–Schmidt measure.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let m = &g * g.adjoint();
    let t = trace(&m).re;
    hermitize(&m.unscale(t))
}

/// Haar-random pure state as a density matrix.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, 1, rng);
    projector(&g.column(0).into_owned())
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase correction.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    hermitize(&g)
}

/// `‖U†U - I‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - identity(n)))
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn real_matrix(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigh_is_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(5, &mut rng);
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!(max_abs(&(from_spectrum(&vals, &vecs) - &h)) < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(unitarity_defect(&random_unitary(6, &mut rng)) < 1e-12);
    }

    #[test]
    fn entropy_of_mixed_and_pure() {
        let d = 4;
        let mixed = identity(d).unscale(d as f64);
        assert!((entropy(&mixed) - (d as f64).ln()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(entropy(&random_pure(d, &mut rng)).abs() < 1e-12);
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = ginibre(3, 3, &mut rng);
        let b = ginibre(3, 3, &mut rng);
        assert!((trace_product(&a, &b) - trace(&(&a * &b))).norm() < 1e-12);
    }
}
