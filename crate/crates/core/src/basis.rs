//! Generalized Bloch operator bases.
//!
//! A basis is the ordered tuple `(Γ₀, Γ₁, …, Γ_{L−1})` with `Γ₀ = I_P/d_P` and
//! traceless Hermitian `Γₙ` satisfying `tr(ΓₘΓₙ) = η δₘₙ`. Restricted bases are
//! stored as ambient d×d matrices that vanish outside the projected subspace.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, I, ONE, ZERO};
use crate::serde_mat::{from_pairs, to_pairs};
use crate::state::DensityMatrix;

const PROJECTOR_TOL: f64 = 1e-10;
const SUPPORT_TOL: f64 = 1e-10;
const USER_BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub coords: Vec<f64>,
    pub basis_dim: usize,
}

impl BlochVector {
    pub fn new(coords: Vec<f64>, basis_dim: usize) -> Self {
        Self { coords, basis_dim }
    }

    pub fn zeros(len: usize, basis_dim: usize) -> Self {
        Self { coords: vec![0.0; len], basis_dim }
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct OperatorBasis {
    dim: usize,
    eta: f64,
    gammas: Vec<CMatrix>,
    projectors: Vec<CMatrix>,
    /// Orthonormal columns spanning the subspace, adapted to the projectors.
    support: Option<CMatrix>,
    block_sizes: Vec<usize>,
}

impl OperatorBasis {
    /// Scaled generalized Gell-Mann basis: diagonal, then symmetric, then
    /// antisymmetric, off-diagonal pairs in lexicographic order.
    pub fn gellmann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { dim: d, reason: "need d >= 2".into() });
        }
        Ok(Self {
            dim: d,
            eta: (d as f64 - 1.0) / d as f64,
            gammas: gellmann_matrices(d),
            projectors: Vec::new(),
            support: None,
            block_sizes: vec![d],
        })
    }

    /// `(σx, σy, σz)/2`.
    pub fn pauli() -> Self {
        Self {
            dim: 2,
            eta: 0.5,
            gammas: vec![
                linalg::pauli_x().unscale(2.0),
                linalg::pauli_y().unscale(2.0),
                linalg::pauli_z().unscale(2.0),
            ],
            projectors: Vec::new(),
            support: None,
            block_sizes: vec![2],
        }
    }

    /// Basis on the tensor product, ordered `(I⊗Γ′, Γ⊗I, Γ⊗Γ′)`.
    pub fn composite(a: &Self, b: &Self) -> Result<Self> {
        if a.is_restricted() || b.is_restricted() {
            return Err(Error::UnsupportedComposition);
        }
        let (d, dp) = (a.dim, b.dim);
        let dd = d * dp;
        let eta2 = (dd as f64 - 1.0) / dd as f64;
        let id_a = linalg::identity(d);
        let id_b = linalg::identity(dp);
        let mut gammas = Vec::with_capacity(dd * dd - 1);
        let s1 = (eta2 / (b.eta * d as f64)).sqrt();
        gammas.extend(b.gammas.iter().map(|g| linalg::kron(&id_a, g).scale(s1)));
        let s2 = (eta2 / (a.eta * dp as f64)).sqrt();
        gammas.extend(a.gammas.iter().map(|g| linalg::kron(g, &id_b).scale(s2)));
        let s3 = (eta2 / (a.eta * b.eta)).sqrt();
        for ga in &a.gammas {
            gammas.extend(b.gammas.iter().map(|gb| linalg::kron(ga, gb).scale(s3)));
        }
        Ok(Self { dim: dd, eta: eta2, gammas, projectors: Vec::new(), support: None, block_sizes: vec![dd] })
    }

    /// Basis for block-diagonal operators on the span of mutually orthogonal
    /// projectors. Elements: the diagonal Gell-Mann matrices over the whole
    /// adapted basis, then for each block its symmetric and antisymmetric ones.
    pub fn restricted(projectors: &[CMatrix]) -> Result<Self> {
        let (support, block_sizes) = adapted_basis(projectors)?;
        let dim = support.nrows();
        let dp: usize = block_sizes.iter().sum();
        if dp < 2 {
            return Err(Error::InvalidDimension { dim: dp, reason: "subspace dimension must be >= 2".into() });
        }
        let n = (((dp - 1) as f64) / (2.0 * dp as f64)).sqrt();
        let mut local = Vec::new();
        for l in 1..dp {
            local.push(diagonal_gellmann(dp, l).scale(n));
        }
        let mut offset = 0;
        for &size in &block_sizes {
            let pairs: Vec<(usize, usize)> = (0..size)
                .flat_map(|j| (j + 1..size).map(move |k| (j, k)))
                .map(|(j, k)| (offset + j, offset + k))
                .collect();
            local.extend(pairs.iter().map(|&(j, k)| symmetric_unit(dp, j, k).scale(n)));
            local.extend(pairs.iter().map(|&(j, k)| antisymmetric_unit(dp, j, k).scale(n)));
            offset += size;
        }
        let gammas = local.iter().map(|g| linalg::hermitize(&linalg::embed(g, &support))).collect();
        Ok(Self {
            dim,
            eta: (dp as f64 - 1.0) / dp as f64,
            gammas,
            projectors: projectors.to_vec(),
            support: Some(support),
            block_sizes,
        })
    }

    /// Basis for the diagonal (classical) states of a d-level system.
    pub fn classical(d: usize) -> Result<Self> {
        let projectors: Vec<CMatrix> = (0..d).map(|k| DensityMatrix::basis_state(d, k).into_inner()).collect();
        Self::restricted(&projectors)
    }

    /// A user-supplied full-space basis, validated for tracelessness and
    /// orthogonality with a common normalization.
    pub fn from_gammas(dim: usize, gammas: Vec<CMatrix>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, reason: "need d >= 2".into() });
        }
        if gammas.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch { expected: dim * dim - 1, found: gammas.len() });
        }
        let basis = Self {
            dim,
            eta: (dim as f64 - 1.0) / dim as f64,
            gammas,
            projectors: Vec::new(),
            support: None,
            block_sizes: vec![dim],
        };
        let dev = basis.max_deviation();
        if dev > USER_BASIS_TOL {
            return Err(Error::InvalidBasis(format!("orthogonality/tracelessness deviation {dev:.3e}")));
        }
        Ok(basis)
    }

    /// `UΓₙU†` for every element; another valid basis for the same space.
    pub fn rotated(&self, u: &CMatrix) -> Result<Self> {
        let dev = linalg::unitarity_defect(u);
        if dev > 1e-10 {
            return Err(Error::InvalidPropagator { deviation: dev });
        }
        let conj = |m: &CMatrix| linalg::hermitize(&(u * m * u.adjoint()));
        Ok(Self {
            dim: self.dim,
            eta: self.eta,
            gammas: self.gammas.iter().map(conj).collect(),
            projectors: self.projectors.iter().map(conj).collect(),
            support: self.support.as_ref().map(|s| u * s),
            block_sizes: self.block_sizes.clone(),
        })
    }

    /// Ambient Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the (sub)space the basis spans states of.
    pub fn subspace_dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn support(&self) -> Option<&CMatrix> {
        self.support.as_ref()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn is_restricted(&self) -> bool {
        self.support.is_some()
    }

    /// L, the number of linearly independent states (including the reference).
    pub fn len(&self) -> usize {
        self.gammas.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Γ₀ = I_P/d_P`.
    pub fn reference(&self) -> CMatrix {
        self.identity_p().unscale(self.subspace_dim() as f64)
    }

    pub fn reference_state(&self) -> DensityMatrix {
        DensityMatrix::from_approx(&self.reference()).expect("reference state is physical")
    }

    /// Identity on the subspace (`I` for a full basis).
    pub fn identity_p(&self) -> CMatrix {
        match &self.support {
            Some(v) => v * v.adjoint(),
            None => linalg::identity(self.dim),
        }
    }

    /// Largest violation of tracelessness, Hermiticity and `tr(ΓₘΓₙ) = ηδₘₙ`.
    pub fn max_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (m, gm) in self.gammas.iter().enumerate() {
            dev = dev.max(linalg::trace(gm).norm());
            dev = dev.max(linalg::hermiticity_defect(gm));
            for (n, gn) in self.gammas.iter().enumerate().skip(m) {
                let target = if m == n { self.eta } else { 0.0 };
                dev = dev.max((linalg::trace_product(gm, gn) - C64::new(target, 0.0)).norm());
            }
        }
        dev
    }

    /// `‖ρ − Σ ΠⱼρΠⱼ‖_max`; zero for full bases.
    pub fn subspace_deviation(&self, m: &CMatrix) -> f64 {
        if self.projectors.is_empty() {
            return 0.0;
        }
        let pinched = self.pinch(m);
        linalg::max_abs(&(m - pinched))
    }

    /// `Σ ΠⱼmΠⱼ`.
    pub fn pinch(&self, m: &CMatrix) -> CMatrix {
        if self.projectors.is_empty() {
            return m.clone();
        }
        self.projectors.iter().fold(CMatrix::zeros(self.dim, self.dim), |acc, p| acc + p * m * p)
    }

    fn check_dim(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.nrows() });
        }
        Ok(())
    }

    /// `bₙ = tr(ΓₙM)/η` for any operator (no physicality or support check).
    pub fn coords_of(&self, m: &CMatrix) -> Vec<f64> {
        self.gammas.iter().map(|g| linalg::trace_product(g, m).re / self.eta).collect()
    }

    pub fn to_bloch(&self, rho: &DensityMatrix) -> Result<BlochVector> {
        self.check_dim(rho.mat())?;
        let deviation = self.subspace_deviation(rho.mat());
        if deviation >= SUPPORT_TOL {
            return Err(Error::OutOfSubspace { deviation });
        }
        Ok(BlochVector::new(self.coords_of(rho.mat()), self.dim))
    }

    /// `Γ₀ + Σ bₙΓₙ` as a raw matrix.
    pub fn matrix_from_coords(&self, b: &[f64]) -> CMatrix {
        let mut m = self.reference();
        for (g, &c) in self.gammas.iter().zip(b) {
            if c != 0.0 {
                m += g.scale(c);
            }
        }
        m
    }

    /// `Σ cₙΓₙ` (no reference term).
    pub fn combine(&self, c: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (g, &x) in self.gammas.iter().zip(c) {
            m += g.scale(x);
        }
        m
    }

    pub fn from_bloch(&self, b: &BlochVector) -> Result<DensityMatrix> {
        if b.len() != self.gammas.len() {
            return Err(Error::DimensionMismatch { expected: self.gammas.len(), found: b.len() });
        }
        let m = linalg::hermitize(&self.matrix_from_coords(&b.coords));
        let min = self.min_eigenvalue(&m);
        if min < crate::state::PSD_TOL {
            return Err(Error::NonPhysicalState { min_eigenvalue: min });
        }
        DensityMatrix::from_approx(&m)
    }

    /// Smallest eigenvalue of `m` restricted to the subspace.
    pub fn min_eigenvalue(&self, m: &CMatrix) -> f64 {
        match &self.support {
            Some(v) => linalg::eigvalsh(&linalg::compress(m, v))[0],
            None => linalg::eigvalsh(m)[0],
        }
    }

    /// `(d_P tr ρ² − 1)/(d_P − 1)` square-rooted: the Bloch length of a state.
    pub fn bloch_length_from_purity(&self, purity: f64) -> f64 {
        let dp = self.subspace_dim() as f64;
        ((purity * dp - 1.0) / (dp - 1.0)).max(0.0).sqrt()
    }

    /// Hilbert–Schmidt random state supported on the subspace (block-diagonal).
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> DensityMatrix {
        match &self.support {
            None => DensityMatrix::random(self.dim, rng),
            Some(v) => {
                let local = linalg::random_density(v.ncols(), rng);
                let m = self.pinch(&linalg::embed(&local, v));
                DensityMatrix::from_approx(&m).expect("pinched state is physical")
            }
        }
    }

    /// Haar-random pure state in the subspace; for several blocks, a pure
    /// state of a randomly chosen block.
    pub fn random_pure_state<R: Rng + ?Sized>(&self, rng: &mut R) -> DensityMatrix {
        match &self.support {
            None => DensityMatrix::random_pure(self.dim, rng),
            Some(v) => {
                let block = rng.random_range(0..self.block_sizes.len());
                let offset: usize = self.block_sizes[..block].iter().sum();
                let size = self.block_sizes[block];
                let g = linalg::ginibre(size, 1, rng);
                let cols = v.columns(offset, size);
                let psi = cols * g.column(0);
                DensityMatrix::pure(&psi)
            }
        }
    }
}

fn diagonal_gellmann(d: usize, l: usize) -> CMatrix {
    let c = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
    let mut m = CMatrix::zeros(d, d);
    for j in 0..l {
        m[(j, j)] = C64::new(c, 0.0);
    }
    m[(l, l)] = C64::new(-(l as f64) * c, 0.0);
    m
}

fn symmetric_unit(d: usize, j: usize, k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(j, k)] = ONE;
    m[(k, j)] = ONE;
    m
}

fn antisymmetric_unit(d: usize, j: usize, k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(j, k)] = -I;
    m[(k, j)] = I;
    m
}

fn gellmann_matrices(d: usize) -> Vec<CMatrix> {
    let n = ((d as f64 - 1.0) / (2.0 * d as f64)).sqrt();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    (1..d)
        .map(|l| diagonal_gellmann(d, l))
        .chain(pairs.iter().map(|&(j, k)| symmetric_unit(d, j, k)))
        .chain(pairs.iter().map(|&(j, k)| antisymmetric_unit(d, j, k)))
        .map(|m| m.scale(n))
        .collect()
}

/// Orthonormal columns spanning each projector in turn (pivoted Gram–Schmidt
/// on the projector's own columns), concatenated.
pub(crate) fn adapted_basis(projectors: &[CMatrix]) -> Result<(CMatrix, Vec<usize>)> {
    let first = projectors.first().ok_or_else(|| Error::InvalidProjector("empty projector list".into()))?;
    let d = first.nrows();
    let mut sizes = Vec::with_capacity(projectors.len());
    for (j, p) in projectors.iter().enumerate() {
        if p.nrows() != d || p.ncols() != d {
            return Err(Error::InvalidProjector(format!("projector {j} has shape {}x{}", p.nrows(), p.ncols())));
        }
        if linalg::hermiticity_defect(p) > PROJECTOR_TOL {
            return Err(Error::InvalidProjector(format!("projector {j} is not Hermitian")));
        }
        if linalg::max_abs(&(p * p - p)) > PROJECTOR_TOL {
            return Err(Error::InvalidProjector(format!("projector {j} is not idempotent")));
        }
        for (k, q) in projectors.iter().enumerate().skip(j + 1) {
            if q.nrows() == d && linalg::max_abs(&(p * q)) > PROJECTOR_TOL {
                return Err(Error::InvalidProjector(format!("projectors {j} and {k} are not orthogonal")));
            }
        }
        let tr = linalg::trace(p).re;
        let rank = tr.round();
        if (tr - rank).abs() > 1e-8 || rank < 1.0 {
            return Err(Error::InvalidProjector(format!("projector {j} has trace {tr}")));
        }
        sizes.push(rank as usize);
    }
    let total: usize = sizes.iter().sum();
    if total > d {
        return Err(Error::InvalidProjector(format!("ranks sum to {total} > {d}")));
    }
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(total);
    for (p, &rank) in projectors.iter().zip(&sizes) {
        let mut residual = p.clone();
        for _ in 0..rank {
            let (best, norm) =
                (0..d)
                    .map(|c| (c, residual.column(c).norm()))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if norm < 1e-8 {
                return Err(Error::InvalidProjector("projector rank below its trace".into()));
            }
            let mut v = residual.column(best).unscale(norm);
            // reorthogonalize against everything kept so far
            for u in &cols {
                let ov = u.dotc(&v);
                v -= u * ov;
            }
            let nv = v.norm();
            v.unscale_mut(nv);
            let outer = &v * v.adjoint();
            residual -= &outer * &residual;
            cols.push(v);
        }
    }
    let mut support = CMatrix::from_element(d, total, ZERO);
    for (k, c) in cols.iter().enumerate() {
        support.set_column(k, c);
    }
    Ok((support, sizes))
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    dim: usize,
    eta: f64,
    gammas: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    projectors: Vec<Vec<[f64; 2]>>,
}

impl From<OperatorBasis> for BasisRepr {
    fn from(b: OperatorBasis) -> Self {
        Self {
            dim: b.dim,
            eta: b.eta,
            gammas: b.gammas.iter().map(to_pairs).collect(),
            projectors: b.projectors.iter().map(to_pairs).collect(),
        }
    }
}

impl TryFrom<BasisRepr> for OperatorBasis {
    type Error = Error;
    fn try_from(r: BasisRepr) -> Result<Self> {
        let gammas = r.gammas.iter().map(|g| from_pairs(r.dim, g)).collect::<Result<Vec<_>>>()?;
        let projectors = r.projectors.iter().map(|p| from_pairs(r.dim, p)).collect::<Result<Vec<_>>>()?;
        let (support, block_sizes) = if projectors.is_empty() {
            (None, vec![r.dim])
        } else {
            let (s, b) = adapted_basis(&projectors)?;
            (Some(s), b)
        };
        let basis = Self { dim: r.dim, eta: r.eta, gammas, projectors, support, block_sizes };
        let expected = basis.block_sizes.iter().map(|b| b * b).sum::<usize>() - 1;
        if basis.gammas.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: basis.gammas.len() });
        }
        let dev = basis.max_deviation();
        if dev > USER_BASIS_TOL {
            return Err(Error::InvalidBasis(format!("orthogonality/tracelessness deviation {dev:.3e}")));
        }
        Ok(basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_gellmann_is_half_paulis() {
        let b = OperatorBasis::gellmann(2).unwrap();
        assert_eq!(b.eta(), 0.5);
        let expect = [linalg::pauli_z(), linalg::pauli_x(), linalg::pauli_y()];
        for (g, s) in b.gammas().iter().zip(&expect) {
            assert!(linalg::max_abs(&(g - s.unscale(2.0))) < 1e-15);
        }
    }

    #[test]
    fn gellmann_d4_norms() {
        let b = OperatorBasis::gellmann(4).unwrap();
        assert_eq!(b.gammas().len(), 15);
        for g in b.gammas() {
            assert!((linalg::trace_product(g, g).re - 0.75).abs() < 1e-14);
        }
    }

    #[test]
    fn dimension_one_is_rejected() {
        assert!(matches!(OperatorBasis::gellmann(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn pauli_bloch_of_ground_state() {
        let b = OperatorBasis::pauli();
        let v = b.to_bloch(&DensityMatrix::basis_state(2, 0)).unwrap();
        assert_eq!(v.coords, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn composite_qubit_qutrit_counts() {
        let q = OperatorBasis::gellmann(2).unwrap();
        let t = OperatorBasis::gellmann(3).unwrap();
        let c = OperatorBasis::composite(&q, &t).unwrap();
        assert_eq!(c.gammas().len(), 35);
        assert!(c.max_deviation() < 1e-12);
        let r = OperatorBasis::classical(3).unwrap();
        assert!(matches!(OperatorBasis::composite(&q, &r), Err(Error::UnsupportedComposition)));
    }

    #[test]
    fn classical_basis_is_diagonal_gellmann() {
        let d = 5;
        let r = OperatorBasis::classical(d).unwrap();
        let g = OperatorBasis::gellmann(d).unwrap();
        assert_eq!(r.len(), d);
        for (a, b) in r.gammas().iter().zip(g.gammas()) {
            assert!(linalg::max_abs(&(a - b)) < 1e-15);
        }
    }

    #[test]
    fn two_plus_one_blocks() {
        let mut p1 = CMatrix::zeros(3, 3);
        p1[(0, 0)] = ONE;
        p1[(1, 1)] = ONE;
        let mut p2 = CMatrix::zeros(3, 3);
        p2[(2, 2)] = ONE;
        let r = OperatorBasis::restricted(&[p1.clone(), p2]).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.max_deviation() < 1e-12);
        let mut bad = p1.clone();
        bad[(1, 2)] = C64::new(0.5, 0.0);
        bad[(2, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(OperatorBasis::restricted(&[p1, bad]), Err(Error::InvalidProjector(_))));
    }

    #[test]
    fn restricted_rejects_coherent_state() {
        let r = OperatorBasis::classical(2).unwrap();
        let plus = DensityMatrix::pure(&nalgebra::dvector![ONE, ONE]);
        assert!(matches!(r.to_bloch(&plus), Err(Error::OutOfSubspace { .. })));
    }

    #[test]
    fn nonphysical_vector_reports_eigenvalue() {
        let b = OperatorBasis::gellmann(3).unwrap();
        // Γ₂ = diag(1, 1, −2)/3, so b = 1 along it leaves −1/3 on level 2
        let v = BlochVector::new(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 3);
        match b.from_bloch(&v) {
            Err(Error::NonPhysicalState { min_eigenvalue }) => {
                assert!((min_eigenvalue + 1.0 / 3.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = linalg::random_unitary(3, &mut rng);
        let b = OperatorBasis::gellmann(3).unwrap().rotated(&u).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: OperatorBasis = serde_json::from_str(&s).unwrap();
        assert_eq!(b.gammas(), back.gammas());
        assert_eq!(b.eta().to_bits(), back.eta().to_bits());

        let r = OperatorBasis::classical(4).unwrap();
        let back: OperatorBasis = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(r, back);
    }
}
