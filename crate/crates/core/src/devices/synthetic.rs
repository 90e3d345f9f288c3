//! Synthetic devices with known answers, used as oracles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::devices::{Device, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::DensityMatrix;
use crate::tomography::Label;

fn two_point(rho0: &DensityMatrix, out: DensityMatrix) -> Trajectory {
    Trajectory {
        times: vec![0.0, 1.0],
        states: vec![rho0.clone(), out],
        work: vec![0.0; 2],
        heat: vec![0.0; 2],
        entropy_flow: vec![0.0; 2],
        ..Default::default()
    }
}

/// Maps every input to `r_tau` and reports `tr(ρ₀X)` under `label`.
#[derive(Debug, Clone)]
pub struct ExactOverwrite {
    pub r_tau: DensityMatrix,
    pub x: CMatrix,
    pub label: Label,
}

impl ExactOverwrite {
    pub fn new(r_tau: DensityMatrix, x: CMatrix, label: Label) -> Result<Self> {
        if x.nrows() != r_tau.dim() {
            return Err(Error::DimensionMismatch { expected: r_tau.dim(), found: x.nrows() });
        }
        let deviation = linalg::hermiticity_defect(&x);
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { r_tau, x: linalg::hermitize(&x), label })
    }
}

impl Device for ExactOverwrite {
    fn name(&self) -> &str {
        "exact_overwrite"
    }

    fn input_dim(&self) -> usize {
        self.r_tau.dim()
    }

    fn labels(&self) -> Vec<Label> {
        vec![self.label.clone()]
    }

    fn run(&self, rho0: &DensityMatrix) -> Result<Trajectory> {
        if rho0.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), found: rho0.dim() });
        }
        let mut t = two_point(rho0, self.r_tau.clone());
        t.extra.insert(self.label.clone(), rho0.expect(&self.x));
        Ok(t)
    }
}

/// Stinespring channel `ρ ↦ tr_E[U(ρ⊗|0⟩⟨0|)U†]` with a Haar-random `U`,
/// reporting the energy change of a random Hamiltonian `H`.
#[derive(Debug, Clone)]
pub struct RandomChannel {
    pub d: usize,
    pub env_dim: usize,
    pub unitary: CMatrix,
    pub hamiltonian: CMatrix,
}

impl RandomChannel {
    pub fn new(d: usize, env_dim: usize, seed: u64) -> Result<Self> {
        if d < 2 || env_dim < 1 {
            return Err(Error::InvalidDimension { dim: d, reason: "need d >= 2 and env_dim >= 1".into() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unitary = linalg::random_unitary(d * env_dim, &mut rng);
        let hamiltonian = linalg::random_hermitian(d, &mut rng);
        Ok(Self { d, env_dim, unitary, hamiltonian })
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let e = self.env_dim;
        let mut env = CMatrix::zeros(e, e);
        env[(0, 0)] = linalg::ONE;
        let joint = &self.unitary * linalg::kron(rho, &env) * self.unitary.adjoint();
        let mut out = CMatrix::zeros(self.d, self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                out[(i, j)] = (0..e).map(|k| joint[(i * e + k, j * e + k)]).sum();
            }
        }
        linalg::hermitize(&out)
    }
}

impl Device for RandomChannel {
    fn name(&self) -> &str {
        "random_channel"
    }

    fn input_dim(&self) -> usize {
        self.d
    }

    fn labels(&self) -> Vec<Label> {
        vec![Label::EnergyChange]
    }

    fn run(&self, rho0: &DensityMatrix) -> Result<Trajectory> {
        if rho0.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: rho0.dim() });
        }
        let out = DensityMatrix::from_approx(&self.apply(rho0.mat()))?;
        let de = out.expect(&self.hamiltonian) - rho0.expect(&self.hamiltonian);
        let mut t = two_point(rho0, out);
        t.extra.insert(Label::EnergyChange, de);
        Ok(t)
    }
}
