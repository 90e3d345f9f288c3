#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermops_core::devices::{collect_ensemble, ExactOverwrite, RandomChannel};
use thermops_core::linalg::{self, CMatrix};
use thermops_core::tomography::{default_inputs, Label, TestEnsemble};
use thermops_core::type2::Type2Objective;
use thermops_core::{DensityMatrix, OperatorBasis};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Overwrite {
    pub device: ExactOverwrite,
    pub ensemble: TestEnsemble,
    pub objective: Type2Objective,
}

/// Exact-overwrite device with random `r_τ` and `𝒳`, reconstructed through
/// the default inputs.
pub fn overwrite(d: usize, seed: u64) -> Overwrite {
    let mut r = rng(seed);
    let x = linalg::random_hermitian(d, &mut r);
    let r_tau = DensityMatrix::random(d, &mut r);
    overwrite_with(r_tau, x)
}

pub fn overwrite_with(r_tau: DensityMatrix, x: CMatrix) -> Overwrite {
    let d = r_tau.dim();
    let basis = OperatorBasis::gellmann(d).unwrap();
    let device = ExactOverwrite::new(r_tau, x, Label::Work).unwrap();
    let (ensemble, _) = collect_ensemble(&device, &basis, default_inputs(&basis).unwrap(), &[Label::Work]).unwrap();
    let objective = Type2Objective::from_ensemble(&ensemble, &Label::Work, 1.0).unwrap();
    Overwrite { device, ensemble, objective }
}

/// Random Stinespring channel objective with the energy-change operator.
pub fn channel(d: usize, env: usize, seed: u64) -> (RandomChannel, TestEnsemble, Type2Objective) {
    let basis = OperatorBasis::gellmann(d).unwrap();
    let device = RandomChannel::new(d, env, seed).unwrap();
    let (ens, _) = collect_ensemble(&device, &basis, default_inputs(&basis).unwrap(), &[Label::EnergyChange]).unwrap();
    let obj = Type2Objective::from_ensemble(&ens, &Label::EnergyChange, 1.0).unwrap();
    (device, ens, obj)
}

pub fn pauli_combination(x: [f64; 3]) -> CMatrix {
    linalg::pauli_x().scale(x[0]) + linalg::pauli_y().scale(x[1]) + linalg::pauli_z().scale(x[2])
}
