mod common;

use proptest::prelude::*;
use thermops_core::devices::{collect_ensemble, Device, ExactOverwrite, RandomChannel};
use thermops_core::linalg;
use thermops_core::tomography::*;
use thermops_core::{DensityMatrix, Error, OperatorBasis};

#[test]
fn stinespring_energy_change_predictions() {
    for d in [2, 3] {
        let basis = OperatorBasis::gellmann(d).unwrap();
        let ch = RandomChannel::new(d, 2, 11 + d as u64).unwrap();
        let mut r = common::rng(d as u64);
        let inputs = random_inputs(&basis, &mut r);
        assert_eq!(inputs.len(), d * d);
        let (ens, _) = collect_ensemble(&ch, &basis, inputs, &[Label::EnergyChange]).unwrap();
        let op = reconstruct_operator(&ens, &Label::EnergyChange).unwrap();
        // direct oracle: 𝒳 = Λ†(H) − H
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let rho = DensityMatrix::random(d, &mut r);
            let direct = ch.run(&rho).unwrap().final_value(&Label::EnergyChange).unwrap();
            worst = worst.max((predict(&op, &rho).unwrap() - direct).abs());
        }
        assert!(worst < 1e-9, "d = {d}: {worst:.3e}");
    }
}

#[test]
fn overwrite_operator_is_recovered() {
    for d in 2..=4 {
        let o = common::overwrite(d, 40 + d as u64);
        let op = reconstruct_operator(&o.ensemble, &Label::Work).unwrap();
        assert!(linalg::max_abs(&(op.mat - &o.device.x)) < 1e-10, "d = {d}");
    }
}

#[test]
fn propagated_basis_reproduces_channel() {
    let (ch, ens, _) = common::channel(3, 2, 5);
    let pb = propagate_basis(&ens).unwrap();
    let mut r = common::rng(77);
    for _ in 0..20 {
        let rho = DensityMatrix::random(3, &mut r);
        let via_basis = pb.output_of_coords(&ens.basis.to_bloch(&rho).unwrap().coords);
        assert!(linalg::max_abs(&(via_basis - ch.apply(rho.mat()))) < 1e-10);
    }
}

#[test]
fn restricted_reconstruction_on_classical_subspace() {
    let d = 4;
    let basis = OperatorBasis::classical(d).unwrap();
    let mut r = common::rng(8);
    let x = linalg::random_hermitian(d, &mut r);
    let dev = ExactOverwrite::new(DensityMatrix::maximally_mixed(d), x.clone(), Label::Heat).unwrap();
    let (ens, _) = collect_ensemble(&dev, &basis, default_inputs(&basis).unwrap(), &[Label::Heat]).unwrap();
    let op = restricted_reconstruct(&ens, &Label::Heat).unwrap();
    for k in 0..d {
        let rho = DensityMatrix::basis_state(d, k);
        assert!((predict(&op, &rho).unwrap() - x[(k, k)].re).abs() < 1e-10);
    }
    // only the diagonal of 𝒳 is visible from classical inputs
    assert!(op.compressed().nrows() == d);
}

#[test]
fn repeated_input_is_reported_with_its_combination() {
    let basis = OperatorBasis::gellmann(2).unwrap();
    let mut inputs = default_inputs(&basis).unwrap();
    inputs[3] = inputs[1].clone();
    match make_ensemble(&basis, inputs) {
        Err(Error::DependentInputs { smallest_singular_value, combination }) => {
            assert!(smallest_singular_value < 1e-10);
            // the null combination lives on rows 1 and 3 with opposite signs
            assert!((combination[1] + combination[3]).abs() < 1e-8);
            assert!(combination[1].abs() > 0.5);
        }
        other => panic!("expected dependent inputs, got {other:?}"),
    }
}

#[test]
fn wrong_number_of_inputs_is_rejected() {
    let basis = OperatorBasis::gellmann(3).unwrap();
    let inputs = vec![DensityMatrix::maximally_mixed(3); 4];
    assert!(matches!(make_ensemble(&basis, inputs), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn ensemble_file_round_trip() {
    let (_, ens, _) = common::channel(2, 2, 3);
    let file = EnsembleFile::from_ensemble(&ens, "gellmann:2");
    let json = serde_json::to_string(&file).unwrap();
    let back: EnsembleFile = serde_json::from_str(&json).unwrap();
    let ens2 = back.into_ensemble().unwrap();
    let a = reconstruct_operator(&ens, &Label::EnergyChange).unwrap();
    let b = reconstruct_operator(&ens2, &Label::EnergyChange).unwrap();
    assert_eq!(a.mat, b.mat);
}

#[test]
fn seeded_noise_degrades_gracefully() {
    let (_, ens, _) = common::channel(2, 2, 4);
    let clean = reconstruct_operator(&ens, &Label::EnergyChange).unwrap();
    let noisy = MeasurementNoise { sigma: 1e-6, seed: 1 }.apply_to(&ens);
    let op = reconstruct_operator(&noisy, &Label::EnergyChange).unwrap();
    let err = linalg::max_abs(&(op.mat - clean.mat));
    assert!(err > 0.0 && err < 1e-6 * ens.condition_number() * 10.0);
}

proptest! {
    #[test]
    fn predictions_are_affine_in_the_input(seed in any::<u64>(), t in 0.0f64..1.0) {
        let (ch, ens, _) = common::channel(3, 2, 21);
        let op = reconstruct_operator(&ens, &Label::EnergyChange).unwrap();
        let mut r = common::rng(seed);
        let (a, b) = (DensityMatrix::random(3, &mut r), DensityMatrix::random(3, &mut r));
        let mixed = predict(&op, &a.mix(&b, t)).unwrap();
        let lin = t * predict(&op, &a).unwrap() + (1.0 - t) * predict(&op, &b).unwrap();
        prop_assert!((mixed - lin).abs() < 1e-12);
        let direct = ch.run(&a).unwrap().final_value(&Label::EnergyChange).unwrap();
        prop_assert!((predict(&op, &a).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn reconstruction_is_input_set_independent(seed in any::<u64>()) {
        let basis = OperatorBasis::gellmann(2).unwrap();
        let ch = RandomChannel::new(2, 2, 99).unwrap();
        let mut r = common::rng(seed);
        let (e1, _) = collect_ensemble(&ch, &basis, random_inputs(&basis, &mut r), &[Label::EnergyChange]).unwrap();
        let (e2, _) = collect_ensemble(&ch, &basis, default_inputs(&basis).unwrap(), &[Label::EnergyChange]).unwrap();
        let a = reconstruct_operator(&e1, &Label::EnergyChange).unwrap();
        let b = reconstruct_operator(&e2, &Label::EnergyChange).unwrap();
        prop_assert!(linalg::max_abs(&(a.mat - b.mat)) < 1e-8 * e1.condition_number().max(1.0));
    }
}
