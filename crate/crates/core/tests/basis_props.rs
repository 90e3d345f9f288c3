mod common;

use proptest::prelude::*;
use thermops_core::linalg::{self, CMatrix};
use thermops_core::{DensityMatrix, OperatorBasis};

fn orthogonality_error(basis: &OperatorBasis) -> f64 {
    let g = basis.gammas();
    let mut worst = 0.0_f64;
    for (m, a) in g.iter().enumerate() {
        worst = worst.max(linalg::trace(a).norm());
        for (n, b) in g.iter().enumerate() {
            let expect = if m == n { basis.eta() } else { 0.0 };
            worst = worst.max((linalg::trace_product(a, b) - linalg::C64::new(expect, 0.0)).norm());
        }
    }
    worst
}

#[test]
fn gellmann_bases_are_orthogonal_and_traceless() {
    for d in 2..=8 {
        let b = OperatorBasis::gellmann(d).unwrap();
        assert_eq!(b.gammas().len(), d * d - 1);
        assert!((b.eta() - (d as f64 - 1.0) / d as f64).abs() < 1e-15);
        assert!(orthogonality_error(&b) < 1e-12, "d = {d}");
        assert!(b.gammas().iter().all(|g| linalg::hermiticity_defect(g) == 0.0));
    }
}

#[test]
fn qubit_pair_composite_basis() {
    let p = OperatorBasis::pauli();
    let c = OperatorBasis::composite(&p, &p).unwrap();
    assert_eq!(c.dim(), 4);
    assert_eq!(c.gammas().len(), 15);
    assert!(orthogonality_error(&c) < 1e-12);
    // first block is I ⊗ Γ′
    let expect = linalg::kron(&linalg::identity(2), &p.gammas()[0]);
    let ratio = linalg::trace_product(&c.gammas()[0], &expect).re / linalg::trace_product(&expect, &expect).re;
    assert!(linalg::max_abs(&(c.gammas()[0].clone() - expect.scale(ratio))) < 1e-14);
}

#[test]
fn classical_basis_has_d_minus_one_elements() {
    for d in 2..=6 {
        let b = OperatorBasis::classical(d).unwrap();
        assert_eq!(b.gammas().len(), d - 1);
        assert!(orthogonality_error(&b) < 1e-12);
        for g in b.gammas() {
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        assert!(g[(i, j)].norm() < 1e-15);
                    }
                }
            }
        }
    }
}

#[test]
fn restricted_basis_on_rotated_blocks() {
    let mut r = common::rng(3);
    let u = linalg::random_unitary(5, &mut r);
    let col = |k: usize| u.column(k).into_owned();
    let p1 = linalg::projector(&col(0)) + linalg::projector(&col(1));
    let p2 = linalg::projector(&col(2)) + linalg::projector(&col(3)) + linalg::projector(&col(4));
    let b = OperatorBasis::restricted(&[p1, p2]).unwrap();
    // traceless generators inside each block plus one relative weight
    assert_eq!(b.gammas().len(), 3 + 8 + 1);
    assert!(orthogonality_error(&b) < 1e-12);
    for _ in 0..20 {
        let rho = b.random_state(&mut r);
        let v = b.to_bloch(&rho).unwrap();
        assert!(rho.trace_distance(&b.from_bloch(&v).unwrap()) < 1e-12);
    }
}

#[test]
fn off_subspace_state_is_rejected() {
    let b = OperatorBasis::classical(3).unwrap();
    let mut r = common::rng(9);
    let rho = DensityMatrix::random_pure(3, &mut r);
    assert!(b.to_bloch(&rho).is_err());
}

#[test]
fn round_trips_over_many_random_states() {
    for d in 2..=4 {
        let basis = OperatorBasis::gellmann(d).unwrap();
        let mut r = common::rng(d as u64);
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            let rho = DensityMatrix::random(d, &mut r);
            let v = basis.to_bloch(&rho).unwrap();
            let back = basis.from_bloch(&v).unwrap();
            worst = worst.max(linalg::max_abs(&(back.mat() - rho.mat())));
            let len = basis.bloch_length_from_purity(rho.purity());
            worst = worst.max((len - v.norm()).abs());
        }
        assert!(worst < 1e-11, "d = {d}: {worst:.3e}");
    }
}

fn state_strategy(d: usize) -> impl Strategy<Value = DensityMatrix> {
    any::<u64>().prop_map(move |s| DensityMatrix::random(d, &mut common::rng(s)))
}

proptest! {
    #[test]
    fn bloch_round_trip(rho in (2usize..6).prop_flat_map(state_strategy)) {
        let basis = OperatorBasis::gellmann(rho.dim()).unwrap();
        let back = basis.from_bloch(&basis.to_bloch(&rho).unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(back.mat() - rho.mat())) < 1e-12);
    }

    #[test]
    fn purity_fixes_bloch_length(rho in (2usize..6).prop_flat_map(state_strategy)) {
        let basis = OperatorBasis::gellmann(rho.dim()).unwrap();
        let v = basis.to_bloch(&rho).unwrap();
        prop_assert!((basis.bloch_length_from_purity(rho.purity()) - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn pure_states_sit_on_the_outer_sphere(seed in any::<u64>(), d in 2usize..6) {
        let basis = OperatorBasis::gellmann(d).unwrap();
        let rho = DensityMatrix::random_pure(d, &mut common::rng(seed));
        let v = basis.to_bloch(&rho).unwrap();
        prop_assert!((v.norm() - basis.bloch_length_from_purity(1.0)).abs() < 1e-12);
    }

    #[test]
    fn coordinates_are_linear(seed in any::<u64>(), t in 0.0f64..1.0) {
        let basis = OperatorBasis::gellmann(3).unwrap();
        let mut r = common::rng(seed);
        let (a, b) = (DensityMatrix::random(3, &mut r), DensityMatrix::random(3, &mut r));
        let va = basis.to_bloch(&a).unwrap();
        let vb = basis.to_bloch(&b).unwrap();
        let vm = basis.to_bloch(&a.mix(&b, t)).unwrap();
        for k in 0..vm.len() {
            prop_assert!((vm.coords[k] - (t * va.coords[k] + (1.0 - t) * vb.coords[k])).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_is_exact(rho in (2usize..5).prop_flat_map(state_strategy)) {
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, rho);
    }

    #[test]
    fn rotated_basis_stays_valid(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let u = linalg::random_unitary(3, &mut r);
        let b = OperatorBasis::gellmann(3).unwrap().rotated(&u).unwrap();
        prop_assert!(orthogonality_error(&b) < 1e-12);
        let rho = DensityMatrix::random(3, &mut r);
        let back = b.from_bloch(&b.to_bloch(&rho).unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(back.mat() - rho.mat())) < 1e-12);
    }
}

#[test]
fn nonphysical_vector_is_reported() {
    let basis = OperatorBasis::gellmann(2).unwrap();
    let v = thermops_core::BlochVector::new(vec![0.0, 0.0, 3.0], 2);
    assert!(matches!(basis.from_bloch(&v), Err(thermops_core::Error::NonPhysicalState { .. })));
    let _: CMatrix = basis.matrix_from_coords(&v.coords);
}
