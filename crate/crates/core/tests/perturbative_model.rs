mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use thermops_core::perturbative::*;
use thermops_core::type2::qubit_overwriting_minimizer;
use thermops_core::DensityMatrix;

#[test]
fn linear_term_is_the_objective_gradient() {
    let (_, _, obj) = common::channel(3, 2, 1);
    let pi = DensityMatrix::random(3, &mut common::rng(2)).mix(&DensityMatrix::maximally_mixed(3), 0.5);
    let model = build_model(&obj, &pi).unwrap();
    let g = obj.gradient_coords(pi.mat());
    for (a, b) in model.j.iter().zip(&g) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn hessian_matches_differentiated_gradient() {
    for (d, seed) in [(2, 3), (3, 4)] {
        let (_, _, obj) = common::channel(d, 2, seed);
        let pi = DensityMatrix::random(d, &mut common::rng(seed)).mix(&DensityMatrix::maximally_mixed(d), 0.5);
        let model = build_model(&obj, &pi).unwrap();
        let b = obj.basis.coords_of(pi.mat());
        let h = 1e-5;
        let scale = model.h.amax();
        for n in 0..b.len() {
            let mut plus = b.clone();
            let mut minus = b.clone();
            plus[n] += h;
            minus[n] -= h;
            let gp = obj.gradient_coords(&obj.basis.matrix_from_coords(&plus));
            let gm = obj.gradient_coords(&obj.basis.matrix_from_coords(&minus));
            for m in 0..b.len() {
                let fd = (gp[m] - gm[m]) / (2.0 * h);
                assert!((fd - model.h[(m, n)]).abs() < 1e-4 * scale, "d = {d}, ({m},{n}): {fd} vs {}", model.h[(m, n)]);
            }
        }
        assert!(model.min_eigenvalue() > -1e-10);
    }
}

#[test]
fn small_qubit_overwrite_is_solved_to_leading_order() {
    let x = [0.06, -0.05, 0.058];
    let o = common::overwrite_with(DensityMatrix::maximally_mixed(2), common::pauli_combination(x));
    let model = build_model(&o.objective, &DensityMatrix::maximally_mixed(2)).unwrap();
    let sol = model.solve_optimal().unwrap();
    assert!(!sol.regime_exceeded);
    assert!(sol.out_of_range.is_none());
    let exact = qubit_overwriting_minimizer(x);
    assert!(sol.state.trace_distance(&exact) < 1e-2 * 0.1);
    assert!((sol.value - o.objective.evaluate(&exact)).abs() < 1e-3);
}

#[test]
fn rank_one_output_channel_has_a_singular_direction() {
    // overwrite onto a pure state: the output entropy is constant
    let o = common::overwrite_with(DensityMatrix::basis_state(2, 0), common::pauli_combination([0.0, 0.0, 0.3]));
    let model = build_model(&o.objective, &DensityMatrix::maximally_mixed(2)).unwrap();
    // H = −∂²S(ρ) which is positive definite at I/2
    assert!(model.min_eigenvalue() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn model_is_accurate_to_second_order(seed in any::<u64>()) {
        let (_, _, obj) = common::channel(2, 2, 7);
        let mut r = common::rng(seed);
        let pi = DensityMatrix::random(2, &mut r).mix(&DensityMatrix::maximally_mixed(2), 0.3);
        let model = build_model(&obj, &pi).unwrap();
        let dir = DVector::from_vec(vec![0.3, -0.2, 0.1]);
        let errs: Vec<f64> = [1e-2, 5e-3].iter().map(|&s| {
            let eps = dir.scale(s);
            let coords: Vec<f64> = model.ref_bloch.coords.iter().zip(eps.iter()).map(|(b, e)| b + e).collect();
            (obj.raw_value(&obj.basis.matrix_from_coords(&coords)) - model.predict(&eps)).abs()
        }).collect();
        // third-order remainder shrinks by about eight when the step halves
        prop_assert!(errs[1] <= errs[0] / 4.0 + 1e-13);
    }

    #[test]
    fn entropy_hessian_is_negative_definite(seed in any::<u64>(), d in 2usize..5) {
        let basis = thermops_core::OperatorBasis::gellmann(d).unwrap();
        let rho = DensityMatrix::random(d, &mut common::rng(seed)).mix(&DensityMatrix::maximally_mixed(d), 0.9);
        let h = entropy_hessian(&rho, &basis).unwrap();
        prop_assert!(h.symmetric_eigen().eigenvalues.max() < 0.0);
    }
}
