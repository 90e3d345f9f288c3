mod common;

use thermops_core::devices::{collect_ensemble, Device, QubitReset};
use thermops_core::tomography::{default_inputs, predict, reconstruct_operator, Label};
use thermops_core::{DensityMatrix, OperatorBasis};

#[test]
fn first_law_holds_at_every_record() {
    let dev = QubitReset::default();
    let mut r = common::rng(1);
    for _ in 0..5 {
        let t = dev.run(&DensityMatrix::random(2, &mut r)).unwrap();
        for i in 0..t.len() {
            let de = t.energy[i] - t.energy[0];
            assert!((t.work[i] + t.heat[i] - de).abs() < 1e-12, "record {i}");
        }
    }
}

#[test]
fn halving_the_step_changes_little() {
    let coarse = QubitReset::default();
    let fine = QubitReset { steps: 2 * coarse.steps, ..coarse.clone() };
    let mut r = common::rng(2);
    for _ in 0..3 {
        let rho = DensityMatrix::random(2, &mut r);
        let (a, b) = (coarse.run(&rho).unwrap(), fine.run(&rho).unwrap());
        for label in [Label::Work, Label::Heat] {
            let (x, y) = (a.final_value(&label).unwrap(), b.final_value(&label).unwrap());
            assert!((x - y).abs() < 1e-6, "{label:?}: {x} vs {y}");
        }
        assert!(a.final_state().trace_distance(b.final_state()) < 1e-6);
    }
}

#[test]
fn entropy_production_is_nonnegative() {
    let dev = QubitReset::default();
    let mut r = common::rng(3);
    for _ in 0..5 {
        let t = dev.run(&DensityMatrix::random(2, &mut r)).unwrap();
        for i in 0..t.len() {
            assert!(t.entropy_production(i) >= -1e-6, "record {i}: {}", t.entropy_production(i));
        }
    }
}

#[test]
fn frozen_hamiltonian_leaves_gibbs_state_fixed() {
    for t0 in [0.0, 20.0, 50.0] {
        let dev = QubitReset { frozen_at: Some(t0), steps: 2000, ..Default::default() };
        let g = dev.protocol.gibbs(t0);
        let t = dev.run(&g).unwrap();
        assert!(t.final_state().trace_distance(&g) < 1e-10);
        assert!(t.work.last().unwrap().abs() < 1e-12);
        assert!(t.heat.last().unwrap().abs() < 1e-10);
    }
}

#[test]
fn reset_pulls_states_together() {
    let dev = QubitReset::default();
    let mut r = common::rng(4);
    let outs: Vec<DensityMatrix> =
        (0..4).map(|_| dev.run(&DensityMatrix::random_pure(2, &mut r)).unwrap().final_state().clone()).collect();
    let spread = thermops_core::type2::overwrite_spread(&outs);
    assert!(spread < 0.5, "{spread}");
}

#[test]
fn reconstructed_work_operator_predicts_held_out_runs() {
    let dev = QubitReset { steps: 2000, ..Default::default() };
    let basis = OperatorBasis::pauli();
    let labels = [Label::Work, Label::Heat];
    let (ens, _) = collect_ensemble(&dev, &basis, default_inputs(&basis).unwrap(), &labels).unwrap();
    let mut r = common::rng(5);
    for label in labels {
        let op = reconstruct_operator(&ens, &label).unwrap();
        for _ in 0..10 {
            let rho = DensityMatrix::random(2, &mut r);
            let direct = dev.run(&rho).unwrap().final_value(&label).unwrap();
            assert!((predict(&op, &rho).unwrap() - direct).abs() < 1e-10);
        }
    }
}

#[test]
fn csv_has_units_and_all_records() {
    let dev = QubitReset { steps: 1000, records: 10, ..Default::default() };
    let t = dev.run(&DensityMatrix::maximally_mixed(2)).unwrap();
    assert_eq!(t.len(), 11);
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# units"));
    assert_eq!(text.lines().count(), 13);
}
