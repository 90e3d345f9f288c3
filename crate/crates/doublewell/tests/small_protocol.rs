use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermops_core::devices::Device;
use thermops_core::linalg::{self, CMatrix};
use thermops_core::tomography::{predict, Label};
use thermops_core::DensityMatrix;
use thermops_doublewell::potential::Landscape;
use thermops_doublewell::rates::{escape_rates, rate_matrix};
use thermops_doublewell::spectrum::spectrum;
use thermops_doublewell::{DoubleWellConfig, DoubleWellDevice, Grid, SpectrumSequence, WorkEstimator};

/// Ten times faster protocol on a coarse grid: 4000 steps.
fn small() -> DoubleWellConfig {
    DoubleWellConfig {
        tau: 4e8,
        dt: 1e5,
        subspace_dim: 4,
        grid: Grid { x_min: -4.5, x_max: 4.5, n_points: 256 },
        basis_tolerance: 1e-4,
        record_every: 200,
        ..Default::default()
    }
}

fn device() -> &'static DoubleWellDevice {
    static DEV: OnceLock<DoubleWellDevice> = OnceLock::new();
    DEV.get_or_init(|| DoubleWellDevice::with_snapshots(&small(), &[0, 2000]).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn rates_obey_detailed_balance_along_the_protocol() {
    let cfg = small();
    for k in 0..10 {
        let t = cfg.tau * k as f64 / 9.0;
        let s = spectrum(&cfg, Landscape::DoubleWell, t, None).unwrap();
        let r = rate_matrix(&s.energies, &s.x, cfg.gamma);
        for m in 0..cfg.n_keep {
            for n in 0..cfg.n_keep {
                if m != n && r[(n, m)] > 0.0 {
                    let ratio = r[(m, n)] / r[(n, m)];
                    let expect = (s.energies[m] - s.energies[n]).exp();
                    assert!((ratio / expect - 1.0).abs() < 1e-10, "t = {t}, {m}->{n}");
                }
            }
        }
        let esc = escape_rates(&r);
        assert!(esc.iter().all(|e| *e >= 0.0));
    }
}

#[test]
fn sequence_is_reproducible() {
    let a = &device().sequence;
    let b = SpectrumSequence::build(&small(), &[]).unwrap();
    assert_eq!(a.steps.len(), 4000);
    for (x, y) in a.steps.iter().zip(&b.steps) {
        assert_eq!(x.energies, y.energies);
        assert_eq!(x.overlap, y.overlap);
    }
    assert!(a.max_unitarity_deficit < small().basis_tolerance);
    // H_τ = H_0, so the closing map is a signed permutation
    let p = &a.final_to_initial;
    assert!(p.iter().all(|z| z.abs() < 1e-6 || (z.abs() - 1.0).abs() < 1e-6));
}

#[test]
fn runs_stay_physical() {
    let dev = device();
    let inputs = dev.random_inputs(6, &mut rng(1)).unwrap();
    for rho in &inputs {
        let traj = dev.run(rho).unwrap();
        for s in &traj.states {
            assert!((linalg::trace(s.mat()).re - 1.0).abs() < 1e-8);
            assert!(s.eigenvalues()[0] > -1e-9);
        }
        assert_eq!(traj.times.len(), 4000 / 200 + 1);
    }
}

#[test]
fn work_is_linear_in_the_input() {
    let dev = device();
    let mut r = rng(2);
    let inputs = dev.random_inputs(16, &mut r).unwrap();
    let (op, ens) = dev.work_operator(inputs).unwrap();
    assert!(ens.condition_number() < 1e6);
    for rho in dev.random_inputs(20, &mut r).unwrap() {
        let direct = dev.run(&rho).unwrap().final_value(&Label::Work).unwrap();
        assert!((predict(&op, &rho).unwrap() - direct).abs() < 1e-9);
    }
}

#[test]
fn inputs_outside_the_subspace_are_rejected() {
    let dev = device();
    let rho = DensityMatrix::basis_state(20, 6);
    assert!(dev.run(&rho).is_err());
}

#[test]
fn estimators_agree_when_coherences_vanish() {
    let dev = device();
    let seq = &dev.sequence;
    let rho = DensityMatrix::basis_state(20, 0);
    let a = seq.evolve(rho.mat(), WorkEstimator::TimeAveraged, true).unwrap();
    let b = seq.evolve(rho.mat(), WorkEstimator::Naive, true).unwrap();
    // an energy eigenstate develops coherences only through the drive
    assert!((a.final_work() - b.final_work()).norm() < 0.05 * a.final_work().norm().max(1.0));
}

#[test]
fn csv_outputs_carry_units() {
    let cfg = small();
    let snap = &device().sequence.snapshots[&2000];
    let rho = thermops_doublewell::output::instantaneous_equilibrium(&snap.energies);
    let mut buf = Vec::new();
    thermops_doublewell::output::write_density_csv(&mut buf, &cfg, snap, &rho).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with('#'));
    assert_eq!(text.lines().count(), 2 + cfg.grid.n_points);
    // the density integrates to one
    let dx = cfg.grid.spacing();
    let total: f64 = text.lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() * dx).sum();
    assert!((total - 1.0).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn operator_inputs_are_linear(seed in any::<u64>(), t in -2.0f64..2.0) {
        let seq = &device().sequence;
        let mut r = rng(seed);
        let a = linalg::random_hermitian(20, &mut r);
        let b = linalg::random_hermitian(20, &mut r);
        let w = |m: &CMatrix| seq.evolve(m, WorkEstimator::TimeAveraged, false).unwrap().final_work();
        let mixed = w(&(&a + b.scale(t)));
        let lin = w(&a) + w(&b) * t;
        prop_assert!((mixed - lin).norm() < 1e-10 * (1.0 + lin.norm()));
    }
}
