//! Precomputed per-step spectral data and the protocol runner.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thermops_core::devices::Trajectory;
use thermops_core::linalg::{CMatrix, C64};
use thermops_core::state::DensityMatrix;

use crate::config::DoubleWellConfig;
use crate::error::{DwError, Result};
use crate::potential::{potential_change, Landscape};
use crate::rates::{escape_rates, rate_matrix};
use crate::spectrum::{spectrum, InstantSpectrum};
use crate::stepper::{self, WorkEstimator};

/// Everything one step needs, expressed in the eigenbasis at its start.
#[derive(Debug, Clone)]
pub struct StepData {
    pub energies: Vec<f64>,
    /// `H_{n+1} − H_n`.
    pub dh: DMatrix<f64>,
    pub rates: DMatrix<f64>,
    pub escape: Vec<f64>,
    /// `⟨a_{n+1}|b_n⟩`.
    pub overlap: DMatrix<f64>,
}

/// Spectral data for every step of the protocol, shared by all inputs.
#[derive(Debug, Clone)]
pub struct SpectrumSequence {
    pub cfg: DoubleWellConfig,
    pub steps: Vec<StepData>,
    /// Energies at the end of the protocol.
    pub final_energies: Vec<f64>,
    /// `⟨a_0|b_τ⟩`, a signed permutation since `H_τ = H_0`.
    pub final_to_initial: DMatrix<f64>,
    /// Sign-continued spectra kept at the requested step indices.
    pub snapshots: BTreeMap<usize, InstantSpectrum>,
    pub max_unitarity_deficit: f64,
}

const CHUNK: usize = 128;

fn unitarity_deficit(o: &DMatrix<f64>) -> f64 {
    let k = o.nrows();
    (o * o.transpose() - DMatrix::identity(k, k)).abs().max()
}

impl SpectrumSequence {
    /// Diagonalizes the Hamiltonian at every step boundary (in parallel
    /// chunks), then chains signs and overlaps sequentially.
    pub fn build(cfg: &DoubleWellConfig, snapshot_steps: &[usize]) -> Result<Self> {
        cfg.validate()?;
        let n_steps = cfg.steps();
        let time = |n: usize| if n == n_steps { cfg.tau } else { n as f64 * cfg.dt };
        let mut prev = spectrum(cfg, Landscape::DoubleWell, 0.0, None)?;
        let initial = prev.clone();
        let mut snapshots = BTreeMap::new();
        if snapshot_steps.contains(&0) {
            snapshots.insert(0, prev.clone());
        }
        let mut steps = Vec::with_capacity(n_steps);
        let mut max_deficit = 0.0_f64;
        let mut next_index = 1;
        while next_index <= n_steps {
            let end = (next_index + CHUNK).min(n_steps + 1);
            let batch: Vec<InstantSpectrum> = (next_index..end)
                .into_par_iter()
                .map(|n| spectrum(cfg, Landscape::DoubleWell, time(n), None))
                .collect::<Result<_>>()?;
            for (offset, mut cur) in batch.into_iter().enumerate() {
                let n = next_index + offset;
                for (k, v) in cur.vectors.iter_mut().enumerate() {
                    if crate::tridiag::dot(&prev.vectors[k], v) < 0.0 {
                        v.iter_mut().for_each(|z| *z = -*z);
                        for j in 0..cur.x.ncols() {
                            if j != k {
                                cur.x[(k, j)] = -cur.x[(k, j)];
                                cur.x[(j, k)] = -cur.x[(j, k)];
                                cur.x2[(k, j)] = -cur.x2[(k, j)];
                                cur.x2[(j, k)] = -cur.x2[(j, k)];
                            }
                        }
                    }
                }
                let overlap = cur.overlap_with(&prev);
                let deficit = unitarity_deficit(&overlap);
                max_deficit = max_deficit.max(deficit);
                if deficit > cfg.basis_tolerance {
                    return Err(DwError::BasisTracking { step: n - 1, deficit });
                }
                let (a, b) = potential_change(cfg, time(n - 1), time(n))?;
                let dh = &prev.x2 * a + &prev.x * b;
                let rates = rate_matrix(&prev.energies, &prev.x, cfg.gamma);
                let escape = escape_rates(&rates);
                steps.push(StepData { energies: prev.energies.clone(), dh, rates, escape, overlap });
                if snapshot_steps.contains(&n) {
                    snapshots.insert(n, cur.clone());
                }
                prev = cur;
            }
            next_index = end;
        }
        let final_to_initial = initial.overlap_with(&prev);
        Ok(Self {
            cfg: cfg.clone(),
            steps,
            final_energies: prev.energies.clone(),
            final_to_initial,
            snapshots,
            max_unitarity_deficit: max_deficit,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.cfg.n_keep
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps.len() {
            self.cfg.tau
        } else {
            n as f64 * self.cfg.dt
        }
    }

    /// Evolves a reduced operator given in the t = 0 eigenbasis. Works for
    /// any matrix by linearity; physical checks apply only when `physical`.
    pub fn evolve(&self, rho0: &CMatrix, estimator: WorkEstimator, physical: bool) -> Result<RunOutput> {
        let k = self.n_levels();
        if rho0.nrows() != k || rho0.ncols() != k {
            return Err(DwError::Dimension { expected: k, found: rho0.nrows() });
        }
        let dt = self.cfg.dt;
        let every = self.cfg.record_every;
        let mut rho = rho0.clone();
        let (mut w, mut q) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let mut out = RunOutput::default();
        let energy = |rho: &CMatrix, e: &[f64]| -> C64 { e.iter().enumerate().map(|(a, ea)| rho[(a, a)] * *ea).sum() };
        out.push(0.0, &rho, w, q, energy(&rho, &self.steps[0].energies));
        for (n, s) in self.steps.iter().enumerate() {
            w += stepper::work_increment(&rho, &s.energies, &s.dh, dt, estimator);
            let e_before = energy(&rho, &s.energies);
            let next = stepper::step(&rho, &s.energies, &s.rates, &s.escape, dt);
            q += energy(&next, &s.energies) - e_before;
            let oc = s.overlap.map(|z| C64::new(z, 0.0));
            rho = &oc * next * oc.transpose();
            if physical {
                stepper::check_state(&rho, n)?;
            }
            let last = n + 1 == self.steps.len();
            if (n + 1) % every == 0 || last {
                if last {
                    let p = self.final_to_initial.map(|z| C64::new(z, 0.0));
                    rho = &p * rho * p.transpose();
                }
                let e_now = if last { &self.final_energies } else { &self.steps[n + 1].energies };
                out.push(self.time(n + 1), &rho, w, q, energy(&rho, e_now));
            }
        }
        Ok(out)
    }

    /// Runs physical inputs (t = 0 eigenbasis) concurrently.
    pub fn run_many(&self, inputs: &[DensityMatrix], estimator: WorkEstimator) -> Result<Vec<RunOutput>> {
        inputs.par_iter().map(|r| self.evolve(r.mat(), estimator, true)).collect()
    }
}

/// Sampled run of one input. Complex values arise only for non-Hermitian
/// operator inputs.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub times: Vec<f64>,
    /// Reduced states in the instantaneous eigenbasis at each sample; the
    /// final one is in the t = 0 eigenbasis, which coincides with it.
    pub states: Vec<CMatrix>,
    pub work: Vec<C64>,
    pub heat: Vec<C64>,
    pub energy: Vec<C64>,
}

impl RunOutput {
    fn push(&mut self, t: f64, rho: &CMatrix, w: C64, q: C64, e: C64) {
        self.times.push(t);
        self.states.push(rho.clone());
        self.work.push(w);
        self.heat.push(q);
        self.energy.push(e);
    }

    pub fn final_work(&self) -> C64 {
        *self.work.last().expect("non-empty run")
    }

    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("non-empty run")
    }

    pub fn into_trajectory(self) -> Result<Trajectory> {
        let states = self.states.iter().map(DensityMatrix::from_approx).collect::<std::result::Result<Vec<_>, _>>()?;
        let heat: Vec<f64> = self.heat.iter().map(|z| z.re).collect();
        Ok(Trajectory {
            times: self.times,
            states,
            work: self.work.iter().map(|z| z.re).collect(),
            entropy_flow: heat.iter().map(|q| -q).collect(),
            heat,
            energy: self.energy.iter().map(|z| z.re).collect(),
            extra: Default::default(),
        })
    }
}
