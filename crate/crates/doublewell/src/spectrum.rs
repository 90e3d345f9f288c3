//! Lowest instantaneous energy eigenstates on the grid.

use nalgebra::DMatrix;

use crate::config::{DoubleWellConfig, Grid};
use crate::error::{DwError, Result};
use crate::potential::Landscape;
use crate::tridiag::{dot, SymTridiagonal};

/// Largest allowed `|ψ|` at either grid end for the highest kept level.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct InstantSpectrum {
    pub time: f64,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Unit-norm grid vectors, one per level.
    pub vectors: Vec<Vec<f64>>,
    /// `⟨m|x|n⟩` in units of λ_th.
    pub x: DMatrix<f64>,
    /// `⟨m|x²|n⟩`.
    pub x2: DMatrix<f64>,
}

/// `−(1/2m)∂²` with the three-point stencil plus `V` on the diagonal.
pub fn hamiltonian(grid: &Grid, mass: f64, v: &[f64]) -> SymTridiagonal {
    let dx = grid.spacing();
    let c = 1.0 / (2.0 * mass * dx * dx);
    SymTridiagonal::new(v.iter().map(|vi| 2.0 * c + vi).collect(), vec![-c; v.len() - 1])
}

fn is_mirror_symmetric(cfg: &DoubleWellConfig, landscape: Landscape, t: f64) -> Result<bool> {
    let grid_ok = cfg.grid.n_points.is_multiple_of(2) && cfg.grid.x_min == -cfg.grid.x_max;
    let v_ok = match landscape {
        Landscape::Harmonic { .. } => true,
        Landscape::DoubleWell => crate::potential::protocol(t, cfg.tau)?.1 == 0.0,
    };
    Ok(grid_ok && v_ok)
}

/// Lowest levels of a mirror-symmetric problem on an even grid, solved
/// separately in the even and odd sectors so that parity is exact even for
/// doublets split far below the bisection tolerance of the full problem.
fn parity_split_eigenpairs(cfg: &DoubleWellConfig, v: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = v.len();
    let m = n / 2;
    let dx = cfg.grid.spacing();
    let c = 1.0 / (2.0 * cfg.mass() * dx * dx);
    // mirror-average so both halves see the same potential
    let half_v: Vec<f64> = (0..m).map(|i| 0.5 * (v[m + i] + v[m - 1 - i])).collect();
    let mut levels: Vec<(f64, Vec<f64>)> = Vec::with_capacity(2 * cfg.n_keep);
    for parity in [1.0, -1.0] {
        let mut diag: Vec<f64> = half_v.iter().map(|vi| 2.0 * c + vi).collect();
        // ψ_{m-1} = ±ψ_m folds the centre coupling onto the diagonal
        diag[0] -= parity * c;
        let (vals, vecs) = SymTridiagonal::new(diag, vec![-c; m - 1]).lowest_eigenpairs(cfg.n_keep.min(m));
        let norm = std::f64::consts::FRAC_1_SQRT_2;
        for (e, half) in vals.into_iter().zip(vecs) {
            let mut full = vec![0.0; n];
            for i in 0..m {
                full[m + i] = half[i] * norm;
                full[m - 1 - i] = parity * half[i] * norm;
            }
            levels.push((e, full));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    levels.truncate(cfg.n_keep);
    levels.into_iter().unzip()
}

/// Spectrum at time `t`. Signs follow `prev` (positive overlap with the same
/// level) when given, and otherwise make the largest component positive.
pub fn spectrum(
    cfg: &DoubleWellConfig,
    landscape: Landscape,
    t: f64,
    prev: Option<&InstantSpectrum>,
) -> Result<InstantSpectrum> {
    let xs = cfg.grid.points();
    let v = landscape.values(cfg, t, &xs)?;
    let (energies, mut vectors) = if is_mirror_symmetric(cfg, landscape, t)? {
        parity_split_eigenpairs(cfg, &v)
    } else {
        hamiltonian(&cfg.grid, cfg.mass(), &v).lowest_eigenpairs(cfg.n_keep)
    };
    let last = vectors.last().expect("n_keep > 0");
    let amplitude = last[0].abs().max(last[last.len() - 1].abs());
    if amplitude > BOUNDARY_TOL {
        return Err(DwError::BoundaryLeakage { level: cfg.n_keep - 1, amplitude });
    }
    for (k, vec) in vectors.iter_mut().enumerate() {
        let s = match prev {
            Some(p) => dot(&p.vectors[k], vec),
            None => vec.iter().copied().fold(0.0_f64, |m, z| if z.abs() > m.abs() { z } else { m }),
        };
        if s < 0.0 {
            vec.iter_mut().for_each(|z| *z = -*z);
        }
    }
    let n = cfg.n_keep;
    let mut x = DMatrix::zeros(n, n);
    let mut x2 = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let (mut s1, mut s2) = (0.0, 0.0);
            for ((pa, pb), xi) in vectors[a].iter().zip(&vectors[b]).zip(&xs) {
                let p = pa * pb;
                s1 += p * xi;
                s2 += p * xi * xi;
            }
            x[(a, b)] = s1;
            x[(b, a)] = s1;
            x2[(a, b)] = s2;
            x2[(b, a)] = s2;
        }
    }
    Ok(InstantSpectrum { time: t, energies, vectors, x, x2 })
}

impl InstantSpectrum {
    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    /// `O_ab = ⟨a_self|b_other⟩`, the map from `other`'s basis into this one.
    pub fn overlap_with(&self, other: &InstantSpectrum) -> DMatrix<f64> {
        let n = self.n_levels();
        DMatrix::from_fn(n, n, |a, b| dot(&self.vectors[a], &other.vectors[b]))
    }

    /// `max |⟨a|b⟩ − δ_ab|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let o = self.overlap_with(self);
        (o - DMatrix::identity(self.n_levels(), self.n_levels())).abs().max()
    }

    /// Largest `‖Hψ − Eψ‖` over the kept levels.
    pub fn max_residual(&self, cfg: &DoubleWellConfig, landscape: Landscape) -> Result<f64> {
        let v = landscape.values(cfg, self.time, &cfg.grid.points())?;
        let h = hamiltonian(&cfg.grid, cfg.mass(), &v);
        Ok(self.energies.iter().zip(&self.vectors).map(|(e, vec)| h.residual(*e, vec)).fold(0.0, f64::max))
    }

    /// Position density `p(x) = Σ_ab ρ_ab ψ_a(x)ψ_b(x)/dx` of a reduced state
    /// given in this basis (real part of a Hermitian form).
    pub fn density(&self, rho: &thermops_core::linalg::CMatrix, dx: f64) -> Vec<f64> {
        let n_grid = self.vectors[0].len();
        let k = self.n_levels();
        (0..n_grid)
            .map(|i| {
                let mut acc = 0.0;
                for a in 0..k {
                    for b in 0..k {
                        acc += rho[(a, b)].re * self.vectors[a][i] * self.vectors[b][i];
                    }
                }
                acc / dx
            })
            .collect()
    }
}

/// Largest change of the lowest `n_keep` energies at `t` when the grid
/// spacing is halved over the same interval.
pub fn grid_refinement_change(cfg: &DoubleWellConfig, t: f64) -> Result<f64> {
    let coarse = spectrum(cfg, Landscape::DoubleWell, t, None)?;
    let fine_cfg = DoubleWellConfig { grid: cfg.grid.refined(), ..cfg.clone() };
    let fine = spectrum(&fine_cfg, Landscape::DoubleWell, t, None)?;
    Ok(coarse.energies.iter().zip(&fine.energies).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_levels() {
        let omega = 0.5;
        let cfg = DoubleWellConfig {
            n_keep: 6,
            grid: Grid { x_min: -6.0, x_max: 6.0, n_points: 2048 },
            ..Default::default()
        };
        let s = spectrum(&cfg, Landscape::Harmonic { omega }, 0.0, None).unwrap();
        for (n, e) in s.energies.iter().enumerate() {
            let exact = (n as f64 + 0.5) * omega;
            assert!((e / exact - 1.0).abs() < 1e-4, "level {n}: {e} vs {exact}");
        }
    }

    #[test]
    fn parity_selection_at_start() {
        let cfg = DoubleWellConfig::default();
        let s = spectrum(&cfg, Landscape::DoubleWell, 0.0, None).unwrap();
        for m in 0..cfg.n_keep {
            for n in 0..cfg.n_keep {
                if (m + n) % 2 == 0 {
                    assert!(s.x[(m, n)].abs() < 1e-10, "<{m}|x|{n}> = {}", s.x[(m, n)]);
                }
            }
        }
        assert!(s.orthonormality_defect() < 1e-10);
        assert!(s.max_residual(&cfg, Landscape::DoubleWell).unwrap() < 1e-8);
    }

    #[test]
    fn parity_split_matches_full_solve() {
        let cfg = DoubleWellConfig::default();
        let v = Landscape::DoubleWell.values(&cfg, 0.0, &cfg.grid.points()).unwrap();
        let (split, _) = parity_split_eigenpairs(&cfg, &v);
        let full = hamiltonian(&cfg.grid, cfg.mass(), &v).lowest_eigenvalues(cfg.n_keep);
        for (a, b) in split.iter().zip(&full) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn low_levels_pair_into_doublets() {
        let cfg = DoubleWellConfig::default();
        let s = spectrum(&cfg, Landscape::DoubleWell, 0.0, None).unwrap();
        let e = &s.energies;
        for k in 0..2 {
            let split = e[2 * k + 1] - e[2 * k];
            let gap = e[2 * k + 2] - e[2 * k + 1];
            assert!(split < 0.05 * gap, "doublet {k}: split {split}, gap {gap}");
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let cfg = DoubleWellConfig { grid: Grid { x_min: -2.0, x_max: 2.0, n_points: 400 }, ..Default::default() };
        assert!(matches!(spectrum(&cfg, Landscape::DoubleWell, 0.0, None), Err(DwError::BoundaryLeakage { .. })));
    }
}
