//! Blackbody transition rates between instantaneous levels.

use nalgebra::DMatrix;

/// Pairs with `|ω|βħ` below this get zero rate.
pub const DEGENERATE_OMEGA: f64 = 1e-12;

/// `r[(m, n)]` is the rate `m → n`:
/// `γ|ω|³|⟨m|x|n⟩|²⟨N⟩` for absorption (`E_n > E_m`) and the same with
/// `⟨N⟩ + 1` for emission, `⟨N⟩ = 1/(e^{|ω|} − 1)`.
pub fn rate_matrix(energies: &[f64], x: &DMatrix<f64>, gamma: f64) -> DMatrix<f64> {
    let k = energies.len();
    let mut r = DMatrix::zeros(k, k);
    for m in 0..k {
        for n in 0..k {
            if m == n {
                continue;
            }
            let w = energies[n] - energies[m];
            let wa = w.abs();
            if wa < DEGENERATE_OMEGA {
                continue;
            }
            let occ = 1.0 / wa.exp_m1();
            let occ = if w > 0.0 { occ } else { occ + 1.0 };
            r[(m, n)] = gamma * wa.powi(3) * x[(m, n)].powi(2) * occ;
        }
    }
    r
}

/// Total escape rate out of each level.
pub fn escape_rates(r: &DMatrix<f64>) -> Vec<f64> {
    r.row_iter().map(|row| row.sum()).collect()
}
