//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a partially pivoted LU factorization of `T - λI`. Only the
//! `k` smallest eigenpairs are computed, which keeps the per-step cost linear
//! in the grid size.

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n-1 entries");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> f64 {
        let emax = self.off.iter().fold(1.0_f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
        let abstol = 2.0 * f64::EPSILON * scale;
        let mut out = Vec::with_capacity(k);
        let mut lower = glo - abstol;
        for j in 0..k {
            // eigenvalue j is the smallest x with count(x) > j
            let mut lo = lower;
            let mut hi = ghi + abstol;
            while hi - lo > abstol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.sturm_count(mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            out.push(value);
            lower = lo;
        }
        out
    }

    /// The `k` smallest eigenpairs; eigenvectors are unit-norm columns.
    pub fn lowest_eigenpairs(&self, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let values = self.lowest_eigenvalues(k);
        let (glo, ghi) = self.gershgorin();
        let norm = glo.abs().max(ghi.abs());
        let n = self.len();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for (j, &lambda) in values.iter().enumerate() {
            // separate shifts that coincide to working precision
            let mut shift = lambda;
            let sep = 10.0 * f64::EPSILON * norm;
            if j > 0 {
                let prev = values[j - 1];
                if shift - prev < sep {
                    shift = prev + sep;
                }
            }
            let lu = TridiagLu::factor(self, shift, norm);
            let mut x: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.5 * ((i as f64 * 0.7548776662 + j as f64 * 0.5698402910).fract() - 0.5))
                .collect();
            for _ in 0..4 {
                lu.solve(&mut x);
                for v in &vectors {
                    let ov = dot(v, &x);
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi -= ov * vi;
                    }
                }
                let nrm = dot(&x, &x).sqrt();
                x.iter_mut().for_each(|xi| *xi /= nrm);
            }
            vectors.push(x);
        }
        (values, vectors)
    }

    /// `‖Tv - λv‖₂`.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut y = (self.diag[i] - lambda) * v[i];
            if i > 0 {
                y += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                y += self.off[i] * v[i + 1];
            }
            acc += y * y;
        }
        acc.sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LU factorization of `T - λI` with partial pivoting (two superdiagonals in U).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiagonal, shift: f64, norm: f64) -> Self {
        let n = t.len();
        let mut dl = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1].abs() < tiny {
            d[n - 1] = if d[n - 1] < 0.0 { -tiny } else { tiny };
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 200;
        let t = laplacian(n);
        let (vals, vecs) = t.lowest_eigenpairs(6);
        for (k, (v, vec)) in vals.iter().zip(&vecs).enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} vs {exact}");
            assert!(t.residual(*v, vec) < 1e-12);
        }
        for a in 0..vecs.len() {
            for b in 0..vecs.len() {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot(&vecs[a], &vecs[b]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sturm_count_brackets() {
        let t = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]);
        assert_eq!(t.sturm_count(0.5), 0);
        assert_eq!(t.sturm_count(1.5), 1);
        assert_eq!(t.sturm_count(10.0), 3);
    }

    #[test]
    fn nearly_degenerate_pair_stays_orthogonal() {
        // two weakly coupled identical blocks
        let n = 40;
        let mut off = vec![-1.0; n - 1];
        off[n / 2 - 1] = -1e-9;
        let t = SymTridiagonal::new(vec![2.0; n], off);
        let (vals, vecs) = t.lowest_eigenpairs(2);
        assert!(vals[1] - vals[0] < 1e-8);
        assert!(dot(&vecs[0], &vecs[1]).abs() < 1e-10);
        for (v, vec) in vals.iter().zip(&vecs) {
            assert!(t.residual(*v, vec) < 1e-10);
        }
    }
}
