//! JSON representation of complex matrices: `dim` plus row-major `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub fn to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Result<CMatrix> {
    if pairs.len() != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, found: pairs.len() });
    }
    Ok(CMatrix::from_row_iterator(dim, dim, pairs.iter().map(|p| C64::new(p[0], p[1]))))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub dim: usize,
    pub mat: Vec<[f64; 2]>,
}

impl MatrixRepr {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self { dim: m.nrows(), mat: to_pairs(m) }
    }

    pub fn into_matrix(self) -> Result<CMatrix> {
        from_pairs(self.dim, &self.mat)
    }
}

/// Real matrix as a list of rows.
pub fn real_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<nalgebra::DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: bad.len() });
    }
    Ok(nalgebra::DMatrix::from_row_iterator(n, m, rows.iter().flatten().copied()))
}
