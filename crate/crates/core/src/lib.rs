pub mod basis;
pub mod devices;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod perturbative;
pub mod serde_mat;
pub mod state;
pub mod tomography;
pub mod type2;

pub use basis::{BlochVector, OperatorBasis};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use state::DensityMatrix;
