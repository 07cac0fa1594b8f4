//! Adaptive-rank implicit time integration for two-dimensional
//! advection-diffusion equations with separable variable coefficients.

pub mod discretization;
pub mod error;
pub mod linalg;
pub mod lowrank;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, TriLu, TridiagonalMatrix};
