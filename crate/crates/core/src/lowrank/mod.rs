//! Factored low-rank matrices, rank truncation, extended Krylov bases and
//! the reduced-space residual.

mod krylov;
mod matrix;
mod residual;

pub use krylov::{svd_truncated_qr, KrylovBasis, KrylovOp};
pub use matrix::{truncated_svd, LowRankMatrix, Truncation};
pub use residual::{galerkin_project, lowrank_residual_norm, ResidualFactors};
