//! Dense and banded linear-algebra kernels.

pub(crate) mod dense;
mod kron;
mod lu;
mod qr;
mod schur;
mod svd;
mod sylvester;
mod tridiag;

pub use dense::DenseMatrix;
pub use kron::{kron, unvec, vec_of};
pub use lu::{dense_solve, DenseLu};
pub use qr::reduced_qr;
pub use schur::{real_schur, SchurForm};
pub use svd::{dense_svd, Svd};
pub use sylvester::{sylvester_solve, SylvesterSolver};
pub use tridiag::{thomas_solve, TriLu, TridiagonalMatrix};
