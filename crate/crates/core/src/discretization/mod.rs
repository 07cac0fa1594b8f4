//! Finite-difference discretization of separable-coefficient
//! advection-diffusion operators on tensor-product grids.

mod coefficients;
mod grid;
mod operators;
pub mod problems;
mod stencil;

pub use coefficients::{CoefficientSet, Profile, SeparableFactor, SeparableTerm};
pub use grid::Grid1D;
pub use operators::{cell_reynolds, cell_reynolds_check, Factor, OperatorSet, Term};
pub use problems::{ExampleId, Problem, TimeSeparableTerm};
pub use stencil::{build_advection_operator, build_diffusion_operator};
