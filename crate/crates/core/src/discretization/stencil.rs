//! Flux-form three-point stencils for variable-coefficient diffusion and
//! advection with homogeneous Dirichlet boundaries.

use crate::discretization::{Grid1D, SeparableFactor};
use crate::error::{Error, Result};
use crate::linalg::TridiagonalMatrix;

fn check(grid: &Grid1D, factor: &SeparableFactor) -> Result<()> {
    if factor.nodes().len() != grid.n() {
        return Err(Error::Dimension(format!(
            "factor sampled on {} nodes, grid has {}",
            factor.nodes().len(),
            grid.n()
        )));
    }
    Ok(())
}

/// Discretizes `u ↦ (φ u')'`: row `i` is `[φ_{i-1/2}, -(φ_{i-1/2} + φ_{i+1/2}), φ_{i+1/2}] / Δx²`.
pub fn build_diffusion_operator(grid: &Grid1D, factor: &SeparableFactor) -> Result<TridiagonalMatrix> {
    check(grid, factor)?;
    let n = grid.n();
    let h = factor.half();
    let s = 1.0 / (grid.dx() * grid.dx());
    let sub = (1..n).map(|i| s * h[i]).collect();
    let diag = (0..n).map(|i| -s * (h[i] + h[i + 1])).collect();
    let sup = (0..n - 1).map(|i| s * h[i + 1]).collect();
    TridiagonalMatrix::new(sub, diag, sup)
}

/// Discretizes `u ↦ (σ u)'` with face averages:
/// row `i` is `[-σ_{i-1/2}, σ_{i+1/2} - σ_{i-1/2}, σ_{i+1/2}] / (2Δx)`.
pub fn build_advection_operator(grid: &Grid1D, factor: &SeparableFactor) -> Result<TridiagonalMatrix> {
    check(grid, factor)?;
    let n = grid.n();
    let h = factor.half();
    let s = 0.5 / grid.dx();
    let sub = (1..n).map(|i| -s * h[i]).collect();
    let diag = (0..n).map(|i| s * (h[i + 1] - h[i])).collect();
    let sup = (0..n - 1).map(|i| s * h[i + 1]).collect();
    TridiagonalMatrix::new(sub, diag, sup)
}
