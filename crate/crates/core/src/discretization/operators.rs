//! Assembly of the banded operators and averaged-coefficient blocks.

use log::warn;

use crate::discretization::stencil::{build_advection_operator, build_diffusion_operator};
use crate::discretization::{CoefficientSet, Grid1D, Profile, SeparableFactor};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, TriLu, TridiagonalMatrix};

/// One side of a separable operator term: banded or diagonal.
#[derive(Debug, Clone, Copy)]
pub enum Factor<'a> {
    Tri(&'a TridiagonalMatrix),
    Diag(&'a [f64]),
}

impl Factor<'_> {
    pub fn n(&self) -> usize {
        match self {
            Factor::Tri(t) => t.n(),
            Factor::Diag(d) => d.len(),
        }
    }

    pub fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        match self {
            Factor::Tri(t) => t.apply(x),
            Factor::Diag(d) => x.scale_rows(d),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Factor::Tri(t) => t.to_dense(),
            Factor::Diag(d) => DenseMatrix::from_diag(d),
        }
    }
}

/// A term `left · F · rightᵀ` of the discrete operator.
#[derive(Debug, Clone, Copy)]
pub struct Term<'a> {
    pub left: Factor<'a>,
    pub right: Factor<'a>,
}

/// Discrete operators for `𝓛(F) = Σ T1 F Φ2ᵀ + Σ Φ1 F T2ᵀ + Σ T3 F Σ2ᵀ + Σ Σ1 F T4ᵀ`
/// together with the averaged blocks used for preconditioning and basis
/// construction.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub nx: usize,
    pub ny: usize,
    /// Diagonal time increment baked into the averaged blocks.
    pub dt_diag: f64,
    /// x-diffusion operators, one per term of `φ^x`.
    pub t1: Vec<TridiagonalMatrix>,
    /// y-diffusion operators, one per term of `φ^y`.
    pub t2: Vec<TridiagonalMatrix>,
    /// Negated x-advection operators, one per term of `σ^x`.
    pub t3: Vec<TridiagonalMatrix>,
    /// Negated y-advection operators, one per term of `σ^y`.
    pub t4: Vec<TridiagonalMatrix>,
    /// x-samples of the `φ^y` terms (length `nx`).
    pub phi1: Vec<Vec<f64>>,
    /// x-samples of the `σ^y` terms.
    pub sigma1: Vec<Vec<f64>>,
    /// y-samples of the `φ^x` terms (length `ny`).
    pub phi2: Vec<Vec<f64>>,
    /// y-samples of the `σ^x` terms.
    pub sigma2: Vec<Vec<f64>>,
    pub alpha_x: Vec<f64>,
    pub alpha_y: Vec<f64>,
    pub gamma_x: Vec<f64>,
    pub gamma_y: Vec<f64>,
    pub p1: TridiagonalMatrix,
    pub p2: TridiagonalMatrix,
    pub a1: Vec<TriLu>,
    pub a2: Vec<TriLu>,
    pub a3: Vec<TriLu>,
    pub a4: Vec<TriLu>,
    pub p1_lu: TriLu,
    pub p2_lu: TriLu,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_nodes(grid: &Grid1D, p: &Profile) -> Vec<f64> {
    p.sample(&grid.nodes())
}

/// `(1/R) I - dt * scale * t`.
fn averaged_block(t: &TridiagonalMatrix, scale: f64, dt: f64, r: usize) -> TridiagonalMatrix {
    TridiagonalMatrix::identity(t.n()).lincomb(1.0 / r as f64, t, -dt * scale)
}

impl OperatorSet {
    pub fn assemble(gx: &Grid1D, gy: &Grid1D, coeffs: &CoefficientSet, dt_diag: f64) -> Result<Self> {
        if !(dt_diag > 0.0 && dt_diag.is_finite()) {
            return Err(Error::Config(format!("time increment must be positive, got {dt_diag}")));
        }
        let r = coeffs.total_rank();
        if r == 0 {
            return Err(Error::Config("coefficient set has no terms".into()));
        }
        let (nx, ny) = (gx.n(), gy.n());

        let mut t1 = Vec::new();
        let mut phi2 = Vec::new();
        for term in &coeffs.diffusion_x {
            t1.push(build_diffusion_operator(gx, &SeparableFactor::sample(gx, &term.x)?)?);
            phi2.push(sample_nodes(gy, &term.y));
        }
        let mut t2 = Vec::new();
        let mut phi1 = Vec::new();
        for term in &coeffs.diffusion_y {
            phi1.push(sample_nodes(gx, &term.x));
            t2.push(build_diffusion_operator(gy, &SeparableFactor::sample(gy, &term.y)?)?);
        }
        let mut t3 = Vec::new();
        let mut sigma2 = Vec::new();
        for term in &coeffs.advection_x {
            t3.push(build_advection_operator(gx, &SeparableFactor::sample(gx, &term.x)?)?.scaled(-1.0));
            sigma2.push(sample_nodes(gy, &term.y));
        }
        let mut t4 = Vec::new();
        let mut sigma1 = Vec::new();
        for term in &coeffs.advection_y {
            sigma1.push(sample_nodes(gx, &term.x));
            t4.push(build_advection_operator(gy, &SeparableFactor::sample(gy, &term.y)?)?.scaled(-1.0));
        }
        if phi1.iter().chain(&phi2).chain(&sigma1).chain(&sigma2).flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coefficient samples"));
        }

        let alpha_x: Vec<f64> = phi2.iter().map(|d| mean(d)).collect();
        let alpha_y: Vec<f64> = phi1.iter().map(|d| mean(d)).collect();
        let gamma_x: Vec<f64> = sigma2.iter().map(|d| mean(d)).collect();
        let gamma_y: Vec<f64> = sigma1.iter().map(|d| mean(d)).collect();

        let a1b: Vec<_> = t1.iter().zip(&alpha_x).map(|(t, &a)| averaged_block(t, a, dt_diag, r)).collect();
        let a3b: Vec<_> = t3.iter().zip(&gamma_x).map(|(t, &g)| averaged_block(t, g, dt_diag, r)).collect();
        let a2b: Vec<_> = t2.iter().zip(&alpha_y).map(|(t, &a)| averaged_block(t, a, dt_diag, r)).collect();
        let a4b: Vec<_> = t4.iter().zip(&gamma_y).map(|(t, &g)| averaged_block(t, g, dt_diag, r)).collect();

        let sum = |n: usize, blocks: &[&Vec<TridiagonalMatrix>]| {
            blocks
                .iter()
                .flat_map(|b| b.iter())
                .fold(TridiagonalMatrix::zeros(n), |acc, b| acc.lincomb(1.0, b, 1.0))
        };
        let p1 = sum(nx, &[&a1b, &a3b]);
        let p2 = sum(ny, &[&a2b, &a4b]);
        let factor_all = |blocks: &[TridiagonalMatrix]| blocks.iter().map(TriLu::factor).collect::<Result<Vec<_>>>();

        Ok(Self {
            nx,
            ny,
            dt_diag,
            a1: factor_all(&a1b)?,
            a2: factor_all(&a2b)?,
            a3: factor_all(&a3b)?,
            a4: factor_all(&a4b)?,
            p1_lu: TriLu::factor(&p1)?,
            p2_lu: TriLu::factor(&p2)?,
            p1,
            p2,
            t1,
            t2,
            t3,
            t4,
            phi1,
            sigma1,
            phi2,
            sigma2,
            alpha_x,
            alpha_y,
            gamma_x,
            gamma_y,
        })
    }

    /// Number of separable terms `R`.
    pub fn total_rank(&self) -> usize {
        self.t1.len() + self.t2.len() + self.t3.len() + self.t4.len()
    }

    /// Operator terms in the fixed order x-diffusion, y-diffusion,
    /// x-advection, y-advection.
    pub fn terms(&self) -> Vec<Term<'_>> {
        let mut out = Vec::with_capacity(self.total_rank());
        for (t, d) in self.t1.iter().zip(&self.phi2) {
            out.push(Term { left: Factor::Tri(t), right: Factor::Diag(d) });
        }
        for (d, t) in self.phi1.iter().zip(&self.t2) {
            out.push(Term { left: Factor::Diag(d), right: Factor::Tri(t) });
        }
        for (t, d) in self.t3.iter().zip(&self.sigma2) {
            out.push(Term { left: Factor::Tri(t), right: Factor::Diag(d) });
        }
        for (d, t) in self.sigma1.iter().zip(&self.t4) {
            out.push(Term { left: Factor::Diag(d), right: Factor::Tri(t) });
        }
        out
    }

    /// Applies the discrete operator to a dense grid function (`nx x ny`).
    pub fn apply_dense(&self, f: &DenseMatrix) -> DenseMatrix {
        assert_eq!(f.shape(), (self.nx, self.ny), "grid function has the wrong shape");
        let mut out = DenseMatrix::zeros(self.nx, self.ny);
        for term in self.terms() {
            let left = term.left.apply(f);
            let both = term.right.apply(&left.transpose()).transpose();
            out.add_scaled(1.0, &both);
        }
        out
    }
}

/// Cell Reynolds number `σ_max Δx / φ_max` over both directions.
///
/// Logs a warning when it reaches 2, the limit for monotone centered
/// advection. Returns `+∞` when there is advection but no diffusion.
pub fn cell_reynolds_check(coeffs: &CoefficientSet, gx: &Grid1D, gy: &Grid1D) -> f64 {
    let sigma_max = coeffs.sigma_max(gx, gy);
    let phi_max = coeffs.phi_max(gx, gy);
    let re = cell_reynolds(sigma_max, phi_max, gx.dx().max(gy.dx()));
    if re >= 2.0 {
        warn!("cell Reynolds number {re:.3} >= 2: centered advection may oscillate");
    }
    re
}

/// `σ_max Δx / φ_max`, with the zero-advection and zero-diffusion limits.
pub fn cell_reynolds(sigma_max: f64, phi_max: f64, dx: f64) -> f64 {
    if sigma_max == 0.0 {
        0.0
    } else if phi_max == 0.0 {
        f64::INFINITY
    } else {
        sigma_max * dx / phi_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::SeparableTerm;

    fn grids() -> (Grid1D, Grid1D) {
        (Grid1D::new(7, -1.0, 1.0).unwrap(), Grid1D::new(5, 0.0, 2.0).unwrap())
    }

    fn rank_one() -> CoefficientSet {
        let t = |a: Profile, b: Profile| vec![SeparableTerm::new(a, b)];
        CoefficientSet::new(
            t(Profile::gaussian(0.0, 1.0), Profile::polynomial(vec![1.0, 0.5])),
            t(Profile::constant(2.0), Profile::gaussian(1.0, 0.5)),
            t(Profile::polynomial(vec![1.0, 0.0, -1.0]), Profile::polynomial(vec![0.0, 2.0])),
            t(Profile::polynomial(vec![0.0, -2.0]), Profile::polynomial(vec![1.0, 0.0, -1.0])),
        )
        .unwrap()
    }

    #[test]
    fn constant_factor_average_is_exact() {
        let (gx, gy) = grids();
        let mut c = rank_one();
        c.diffusion_x = vec![SeparableTerm::new(Profile::constant(1.0), Profile::constant(0.3))];
        let ops = OperatorSet::assemble(&gx, &gy, &c, 0.1).unwrap();
        assert_eq!(ops.alpha_x, vec![0.3]);
    }

    #[test]
    fn rank_one_identity_split_is_one_quarter() {
        let (gx, gy) = grids();
        let ops = OperatorSet::assemble(&gx, &gy, &rank_one(), 0.1).unwrap();
        assert_eq!(ops.total_rank(), 4);
        // With zero time step the blocks reduce to the identity share.
        let zero_dt = OperatorSet::assemble(&gx, &gy, &rank_one(), 1e-300).unwrap();
        assert!(zero_dt.p1.diag().iter().all(|&d| (d - 0.5).abs() < 1e-12));
        let block = averaged_block(&ops.t1[0], ops.alpha_x[0], ops.dt_diag, 4);
        let want = TridiagonalMatrix::identity(7).lincomb(0.25, &ops.t1[0], -0.1 * ops.alpha_x[0]);
        assert_eq!(block, want);
    }

    #[test]
    fn averaged_sum_matches_blocks() {
        let (gx, gy) = grids();
        let ops = OperatorSet::assemble(&gx, &gy, &rank_one(), 0.05).unwrap();
        let v = DenseMatrix::from_fn(7, 1, |i, _| (i as f64).sin() + 0.3);
        let mut direct = DenseMatrix::zeros(7, 1);
        for (t, a) in ops.t1.iter().zip(&ops.alpha_x) {
            direct.add_scaled(1.0, &averaged_block(t, *a, 0.05, 4).apply(&v));
        }
        for (t, g) in ops.t3.iter().zip(&ops.gamma_x) {
            direct.add_scaled(1.0, &averaged_block(t, *g, 0.05, 4).apply(&v));
        }
        assert!(ops.p1.apply(&v).sub(&direct).max_abs() < 1e-14 * direct.max_abs());
    }

    #[test]
    fn terms_pair_left_and_right_sizes() {
        let (gx, gy) = grids();
        let ops = OperatorSet::assemble(&gx, &gy, &rank_one(), 0.05).unwrap();
        for t in ops.terms() {
            assert_eq!((t.left.n(), t.right.n()), (7, 5));
        }
    }

    #[test]
    fn cell_reynolds_values() {
        assert!((cell_reynolds(1.0, 1e-3, 9.52e-4) - 0.952).abs() < 1e-12);
        assert_eq!(cell_reynolds(0.0, 1.0, 0.1), 0.0);
        assert_eq!(cell_reynolds(2.0, 1.0, 1.0), 2.0);
        assert_eq!(cell_reynolds(1.0, 0.0, 0.1), f64::INFINITY);
    }

    #[test]
    fn rejects_nonpositive_step() {
        let (gx, gy) = grids();
        assert!(OperatorSet::assemble(&gx, &gy, &rank_one(), 0.0).is_err());
    }
}
