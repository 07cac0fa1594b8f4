//! Dense reference computations for tests and validation runs.
//!
//! Everything here forms full `N₁N₂`-sized objects and is therefore limited
//! to small grids. Solver code never depends on this module.

use rand::Rng;

use crate::discretization::{CoefficientSet, Grid1D, OperatorSet, Profile, SeparableTerm};
use crate::error::{Error, Result};
use crate::discretization::Factor;
use crate::linalg::{dense_svd, kron, unvec, vec_of, DenseLu, DenseMatrix, SylvesterSolver};
use crate::lowrank::LowRankMatrix;
use crate::solver::{gmres, ButcherTableau, GmresOutcome};

/// Largest `N₁N₂` for which a Kronecker operator may be formed.
pub const MAX_DENSE_UNKNOWNS: usize = 16384;

/// The discrete operator `𝓛` as the Kronecker sum
/// `Σ (Φ₂ ⊗ T₁) + (T₂ ⊗ Φ₁) + (Σ₂ ⊗ T₃) + (T₄ ⊗ Σ₁)`.
#[derive(Debug, Clone)]
pub struct DenseProblem {
    nx: usize,
    ny: usize,
    kron_sum: DenseMatrix,
}

impl DenseProblem {
    pub fn new(ops: &OperatorSet) -> Result<Self> {
        let size = ops.nx * ops.ny;
        if size > MAX_DENSE_UNKNOWNS {
            return Err(Error::TooLarge {
                size,
                limit: MAX_DENSE_UNKNOWNS,
            });
        }
        let mut k = DenseMatrix::zeros(size, size);
        for t in ops.terms() {
            k.add_scaled(1.0, &kron(&t.right.to_dense(), &t.left.to_dense()));
        }
        Ok(Self {
            nx: ops.nx,
            ny: ops.ny,
            kron_sum: k,
        })
    }

    pub fn operator(&self) -> &DenseMatrix {
        &self.kron_sum
    }

    /// Factorization of `I - shift 𝒦`.
    pub fn shifted_lu(&self, shift: f64) -> Result<DenseLu> {
        let n = self.kron_sum.rows();
        let m = DenseMatrix::identity(n).sub(&self.kron_sum.scale(shift));
        DenseLu::factor(&m)
    }

    /// `𝓛(F)` through the Kronecker form.
    pub fn apply(&self, f: &DenseMatrix) -> DenseMatrix {
        unvec(self.kron_sum.matmul(&vec_of(f)).as_slice(), self.nx, self.ny)
    }
}

/// Backward Euler step: solves `(I - Δt 𝒦) vec(F₁) = vec(F₀)`.
pub fn dense_step(problem: &DenseProblem, f0: &DenseMatrix, dt: f64) -> Result<DenseMatrix> {
    let x = problem.shifted_lu(dt)?.solve(&vec_of(f0))?;
    Ok(unvec(x.as_slice(), problem.nx, problem.ny))
}

/// DIRK step solved stage by stage in Kronecker form, with an optional
/// source `S(t)` and start time `t0`.
pub fn dense_dirk_step(
    problem: &DenseProblem,
    tableau: &ButcherTableau,
    f0: &DenseMatrix,
    dt: f64,
    t0: f64,
    source: Option<&dyn Fn(f64) -> DenseMatrix>,
) -> Result<DenseMatrix> {
    let s = tableau.stages();
    let add = tableau.diagonal() * dt;
    let lu = problem.shifted_lu(add)?;
    let mut slopes: Vec<DenseMatrix> = Vec::with_capacity(s);
    let mut stage = f0.clone();
    for k in 0..s {
        let mut b = f0.clone();
        for (l, y) in slopes.iter().enumerate() {
            b.add_scaled(dt * tableau.a(k, l), y);
        }
        if let Some(src) = source {
            b.add_scaled(add, &src(t0 + tableau.c()[k] * dt));
        }
        let x = lu.solve(&vec_of(&b))?;
        stage = unvec(x.as_slice(), problem.nx, problem.ny);
        // Y_k = 𝓛(F_k) + S(t_k), recovered without another operator application.
        let mut y = stage.sub(&b).scale(1.0 / add);
        if let Some(src) = source {
            y.add_scaled(1.0, &src(t0 + tableau.c()[k] * dt));
        }
        slopes.push(y);
    }
    Ok(stage)
}

/// Solver for `F - dt_diag 𝓛(F) = B` on grids too large for the Kronecker
/// form: GMRES on the stencil operator, left-preconditioned by the averaged
/// Sylvester operator `P₁Z + ZP₂ᵀ` at full grid size.
#[derive(Debug)]
pub struct FullGridSolver<'a> {
    ops: &'a OperatorSet,
    preconditioner: SylvesterSolver,
}

impl<'a> FullGridSolver<'a> {
    pub fn new(ops: &'a OperatorSet) -> Result<Self> {
        let p1 = Factor::Tri(&ops.p1).to_dense();
        let p2 = Factor::Tri(&ops.p2).to_dense();
        Ok(Self {
            ops,
            preconditioner: SylvesterSolver::new(&p1, &p2)?,
        })
    }

    pub fn apply(&self, f: &DenseMatrix) -> DenseMatrix {
        let mut out = f.clone();
        out.add_scaled(-self.ops.dt_diag, &self.ops.apply_dense(f));
        out
    }

    /// Solves to a relative preconditioned residual of `tol`.
    pub fn solve(&self, b: &DenseMatrix, tol: f64, max_iter: usize) -> Result<GmresOutcome> {
        let rhs = self.preconditioner.solve(b)?;
        gmres(&rhs, tol, max_iter, |x| self.preconditioner.solve(&self.apply(x)))
    }
}

/// `‖F₁ - dt 𝓛(F₁) - B‖_F` evaluated with dense matrix products.
pub fn dense_residual_norm(ops: &OperatorSet, f1: &DenseMatrix, b: &DenseMatrix, dt_diag: f64) -> f64 {
    let mut r = f1.sub(b);
    r.add_scaled(-dt_diag, &ops.apply_dense(f1));
    r.frobenius_norm()
}

/// Number of singular values with `σ_j / ‖F‖_F > eps`, the rule used by
/// the solution truncation.
pub fn epsilon_rank(f: &DenseMatrix, eps: f64) -> Result<usize> {
    if f.rows() == 0 || f.cols() == 0 {
        return Ok(0);
    }
    let norm = f.frobenius_norm();
    if norm == 0.0 {
        return Ok(0);
    }
    Ok(dense_svd(f)?.sigma.iter().filter(|&&s| s / norm > eps).count())
}

/// A randomly drawn small problem: grids, multi-term coefficients, a
/// low-rank initial state and a step size.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub gx: Grid1D,
    pub gy: Grid1D,
    pub coefficients: CoefficientSet,
    pub f0: LowRankMatrix,
    pub dt: f64,
}

impl RandomInstance {
    pub fn operators(&self) -> Result<OperatorSet> {
        OperatorSet::assemble(&self.gx, &self.gy, &self.coefficients, self.dt)
    }
}

fn random_positive(rng: &mut impl Rng) -> Profile {
    let base = Profile::constant(rng.gen_range(0.2..1.0));
    let bump = Profile::gaussian(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..4.0)).scaled(rng.gen_range(0.0..1.0));
    base.sum(&bump)
}

fn random_signed(rng: &mut impl Rng) -> Profile {
    let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Profile::polynomial(c).sum(&Profile::sine(rng.gen_range(0.5..3.0)).scaled(rng.gen_range(-1.0..1.0)))
}

/// Draws an instance on `[-1, 1]²` with `8 ≤ N₁, N₂ ≤ max_n`, between one
/// and three diffusion terms and up to three advection terms per direction.
pub fn random_instance(rng: &mut impl Rng, max_n: usize) -> Result<RandomInstance> {
    let nx = rng.gen_range(8..=max_n.max(8));
    let ny = rng.gen_range(8..=max_n.max(8));
    let gx = Grid1D::new(nx, -1.0, 1.0)?;
    let gy = Grid1D::new(ny, -1.0, 1.0)?;
    let terms = |positive: bool, count: usize, rng: &mut _| -> Vec<SeparableTerm> {
        (0..count)
            .map(|_| {
                if positive {
                    SeparableTerm::new(random_positive(rng), random_positive(rng))
                } else {
                    SeparableTerm::new(random_signed(rng), random_signed(rng))
                }
            })
            .collect()
    };
    let lx = rng.gen_range(1..=3);
    let ly = rng.gen_range(1..=3);
    let kx = rng.gen_range(0..=3);
    let ky = rng.gen_range(0..=3);
    let coefficients = CoefficientSet::new(
        terms(true, lx, rng),
        terms(true, ly, rng),
        terms(false, kx, rng),
        terms(false, ky, rng),
    )?;
    let rank = rng.gen_range(1..=4);
    let mut initial = Vec::with_capacity(rank);
    for _ in 0..rank {
        let x = Profile::gaussian(rng.gen_range(-0.6..0.6), rng.gen_range(2.0..20.0));
        let y = Profile::gaussian(rng.gen_range(-0.6..0.6), rng.gen_range(2.0..20.0));
        initial.push(SeparableTerm::new(x.scaled(rng.gen_range(0.2..1.0)), y));
    }
    let f0 = LowRankMatrix::from_separable(&initial, &gx, &gy)?;
    let dt = 10f64.powf(rng.gen_range(-3.0..-1.5));
    Ok(RandomInstance {
        gx,
        gy,
        coefficients,
        f0,
        dt,
    })
}
