use std::time::Instant;

use crate::discretization::{Grid1D, OperatorSet, TimeSeparableTerm};
use crate::error::{Error, Result};
use crate::linalg::{dense_svd, reduced_qr, DenseMatrix};
use crate::lowrank::{lowrank_residual_norm, svd_truncated_qr, truncated_svd, KrylovBasis, KrylovOp, LowRankMatrix};
use crate::solver::{gmres_solve, ButcherTableau, ReducedSystem, Tolerances};

/// Relative cutoff used to compress the right-hand side before the residual
/// is evaluated.
const RHS_COMPRESSION: f64 = 1e-14;

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepReport {
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// `min(r_x, r_y)` of the reduced solution before truncation.
    pub rank_before_trunc: usize,
    pub rank_after_trunc: usize,
    pub basis_size_x: usize,
    pub basis_size_y: usize,
    /// Basis augmentations performed.
    pub krylov_iters: usize,
    /// GMRES iterations of each stage in the accepted iteration.
    pub gmres_iters: Vec<usize>,
    /// Accepted relative residual.
    pub residual: f64,
    pub wall_time_s: f64,
    pub lambda_d: f64,
    pub lambda_a: f64,
}

impl StepReport {
    pub fn total_gmres_iters(&self) -> usize {
        self.gmres_iters.iter().sum()
    }
}

/// Grid samples of a source `Σ h_k(t) a_k(x) b_k(y)`, stored as
/// `Q_x (R_x diag(h(t)) R_yᵀ) Q_yᵀ`.
#[derive(Debug, Clone)]
pub struct SampledSource {
    qx: DenseMatrix,
    rx: DenseMatrix,
    qy: DenseMatrix,
    ry: DenseMatrix,
    terms: Vec<TimeSeparableTerm>,
}

fn orthogonal_split(m: DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    if m.rows() >= m.cols() {
        reduced_qr(&m)
    } else {
        (DenseMatrix::identity(m.rows()), m)
    }
}

impl SampledSource {
    pub fn new(terms: &[TimeSeparableTerm], gx: &Grid1D, gy: &Grid1D) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("source has no terms".into()));
        }
        let (xs, ys) = (gx.nodes(), gy.nodes());
        let cx: Vec<Vec<f64>> = terms.iter().map(|t| t.space.x.sample(&xs)).collect();
        let cy: Vec<Vec<f64>> = terms.iter().map(|t| t.space.y.sample(&ys)).collect();
        let (qx, rx) = orthogonal_split(DenseMatrix::from_fn(xs.len(), terms.len(), |i, k| cx[k][i]));
        let (qy, ry) = orthogonal_split(DenseMatrix::from_fn(ys.len(), terms.len(), |j, k| cy[k][j]));
        Ok(Self {
            qx,
            rx,
            qy,
            ry,
            terms: terms.to_vec(),
        })
    }

    fn core(&self, t: f64) -> DenseMatrix {
        let h: Vec<f64> = self.terms.iter().map(|term| term.time.value(t)).collect();
        self.rx.scale_cols(&h).matmul_t(&self.ry)
    }

    /// The source at time `t` in factored form.
    pub fn at(&self, t: f64) -> Result<LowRankMatrix> {
        LowRankMatrix::new(self.qx.clone(), self.core(t), self.qy.clone())
    }

    /// `Uᵀ S(t) V`.
    pub fn project(&self, u: &DenseMatrix, v: &DenseMatrix, t: f64) -> DenseMatrix {
        u.t_matmul(&self.qx).matmul(&self.core(t)).matmul(&self.qy.t_matmul(v))
    }

    /// Singular directions of `scale · S(t)` whose singular values exceed `cutoff`.
    fn dominant_ranges(&self, t: f64, scale: f64, cutoff: f64) -> Result<(DenseMatrix, DenseMatrix)> {
        let svd = dense_svd(&self.core(t))?;
        let r = svd.sigma.iter().take_while(|&&s| scale * s > cutoff).count();
        Ok((self.qx.matmul(&svd.u.columns(0, r)), self.qy.matmul(&svd.v.columns(0, r))))
    }

    fn frobenius_norm(&self, t: f64) -> f64 {
        self.core(t).frobenius_norm()
    }
}

/// A step together with the reduced system and right-hand side of its
/// accepted iteration.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub solution: LowRankMatrix,
    pub report: StepReport,
    pub system: Option<ReducedSystem>,
    /// Right-hand side of the last stage, projected onto the untruncated bases.
    pub rhs: Option<DenseMatrix>,
}

/// Chain operators for the x bases, in a fixed order.
pub fn x_krylov_ops(ops: &OperatorSet) -> Vec<KrylovOp<'_>> {
    let mut out = vec![KrylovOp::Multiply(&ops.p1), KrylovOp::Solve(&ops.p1_lu)];
    out.extend(ops.a1.iter().map(KrylovOp::Solve));
    out.extend(ops.a3.iter().map(KrylovOp::Solve));
    out.extend(ops.phi1.iter().map(|d| KrylovOp::Diagonal(d)));
    out.extend(ops.sigma1.iter().map(|d| KrylovOp::Diagonal(d)));
    out
}

/// Chain operators for the y bases, in a fixed order.
pub fn y_krylov_ops(ops: &OperatorSet) -> Vec<KrylovOp<'_>> {
    let mut out = vec![KrylovOp::Multiply(&ops.p2), KrylovOp::Solve(&ops.p2_lu)];
    out.extend(ops.a2.iter().map(KrylovOp::Solve));
    out.extend(ops.a4.iter().map(KrylovOp::Solve));
    out.extend(ops.phi2.iter().map(|d| KrylovOp::Diagonal(d)));
    out.extend(ops.sigma2.iter().map(|d| KrylovOp::Diagonal(d)));
    out
}

/// Backward Euler step `F₁ - Δt 𝓛(F₁) = F₀` with `ops.dt_diag = Δt`.
pub fn backward_euler_step(f0: &LowRankMatrix, ops: &OperatorSet, tols: &Tolerances) -> Result<(LowRankMatrix, StepReport)> {
    dirk_step(f0, ops, &ButcherTableau::backward_euler(), tols)
}

/// DIRK step for the homogeneous equation with `ops.dt_diag = a_kk Δt`.
pub fn dirk_step(
    f0: &LowRankMatrix,
    ops: &OperatorSet,
    tableau: &ButcherTableau,
    tols: &Tolerances,
) -> Result<(LowRankMatrix, StepReport)> {
    let out = dirk_step_detailed(f0, ops, tableau, tols, None, true)?;
    Ok((out.solution, out.report))
}

/// Adaptive-rank DIRK step with an optional source starting at time `t0`.
///
/// Bases are built once per outer iteration from the first-stage operators
/// and shared by all stages, as is the ACS preconditioner. The step is
/// accepted once the residual of the last stage, relative to the larger of
/// `‖F₀‖_F` and `dt_diag ‖S(t_k)‖_F` over the stages, drops below `eps_tol`;
/// otherwise the bases are augmented again.
pub fn dirk_step_detailed(
    f0: &LowRankMatrix,
    ops: &OperatorSet,
    tableau: &ButcherTableau,
    tols: &Tolerances,
    source: Option<(&SampledSource, f64)>,
    precondition: bool,
) -> Result<StepOutcome> {
    tols.validate()?;
    let start = Instant::now();
    if f0.shape() != (ops.nx, ops.ny) {
        return Err(Error::Dimension(format!(
            "solution is {}x{}, operators are {}x{}",
            f0.shape().0,
            f0.shape().1,
            ops.nx,
            ops.ny
        )));
    }
    let s = tableau.stages();
    let dt = ops.dt_diag / tableau.diagonal();
    let stage_times: Vec<f64> = match source {
        Some((_, t0)) => tableau.c().iter().map(|c| t0 + c * dt).collect(),
        None => Vec::new(),
    };
    let mut report = StepReport {
        dt,
        t: source.map_or(0.0, |(_, t0)| t0 + dt),
        ..StepReport::default()
    };

    // Seeds: the range of F₀ plus the dominant range of each stage source.
    let s0_norm = f0.frobenius_norm();
    let mut seed_x = vec![f0.u().clone()];
    let mut seed_y = vec![f0.v().clone()];
    let mut rhs_scale = s0_norm;
    if let Some((src, _)) = source {
        for &tk in &stage_times {
            rhs_scale = rhs_scale.max(ops.dt_diag * src.frobenius_norm(tk));
        }
        for &tk in &stage_times {
            let (x, y) = src.dominant_ranges(tk, ops.dt_diag, tols.eps * rhs_scale)?;
            seed_x.push(x);
            seed_y.push(y);
        }
    }
    if rhs_scale == 0.0 {
        report.krylov_iters = 1;
        report.wall_time_s = start.elapsed().as_secs_f64();
        return Ok(StepOutcome {
            solution: LowRankMatrix::zeros(ops.nx, ops.ny),
            report,
            system: None,
            rhs: None,
        });
    }
    let seed_x = svd_truncated_qr(&seed_x.iter().collect::<Vec<_>>(), 1e-14)?;
    let seed_y = svd_truncated_qr(&seed_y.iter().collect::<Vec<_>>(), 1e-14)?;

    let x_ops = x_krylov_ops(ops);
    let y_ops = y_krylov_ops(ops);
    let mut bx = KrylovBasis::new(&seed_x, x_ops.len(), tols.eps_kappa)?;
    let mut by = KrylovBasis::new(&seed_y, y_ops.len(), tols.eps_kappa)?;

    let mut residual = f64::INFINITY;
    for m in 1..=tols.max_iter {
        bx.augment(&x_ops, tols.eps_kappa)?;
        by.augment(&y_ops, tols.eps_kappa)?;
        let (u1, v1) = (bx.q(), by.q());
        let sys = ReducedSystem::assemble(u1, v1, ops)?;
        let g1 = u1.t_matmul(f0.u()).matmul(f0.s()).matmul_t(&v1.t_matmul(f0.v()));

        let mut stage_s: Vec<DenseMatrix> = Vec::with_capacity(s);
        let mut stage_g: Vec<DenseMatrix> = Vec::with_capacity(s);
        let mut gmres_iters = Vec::with_capacity(s);
        let mut rhs = g1.clone();
        for k in 0..s {
            let mut g = g1.clone();
            for l in 0..k {
                let w = tableau.a(k, l) / tableau.a(l, l);
                g.add_scaled(w, &stage_s[l]);
                g.add_scaled(-w, &stage_g[l]);
            }
            rhs = g.clone();
            if let Some((src, _)) = source {
                rhs.add_scaled(ops.dt_diag, &src.project(u1, v1, stage_times[k]));
            }
            let sol = gmres_solve(&sys, &rhs, tols.eps_gmres, tols.gmres_max_iter, precondition)?;
            gmres_iters.push(sol.iterations);
            stage_s.push(sol.solution);
            stage_g.push(g);
        }
        let s1 = stage_s.pop().expect("at least one stage");
        let full = LowRankMatrix::new(u1.clone(), s1, v1.clone())?;
        let trunc = truncated_svd(&full, tols.eps)?;
        // The right-hand side usually has far lower rank than the bases, and
        // its width sets the cost of the residual evaluation.
        let b = truncated_svd(&LowRankMatrix::new(u1.clone(), rhs.clone(), v1.clone())?, RHS_COMPRESSION)?.matrix;
        let abs_res = lowrank_residual_norm(&trunc.matrix, &b, ops, ops.dt_diag)?;
        residual = abs_res / rhs_scale;
        log::debug!(
            "iteration {m}: bases {}x{}, rank {}, residual {residual:.3e}",
            u1.cols(),
            v1.cols(),
            trunc.matrix.rank()
        );
        if residual < tols.eps_tol {
            report.rank_before_trunc = full.rank();
            report.rank_after_trunc = trunc.matrix.rank();
            report.basis_size_x = u1.cols();
            report.basis_size_y = v1.cols();
            report.krylov_iters = m;
            report.gmres_iters = gmres_iters;
            report.residual = residual;
            report.wall_time_s = start.elapsed().as_secs_f64();
            return Ok(StepOutcome {
                solution: trunc.matrix,
                report,
                system: Some(sys),
                rhs: Some(rhs),
            });
        }
    }
    Err(Error::StepNotConverged {
        iterations: tols.max_iter,
        residual,
    })
}
