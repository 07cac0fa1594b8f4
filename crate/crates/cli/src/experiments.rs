//! The four experiment drivers behind `acs run`, `converge`, `complexity`
//! and `gmres-study`.

use std::path::Path;
use std::time::Instant;

use acs_core::discretization::Problem;
use acs_core::lowrank::{KrylovBasis, LowRankMatrix};
use acs_core::solver::{
    gmres_solve, x_krylov_ops, y_krylov_ops, ButcherTableau, ReducedSystem, Simulation, StepReport,
};

use crate::config::{RunConfig, TimeStep};
use crate::records::*;
use crate::CliError;

/// Everything produced by one time integration.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub history: Vec<RankHistoryRecord>,
    pub solution: LowRankMatrix,
    pub reports: Vec<StepReport>,
}

/// `Δt` for a step specification on a given simulation.
pub fn resolve_dt(sim: &Simulation<'_>, step: TimeStep) -> Result<f64, CliError> {
    Ok(match step {
        TimeStep::Dt(dt) => dt,
        TimeStep::LambdaD(l) => sim.dt_from_lambda_d(l)?,
        TimeStep::LambdaA(l) => sim.dt_from_lambda_a(l)?,
    })
}

/// Integrates the configured problem; `observer` sees the solution after
/// every step.
pub fn simulate(
    cfg: &RunConfig,
    observer: impl FnMut(&LowRankMatrix, &StepReport),
) -> Result<RunOutput, CliError> {
    let problem = cfg.example.problem();
    simulate_problem(&problem, cfg, observer)
}

fn simulate_problem(
    problem: &Problem,
    cfg: &RunConfig,
    observer: impl FnMut(&LowRankMatrix, &StepReport),
) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let sim = Simulation::new(problem, cfg.n, cfg.integrator.tableau(), cfg.tolerances)?;
    let dt = resolve_dt(&sim, cfg.step)?;
    let f0 = sim.initial()?;
    let out = sim.run(f0, 0.0, cfg.t_final, dt, observer)?;
    let wall = start.elapsed().as_secs_f64();
    let steady_state_error = match &problem.equilibrium {
        Some(eq) => {
            let (gx, gy) = problem.grids(cfg.n)?;
            let f_eq = LowRankMatrix::from_separable(std::slice::from_ref(eq), &gx, &gy)?;
            Some(l1_distance(&out.solution, &f_eq, gx.dx(), gy.dx()))
        }
        None => None,
    };
    let history: Vec<RankHistoryRecord> = out.reports.iter().map(RankHistoryRecord::from).collect();
    let summary = RunSummary {
        example: cfg.example.to_string(),
        integrator: cfg.integrator.to_string(),
        n: cfg.n,
        dt,
        lambda_d: sim.lambda_d(dt),
        lambda_a: sim.lambda_a(dt),
        t_final: cfg.t_final,
        steps: out.reports.len(),
        final_residual: out.reports.last().map_or(0.0, |r| r.residual),
        max_rank: out.reports.iter().map(|r| r.rank_after_trunc).max().unwrap_or(out.solution.rank()),
        final_rank: out.solution.rank(),
        steady_state_error,
        wall_time_s: cfg.timing.then_some(wall),
        seed: cfg.seed,
    };
    Ok(RunOutput {
        summary,
        history,
        solution: out.solution,
        reports: out.reports,
    })
}

/// `run`: integrates and writes `rank_history.csv` and `summary.json`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let out = simulate(cfg, |_, r| {
        log::info!(
            "t = {:.4}: rank {} (basis {}x{}, {} augmentations)",
            r.t,
            r.rank_after_trunc,
            r.basis_size_x,
            r.basis_size_y,
            r.krylov_iters
        )
    })?;
    std::fs::create_dir_all(&cfg.out)?;
    write_csv_file(&cfg.out.join(RANK_HISTORY_CSV), RANK_HISTORY_HEADER, &out.history)?;
    let json = serde_json::to_string_pretty(&out.summary)?;
    std::fs::write(cfg.out.join(SUMMARY_JSON), json + "\n")?;
    Ok(out)
}

/// Discrete L¹ distance `Δx Δy Σ|A - B|`.
pub fn l1_distance(a: &LowRankMatrix, b: &LowRankMatrix, dx: f64, dy: f64) -> f64 {
    let d = a.to_dense().sub(&b.to_dense());
    dx * dy * d.as_slice().iter().map(|v| v.abs()).sum::<f64>()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Ratio between the smallest swept step and the self-convergence reference step.
pub const REFERENCE_REFINEMENT: f64 = 16.0;

/// `converge`: errors of each `dt` against a run with the smallest step
/// refined by [`REFERENCE_REFINEMENT`], and the orders observed between
/// neighbouring rows.
pub fn converge(cfg: &RunConfig, dts: &[f64]) -> Result<Vec<ConvergenceRecord>, CliError> {
    if dts.len() < 3 {
        return Err(CliError::Config("need at least 3 dt values".into()));
    }
    if dts.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(CliError::Config("dt values must be positive".into()));
    }
    let mut sorted = dts.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Config("dt values must be distinct".into()));
    }
    let problem = cfg.example.problem();
    let (gx, gy) = problem.grids(cfg.n)?;
    let sim = Simulation::new(&problem, cfg.n, cfg.integrator.tableau(), cfg.tolerances)?;
    let with_dt = |dt: f64| RunConfig {
        step: TimeStep::Dt(dt),
        ..cfg.clone()
    };
    let dt_ref = sorted[sorted.len() - 1] / REFERENCE_REFINEMENT;
    let reference = simulate_problem(&problem, &with_dt(dt_ref), |_, _| {})?.solution;
    let mut rows: Vec<ConvergenceRecord> = Vec::new();
    for &dt in &sorted {
        let f = simulate_problem(&problem, &with_dt(dt), |_, _| {})?.solution;
        let err = l1_distance(&f, &reference, gx.dx(), gy.dx());
        let observed_order = rows.last().map(|prev| (prev.l1_error / err).ln() / (prev.dt / dt).ln());
        log::info!("dt = {dt:.3e}: L1 error {err:.3e}");
        rows.push(ConvergenceRecord {
            integrator: cfg.integrator.to_string(),
            n: cfg.n,
            dt,
            lambda_d: sim.lambda_d(dt),
            l1_error: err,
            observed_order,
        });
    }
    Ok(rows)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// `complexity`: wall time of a full run for each mesh size, median of
/// `repetitions`.
pub fn complexity(cfg: &RunConfig, ns: &[usize], repetitions: usize) -> Result<Vec<ComplexityRecord>, CliError> {
    if ns.len() < 4 {
        return Err(CliError::Config("need ≥ 4 points".into()));
    }
    let problem = cfg.example.problem();
    let mut rows = Vec::new();
    for &n in ns {
        let c = RunConfig { n, ..cfg.clone() };
        let mut times = Vec::new();
        let mut last = None;
        for _ in 0..repetitions.max(1) {
            let start = Instant::now();
            let out = simulate_problem(&problem, &c, |_, _| {})?;
            times.push(start.elapsed().as_secs_f64());
            last = Some(out);
        }
        let out = last.expect("at least one repetition");
        log::info!("n = {n}: {:.3} s, max rank {}", median(times.clone()), out.summary.max_rank);
        rows.push(ComplexityRecord {
            n,
            dt: out.summary.dt,
            wall_time_s: cfg.timing.then(|| median(times)),
            max_rank: out.summary.max_rank,
        });
    }
    Ok(rows)
}

/// `complexity --rank-scan`: one backward Euler step whose bases grow
/// without truncation; after each augmentation the reduced GMRES-ACS solve
/// is timed (median of `repetitions`).
pub fn gmres_scaling(
    cfg: &RunConfig,
    augmentations: usize,
    repetitions: usize,
) -> Result<Vec<GmresScalingRecord>, CliError> {
    let problem = cfg.example.problem();
    let tableau = ButcherTableau::backward_euler();
    let sim = Simulation::new(&problem, cfg.n, tableau, cfg.tolerances)?;
    let dt = resolve_dt(&sim, cfg.step)?;
    let ops = sim.operators(dt)?;
    let f0 = sim.initial()?;
    let (x_ops, y_ops) = (x_krylov_ops(&ops), y_krylov_ops(&ops));
    let mut bx = KrylovBasis::new(f0.u(), x_ops.len(), 0.0)?;
    let mut by = KrylovBasis::new(f0.v(), y_ops.len(), 0.0)?;
    let mut rows = Vec::new();
    for _ in 0..augmentations {
        bx.augment(&x_ops, 0.0)?;
        by.augment(&y_ops, 0.0)?;
        let (u, v) = (bx.q(), by.q());
        let sys = ReducedSystem::assemble(u, v, &ops)?;
        let rhs = u.t_matmul(f0.u()).matmul(f0.s()).matmul_t(&v.t_matmul(f0.v()));
        let mut times = Vec::new();
        for _ in 0..repetitions.max(1) {
            let start = Instant::now();
            gmres_solve(&sys, &rhs, cfg.tolerances.eps_gmres, cfg.tolerances.gmres_max_iter, true)?;
            times.push(start.elapsed().as_secs_f64());
        }
        log::info!("rank {}x{}: {:.4} s", u.cols(), v.cols(), median(times.clone()));
        rows.push(GmresScalingRecord {
            rank: u.cols().min(v.cols()),
            solve_time_s: cfg.timing.then(|| median(times)),
        });
    }
    Ok(rows)
}

/// `gmres-study`: residual histories of the first-stage reduced solve of one
/// step, with and/or without the ACS preconditioner, for each mesh size.
///
/// The bases get a fixed number of augmentations at the configured `ε_κ`, so
/// every mesh is compared on a system of the same construction whether or not
/// the adaptive step would accept it.
pub fn gmres_study(
    cfg: &RunConfig,
    ns: &[usize],
    modes: &[bool],
    augmentations: usize,
) -> Result<Vec<GmresRecord>, CliError> {
    if ns.is_empty() {
        return Err(CliError::Config("usage: gmres-study needs at least one --ns value".into()));
    }
    let problem = cfg.example.problem();
    let eps_kappa = cfg.tolerances.eps_kappa;
    let mut rows = Vec::new();
    for &n in ns {
        let sim = Simulation::new(&problem, n, cfg.integrator.tableau(), cfg.tolerances)?;
        let dt = resolve_dt(&sim, cfg.step)?;
        let ops = sim.operators(dt)?;
        let f0 = sim.initial()?;
        let (x_ops, y_ops) = (x_krylov_ops(&ops), y_krylov_ops(&ops));
        let mut bx = KrylovBasis::new(f0.u(), x_ops.len(), eps_kappa)?;
        let mut by = KrylovBasis::new(f0.v(), y_ops.len(), eps_kappa)?;
        for _ in 0..augmentations.max(1) {
            bx.augment(&x_ops, eps_kappa)?;
            by.augment(&y_ops, eps_kappa)?;
        }
        let (u, v) = (bx.q(), by.q());
        let sys = ReducedSystem::assemble(u, v, &ops)?;
        let rhs = u.t_matmul(f0.u()).matmul(f0.s()).matmul_t(&v.t_matmul(f0.v()));
        for &pre in modes {
            let out = gmres_solve(&sys, &rhs, cfg.tolerances.eps_gmres, cfg.tolerances.gmres_max_iter, pre)?;
            log::info!(
                "n = {n}, bases {}x{}, preconditioned = {pre}: {} iterations",
                u.cols(),
                v.cols(),
                out.iterations
            );
            rows.extend(out.history.iter().enumerate().map(|(k, &residual)| GmresRecord {
                n,
                preconditioned: pre,
                iteration: k,
                residual,
            }));
        }
    }
    Ok(rows)
}

/// Iterations used by each `(n, preconditioned)` history in `rows`.
pub fn gmres_iteration_counts(rows: &[GmresRecord]) -> Vec<(usize, bool, usize)> {
    let mut out: Vec<(usize, bool, usize)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some(last) if last.0 == r.n && last.1 == r.preconditioned => last.2 = last.2.max(r.iteration),
            _ => out.push((r.n, r.preconditioned, r.iteration)),
        }
    }
    out
}

/// Writes `rows` under `dir`, creating it when needed.
pub fn write_table<T: serde::Serialize>(dir: &Path, file: &str, header: &str, rows: &[T]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    write_csv_file(&dir.join(file), header, rows)
}
