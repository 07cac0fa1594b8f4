//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines are always shown. Pass criterion
//! numbers as arguments to run a subset, e.g.
//! `cargo test -p acs-cli --test acceptance -- 3 7`.

use std::time::Instant;

use acs_cli::config::{ConfigFile, Integrator, RunConfig};
use acs_cli::experiments::{self, loglog_slope};
use acs_core::discretization::{ExampleId, OperatorSet, SeparableTerm};
use acs_core::linalg::{
    dense_solve, dense_svd, kron, reduced_qr, sylvester_solve, thomas_solve, vec_of, DenseMatrix, TriLu,
    TridiagonalMatrix,
};
use acs_core::lowrank::{lowrank_residual_norm, LowRankMatrix};
use acs_core::oracle::{dense_residual_norm, epsilon_rank, random_instance, FullGridSolver, RandomInstance};
use acs_core::solver::{backward_euler_step, Simulation, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn resolve(file: ConfigFile) -> RunConfig {
    RunConfig::resolve(file, false).expect("acceptance configuration is valid")
}

fn config(example: &str) -> ConfigFile {
    ConfigFile {
        example: Some(example.into()),
        no_timing: Some(true),
        ..ConfigFile::default()
    }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

const INSTANCES: usize = 20;
const INSTANCE_SEED: u64 = 20;
const STEP_TOLERANCES: (f64, f64, f64, f64) = (1e-8, 1e-10, 1e-11, 1e-11);

fn instances() -> Vec<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED);
    (0..INSTANCES).map(|_| random_instance(&mut rng, 48).unwrap()).collect()
}

fn step_tolerances() -> Tolerances {
    let (tol, kappa, eps, gmres) = STEP_TOLERANCES;
    Tolerances::new(tol, kappa, eps, gmres).unwrap()
}

/// Densified backward Euler steps against the dense residual.
fn oracle_equivalence() -> Verdict {
    let tols = step_tolerances();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for inst in instances() {
        let ops = inst.operators().unwrap();
        let f0 = inst.f0.to_dense();
        match backward_euler_step(&inst.f0, &ops, &tols) {
            Ok((f1, _)) => {
                let rel = dense_residual_norm(&ops, &f1.to_dense(), &f0, ops.dt_diag) / f0.frobenius_norm();
                worst = worst.max(rel);
                if rel > tols.eps_tol {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Verdict {
        pass: failures == 0,
        detail: format!(
            "{INSTANCES} instances, worst dense residual / |F0| = {worst:.2e} (limit {:.0e}), {failures} failures",
            tols.eps_tol
        ),
    }
}

/// The factored residual against the dense one, at the accepted solution
/// (relative to `‖F₀‖_F`, the scale of the acceptance test) and at an
/// unconverged candidate (relative to the residual itself).
fn residual_identity() -> Verdict {
    let tols = step_tolerances();
    let (mut at_solution, mut away): (f64, f64) = (0.0, 0.0);
    for inst in instances() {
        let ops = inst.operators().unwrap();
        let f0 = inst.f0.to_dense();
        let (f1, _) = backward_euler_step(&inst.f0, &ops, &tols).unwrap();
        let dense = dense_residual_norm(&ops, &f1.to_dense(), &f0, ops.dt_diag);
        let factored = lowrank_residual_norm(&f1, &inst.f0, &ops, ops.dt_diag).unwrap();
        at_solution = at_solution.max((factored - dense).abs() / f0.frobenius_norm());
        let dense = dense_residual_norm(&ops, &f0, &f0, ops.dt_diag);
        let factored = lowrank_residual_norm(&inst.f0, &inst.f0, &ops, ops.dt_diag).unwrap();
        away = away.max((factored - dense).abs() / dense);
    }
    Verdict {
        pass: at_solution <= 1e-9 && away <= 1e-9,
        detail: format!(
            "max |factored - dense| / |F0| = {at_solution:.2e} at accepted steps, / |R| = {away:.2e} at F1 = F0 (limit 1e-9)"
        ),
    }
}

/// Self-convergence orders of the three integrators on the first example.
fn temporal_orders() -> Verdict {
    let dts: Vec<f64> = [9.0, 12.0, 16.0, 21.0].iter().map(|k| 0.5 / k).collect();
    let ranges = [
        (Integrator::Be, 0.8, 1.2),
        (Integrator::Dirk2, 1.7, 2.3),
        (Integrator::Dirk3, 2.6, 3.4),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (integrator, lo, hi) in ranges {
        let cfg = resolve(ConfigFile {
            integrator: Some(integrator),
            n: Some(128),
            t_final: Some(0.5),
            ..config("ex41")
        });
        let rows = experiments::converge(&cfg, &dts).unwrap();
        let orders: Vec<f64> = rows.iter().filter_map(|r| r.observed_order).collect();
        pass &= orders.iter().all(|&p| within(p, lo, hi));
        parts.push(format!("{integrator} [{}] in [{lo}, {hi}]", fmt_list(&orders)));
    }
    let (lo, hi) = lambda_range(&dts);
    Verdict {
        pass,
        detail: format!("lambda_D {lo:.0}..{hi:.0}: {}", parts.join("; ")),
    }
}

fn lambda_range(dts: &[f64]) -> (f64, f64) {
    let problem = ExampleId::Ex41.problem();
    let sim = Simulation::new(&problem, 128, Integrator::Be.tableau(), step_tolerances()).unwrap();
    let l: Vec<f64> = dts.iter().map(|&dt| sim.lambda_d(dt)).collect();
    (l.iter().cloned().fold(f64::INFINITY, f64::min), l.iter().cloned().fold(0.0, f64::max))
}

/// Wall time of a short DIRK2 run against the mesh size.
fn linear_complexity() -> Verdict {
    let cfg = resolve(ConfigFile {
        dt: Some(1e-3),
        t_final: Some(0.05),
        no_timing: Some(false),
        ..config("ex41")
    });
    let ns = [1000, 2000, 4000, 8000];
    let rows = experiments::complexity(&cfg, &ns, 1).unwrap();
    let n: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let t: Vec<f64> = rows.iter().map(|r| r.wall_time_s.unwrap()).collect();
    let slope = loglog_slope(&n, &t);
    Verdict {
        pass: within(slope, 0.8, 1.3),
        detail: format!("N 1000..8000, times [{}] s, slope {slope:.2} in [0.8, 1.3]", fmt_list(&t)),
    }
}

/// Reduced GMRES-ACS solve time against the untruncated basis size.
fn cubic_reduced_solve() -> Verdict {
    let cfg = resolve(ConfigFile {
        n: Some(4000),
        dt: Some(1e-3),
        eps_gmres: Some(1e-10),
        no_timing: Some(false),
        ..config("ex41")
    });
    let rows = experiments::gmres_scaling(&cfg, 8, 3).unwrap();
    let r: Vec<f64> = rows.iter().map(|x| x.rank as f64).collect();
    let t: Vec<f64> = rows.iter().map(|x| x.solve_time_s.unwrap()).collect();
    let slope = loglog_slope(&r, &t);
    let span = r[r.len() - 1] / r[0];
    Verdict {
        pass: within(slope, 2.5, 3.5) && span >= 4.0,
        detail: format!(
            "ranks {}..{} (span {span:.1}x, need 4x), slope {slope:.2} in [2.5, 3.5]",
            r[0],
            r[r.len() - 1]
        ),
    }
}

/// Iteration counts of the reduced solve with and without the preconditioner.
fn mesh_independence() -> Verdict {
    let cfg = resolve(ConfigFile {
        dt: Some(0.01),
        eps_gmres: Some(1e-8),
        ..config("ex41")
    });
    let rows = experiments::gmres_study(&cfg, &[200, 1000, 2500], &[true, false], 8).unwrap();
    let counts = experiments::gmres_iteration_counts(&rows);
    let with: Vec<(usize, usize)> = counts.iter().filter(|c| c.1).map(|c| (c.0, c.2)).collect();
    let without: Vec<(usize, usize)> = counts.iter().filter(|c| !c.1).map(|c| (c.0, c.2)).collect();
    let lo = with.iter().map(|c| c.1).min().unwrap_or(0);
    let hi = with.iter().map(|c| c.1).max().unwrap_or(0);
    let faster = with.len() == 3 && with.iter().zip(&without).all(|(p, u)| p.0 == u.0 && p.1 < u.1);
    let fmt = |v: &[(usize, usize)]| v.iter().map(|(n, k)| format!("{n}:{k}")).collect::<Vec<_>>().join(" ");
    Verdict {
        pass: faster && lo > 0 && hi <= 2 * lo,
        detail: format!(
            "preconditioned [{}], unpreconditioned [{}]; spread {:.2}x (limit 2x)",
            fmt(&with),
            fmt(&without),
            hi as f64 / lo.max(1) as f64
        ),
    }
}

/// Rank tracking on the manufactured-source example against a full-grid
/// backward Euler reference with the same steps.
fn rank_tracking() -> Verdict {
    let cfg = resolve(config("ex42"));
    let samples = [1.0, 5.0, 10.0, 15.0, 18.0];
    let out = experiments::simulate(&cfg, |_, _| {}).expect("adaptive run");
    let problem = ExampleId::Ex42.problem();
    let sim = Simulation::new(&problem, cfg.n, cfg.integrator.tableau(), cfg.tolerances).unwrap();
    let (gx, gy) = sim.grids();
    let eps = cfg.tolerances.eps;
    let source_at = |t: f64| -> LowRankMatrix {
        let terms: Vec<SeparableTerm> = problem
            .source
            .iter()
            .map(|s| SeparableTerm::new(s.space.x.scaled(s.time.value(t)), s.space.y.clone()))
            .collect();
        LowRankMatrix::from_separable(&terms, &gx, &gy).unwrap()
    };

    let mut f = sim.initial().unwrap().to_dense();
    let mut t = 0.0;
    let mut next = 0;
    let mut worst = 0usize;
    let mut rows = Vec::new();
    let mut step_sizes: Vec<f64> = out.reports.iter().map(|r| r.dt).collect();
    step_sizes.dedup();
    let operators: Vec<OperatorSet> = step_sizes.iter().map(|&dt| sim.operators(dt).unwrap()).collect();
    let solvers: Vec<FullGridSolver> = operators.iter().map(|o| FullGridSolver::new(o).unwrap()).collect();
    for report in &out.reports {
        let dt = report.dt;
        let solver = &solvers[step_sizes.iter().position(|&d| d == dt).unwrap()];
        let mut b = f.clone();
        b.add_scaled(dt, &source_at(t + dt).to_dense());
        f = solver.solve(&b, 1e-13, 500).unwrap().solution;
        t = report.t;
        if next < samples.len() && (t - samples[next]).abs() <= 0.5 * dt + 1e-12 {
            let reference = epsilon_rank(&f, eps).unwrap();
            let diff = reference.abs_diff(report.rank_after_trunc);
            worst = worst.max(diff);
            rows.push(format!("t={:.2}: {} vs {}", t, report.rank_after_trunc, reference));
            next += 1;
        }
    }
    Verdict {
        pass: next == samples.len() && worst <= 2,
        detail: format!("adaptive vs reference eps-rank {}; max deviation {worst} (limit 2)", rows.join(", ")),
    }
}

/// Maximum truncated rank over the swirling-flow run. The run stops at the
/// first step above the bound since the verdict cannot change after it.
fn swirl_rank_bound() -> Verdict {
    const LIMIT: usize = 25;
    let cfg = resolve(config("ex43"));
    let problem = ExampleId::Ex43.problem();
    let sim = Simulation::new(&problem, cfg.n, cfg.integrator.tableau(), cfg.tolerances).unwrap();
    let dt = experiments::resolve_dt(&sim, cfg.step).unwrap();
    let steps = (cfg.t_final / dt - 1e-9).ceil() as usize;
    let ops = sim.operators(dt).unwrap();
    let mut f = sim.initial().unwrap();
    let (mut t, mut peak, mut peak_t) = (0.0, f.rank(), 0.0);
    for k in 0..steps {
        let last = (k + 1 == steps).then(|| sim.operators(cfg.t_final - t).unwrap());
        let out = match sim.step(&f, t, last.as_ref().unwrap_or(&ops)) {
            Ok(out) => out,
            Err(e) => {
                return Verdict {
                    pass: false,
                    detail: format!("step at t={t:.3} failed: {e}"),
                }
            }
        };
        f = out.solution;
        t = out.report.t;
        if out.report.rank_after_trunc > peak {
            (peak, peak_t) = (out.report.rank_after_trunc, t);
        }
        if peak > LIMIT {
            break;
        }
    }
    let reached = if peak > LIMIT {
        format!("stopped at t={t:.2} of {}", cfg.t_final)
    } else {
        format!("t_final {}", cfg.t_final)
    };
    Verdict {
        pass: peak <= LIMIT,
        detail: format!(
            "N {}, lambda_A {:.1}, eps {:.1e}: max rank {peak} at t={peak_t:.2} (limit {LIMIT}), {reached}",
            cfg.n,
            sim.lambda_a(dt),
            cfg.tolerances.eps
        ),
    }
}

/// Distance of the long-time solution to the closed-form equilibrium under
/// mesh refinement.
fn steady_state_order() -> Verdict {
    let ns = [32usize, 64, 128, 256];
    let mut errors = Vec::new();
    for &n in &ns {
        let cfg = resolve(ConfigFile {
            n: Some(n),
            dt: Some(1000.0),
            ..config("ex44")
        });
        match experiments::simulate(&cfg, |_, _| {}) {
            Ok(out) => errors.push(out.summary.steady_state_error.unwrap()),
            Err(e) => {
                return Verdict {
                    pass: false,
                    detail: format!("run at N {n} failed: {e}"),
                }
            }
        }
    }
    let n: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = -loglog_slope(&n, &errors);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    Verdict {
        pass: within(slope, 1.7, 2.3),
        detail: format!("N 32..256, L1 errors [{}], order {slope:.2} in [1.7, 2.3]", shown.join(", ")),
    }
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// A random matrix with between 1 and `max` rows and columns.
fn random_shape(rng: &mut impl Rng, max: usize) -> DenseMatrix {
    let (rows, cols) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
    random_matrix(rng, rows, cols)
}

/// 200 randomized trials of each dense kernel.
fn kernel_suite() -> Verdict {
    const TRIALS: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut qr, mut svd, mut sylv, mut thomas, mut kr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let cols = rng.gen_range(1..=30);
        let rows = rng.gen_range(cols..=60);
        let m = random_matrix(&mut rng, rows, cols);
        let (q, _) = reduced_qr(&m);
        qr = qr.max(q.t_matmul(&q).sub(&DenseMatrix::identity(q.cols())).max_abs());

        let m = random_shape(&mut rng, 40);
        let s = dense_svd(&m).unwrap();
        let back = s.u.scale_cols(&s.sigma).matmul_t(&s.v);
        svd = svd.max(back.sub(&m).frobenius_norm() / m.frobenius_norm());

        let (na, nb) = (rng.gen_range(1..=30), rng.gen_range(1..=30));
        let shift = rng.gen_range(2.0..6.0);
        let a = random_matrix(&mut rng, na, na).add(&DenseMatrix::identity(na).scale(shift));
        let b = random_matrix(&mut rng, nb, nb).add(&DenseMatrix::identity(nb).scale(shift));
        let c = random_matrix(&mut rng, na, nb);
        let z = sylvester_solve(&a, &b, &c).unwrap();
        let res = a.matmul(&z).add(&z.matmul_t(&b)).sub(&c);
        sylv = sylv.max(res.frobenius_norm() / c.frobenius_norm());

        let n = rng.gen_range(2..=80);
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(2.5..4.0)).collect();
        let t = TridiagonalMatrix::new(sub, diag, sup).unwrap();
        let rhs = random_matrix(&mut rng, n, 3);
        let x = thomas_solve(&TriLu::factor(&t).unwrap(), &rhs).unwrap();
        let y = dense_solve(&t.to_dense(), &rhs).unwrap();
        thomas = thomas.max(x.sub(&y).max_abs() / y.max_abs().max(1.0));

        let a = random_shape(&mut rng, 7);
        let b = random_shape(&mut rng, 7);
        let x = random_matrix(&mut rng, a.cols(), b.cols());
        let lhs = vec_of(&a.matmul(&x).matmul_t(&b));
        let rhs = kron(&b, &a).matmul(&vec_of(&x));
        kr = kr.max(lhs.sub(&rhs).max_abs());
    }
    let checks = [
        ("QR orthogonality", qr, 1e-12),
        ("SVD reconstruction", svd, 1e-12),
        ("Bartels-Stewart residual", sylv, 1e-10),
        ("Thomas vs LU", thomas, 1e-12),
        ("Kronecker vec", kr, 1e-13),
    ];
    let parts: Vec<String> = checks.iter().map(|(n, v, lim)| format!("{n} {v:.1e} (<= {lim:.0e})")).collect();
    Verdict {
        pass: checks.iter().all(|(_, v, lim)| v <= lim),
        detail: format!("{TRIALS} trials each: {}", parts.join(", ")),
    }
}

type Criterion = (usize, &'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 10] = [
    (1, "oracle equivalence", oracle_equivalence),
    (2, "low-rank residual identity", residual_identity),
    (3, "temporal orders", temporal_orders),
    (4, "linear complexity in N", linear_complexity),
    (5, "cubic reduced-solve scaling", cubic_reduced_solve),
    (6, "preconditioner mesh independence", mesh_independence),
    (7, "rank tracking", rank_tracking),
    (8, "swirling rank bound", swirl_rank_bound),
    (9, "steady-state spatial order", steady_state_order),
    (10, "kernel suite", kernel_suite),
];

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name}: {} [{:.1} s]", v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
