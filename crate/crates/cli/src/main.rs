use std::path::PathBuf;
use std::process::ExitCode;

use acs_cli::config::{ConfigFile, Integrator, RunConfig};
use acs_cli::experiments::{self, loglog_slope};
use acs_cli::records::*;
use acs_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "acs", version, about = "Adaptive-rank implicit solver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one example and write rank_history.csv and summary.json.
    Run(Common),
    /// Temporal self-convergence study; writes convergence.csv.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Step sizes, comma separated (at least three).
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
    },
    /// Wall time against mesh size; writes complexity.csv, or
    /// gmres_scaling.csv with --rank-scan.
    Complexity {
        #[command(flatten)]
        common: Common,
        /// Mesh sizes, comma separated (at least four).
        #[arg(long, value_delimiter = ',')]
        ns: Vec<usize>,
        /// Time the reduced solve against basis size on one step instead.
        #[arg(long)]
        rank_scan: bool,
        /// Basis augmentations in the rank scan.
        #[arg(long, default_value_t = 8)]
        augmentations: usize,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
    },
    /// GMRES residual histories with and without preconditioning; writes gmres.csv.
    GmresStudy {
        #[command(flatten)]
        common: Common,
        /// Mesh sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Precond::Both)]
        precond: Precond,
        /// Basis augmentations before the reduced solve.
        #[arg(long, default_value_t = 8)]
        augmentations: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Precond {
    On,
    Off,
    Both,
}

#[derive(Args)]
struct Common {
    /// JSON file with run settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ex41, ex42, ex43 or ex44.
    #[arg(long)]
    example: Option<String>,
    #[arg(long, value_parser = parse_integrator)]
    integrator: Option<Integrator>,
    /// Interior grid points per dimension.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, group = "step")]
    dt: Option<f64>,
    #[arg(long, group = "step")]
    lambda_d: Option<f64>,
    #[arg(long, group = "step")]
    lambda_a: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    eps_tol: Option<f64>,
    #[arg(long)]
    eps_kappa: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_gmres: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave timing columns empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Use the mesh sizes of the original experiments.
    #[arg(long)]
    paper_scale: bool,
}

fn parse_integrator(s: &str) -> Result<Integrator, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            example: self.example.clone(),
            integrator: self.integrator,
            n: self.n,
            dt: self.dt,
            lambda_d: self.lambda_d,
            lambda_a: self.lambda_a,
            t_final: self.t_final,
            eps_tol: self.eps_tol,
            eps_kappa: self.eps_kappa,
            eps: self.eps,
            eps_gmres: self.eps_gmres,
            max_iter: self.max_iter,
            out: self.out.clone(),
            seed: self.seed,
            no_timing: self.no_timing.then_some(true),
        };
        RunConfig::resolve(file.merged(flags), self.paper_scale)
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.resolve()?;
            let out = experiments::run(&cfg)?;
            println!(
                "{} steps, max rank {}, final residual {:.3e}; wrote {}",
                out.summary.steps,
                out.summary.max_rank,
                out.summary.final_residual,
                cfg.out.display()
            );
        }
        Command::Converge { common, dts } => {
            let cfg = common.resolve()?;
            let rows = experiments::converge(&cfg, &dts)?;
            experiments::write_table(&cfg.out, CONVERGENCE_CSV, CONVERGENCE_HEADER, &rows)?;
            for r in &rows {
                let order = r.observed_order.map_or("-".to_string(), |o| format!("{o:.2}"));
                println!("dt {:.3e}  error {:.3e}  order {order}", r.dt, r.l1_error);
            }
        }
        Command::Complexity {
            common,
            ns,
            rank_scan,
            augmentations,
            repetitions,
        } => {
            let cfg = common.resolve()?;
            if rank_scan {
                let rows = experiments::gmres_scaling(&cfg, augmentations, repetitions)?;
                experiments::write_table(&cfg.out, GMRES_SCALING_CSV, GMRES_SCALING_HEADER, &rows)?;
                let timed: Vec<(f64, f64)> = rows
                    .iter()
                    .filter_map(|r| r.solve_time_s.map(|t| (r.rank as f64, t)))
                    .collect();
                if timed.len() >= 2 {
                    let (x, y): (Vec<f64>, Vec<f64>) = timed.into_iter().unzip();
                    println!("solve time against rank: slope {:.2}", loglog_slope(&x, &y));
                }
            } else {
                let rows = experiments::complexity(&cfg, &ns, repetitions)?;
                experiments::write_table(&cfg.out, COMPLEXITY_CSV, COMPLEXITY_HEADER, &rows)?;
                let timed: Vec<(f64, f64)> = rows
                    .iter()
                    .filter_map(|r| r.wall_time_s.map(|t| (r.n as f64, t)))
                    .collect();
                if timed.len() >= 2 {
                    let (x, y): (Vec<f64>, Vec<f64>) = timed.into_iter().unzip();
                    println!("wall time against n: slope {:.2}", loglog_slope(&x, &y));
                }
            }
        }
        Command::GmresStudy {
            common,
            ns,
            precond,
            augmentations,
        } => {
            let cfg = common.resolve()?;
            let modes: &[bool] = match precond {
                Precond::On => &[true],
                Precond::Off => &[false],
                Precond::Both => &[true, false],
            };
            let rows = experiments::gmres_study(&cfg, &ns, modes, augmentations)?;
            experiments::write_table(&cfg.out, GMRES_CSV, GMRES_HEADER, &rows)?;
            for (n, pre, k) in experiments::gmres_iteration_counts(&rows) {
                println!("n {n:>6}  preconditioned {pre:<5}  iterations {k}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
