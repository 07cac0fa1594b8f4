//! Run configuration: JSON file values, command-line overrides and
//! per-example defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use acs_core::discretization::ExampleId;
use acs_core::solver::{ButcherTableau, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Be,
    Dirk2,
    Dirk3,
}

impl Integrator {
    pub fn tableau(self) -> ButcherTableau {
        match self {
            Integrator::Be => ButcherTableau::backward_euler(),
            Integrator::Dirk2 => ButcherTableau::dirk2(),
            Integrator::Dirk3 => ButcherTableau::dirk3(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Integrator::Be => "be",
            Integrator::Dirk2 => "dirk2",
            Integrator::Dirk3 => "dirk3",
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Integrator {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "be" => Ok(Integrator::Be),
            "dirk2" => Ok(Integrator::Dirk2),
            "dirk3" => Ok(Integrator::Dirk3),
            other => Err(CliError::Config(format!(
                "unknown integrator '{other}' (expected be, dirk2 or dirk3)"
            ))),
        }
    }
}

/// How the step size is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Dt(f64),
    /// Diffusion number `Δt φ_max / Δx²`.
    LambdaD(f64),
    /// Advective CFL number `Δt σ_max / Δx`.
    LambdaA(f64),
}

/// Every field is optional so that a file and the command line can each
/// supply a subset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub example: Option<String>,
    pub integrator: Option<Integrator>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub lambda_d: Option<f64>,
    pub lambda_a: Option<f64>,
    pub t_final: Option<f64>,
    pub eps_tol: Option<f64>,
    pub eps_kappa: Option<f64>,
    pub eps: Option<f64>,
    pub eps_gmres: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub no_timing: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `over` replace those in `self`. A step size given in
    /// `over` in any form replaces every step size in `self`.
    pub fn merged(self, over: ConfigFile) -> ConfigFile {
        let step_override = over.dt.is_some() || over.lambda_d.is_some() || over.lambda_a.is_some();
        let (dt, lambda_d, lambda_a) = if step_override {
            (over.dt, over.lambda_d, over.lambda_a)
        } else {
            (self.dt, self.lambda_d, self.lambda_a)
        };
        ConfigFile {
            example: over.example.or(self.example),
            integrator: over.integrator.or(self.integrator),
            n: over.n.or(self.n),
            dt,
            lambda_d,
            lambda_a,
            t_final: over.t_final.or(self.t_final),
            eps_tol: over.eps_tol.or(self.eps_tol),
            eps_kappa: over.eps_kappa.or(self.eps_kappa),
            eps: over.eps.or(self.eps),
            eps_gmres: over.eps_gmres.or(self.eps_gmres),
            max_iter: over.max_iter.or(self.max_iter),
            out: over.out.or(self.out),
            seed: over.seed.or(self.seed),
            no_timing: over.no_timing.or(self.no_timing),
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: ExampleId,
    pub integrator: Integrator,
    pub n: usize,
    pub step: TimeStep,
    pub t_final: f64,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    /// Recorded in the summary; the built-in experiments are deterministic.
    pub seed: u64,
    pub timing: bool,
}

/// Defaults of one example at desk scale, with the mesh used by `--paper-scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleDefaults {
    pub integrator: Integrator,
    pub n: usize,
    pub paper_n: usize,
    pub step: TimeStep,
    pub t_final: f64,
    pub eps_tol: f64,
    pub eps_kappa: f64,
    pub eps: f64,
    pub eps_gmres: f64,
}

pub fn example_defaults(id: ExampleId) -> ExampleDefaults {
    match id {
        ExampleId::Ex41 => ExampleDefaults {
            integrator: Integrator::Dirk2,
            n: 128,
            paper_n: 300,
            step: TimeStep::LambdaD(280.0),
            t_final: 0.5,
            eps_tol: 1e-4,
            eps_kappa: 1e-3,
            eps: 1e-8,
            eps_gmres: 1e-8,
        },
        ExampleId::Ex42 => ExampleDefaults {
            integrator: Integrator::Be,
            n: 256,
            paper_n: 1000,
            step: TimeStep::LambdaA(17.0),
            t_final: 18.0,
            eps_tol: 1e-8,
            eps_kappa: 1e-5,
            eps: 1e-11,
            eps_gmres: 1e-12,
        },
        ExampleId::Ex43 => ExampleDefaults {
            integrator: Integrator::Dirk3,
            n: 512,
            paper_n: 2100,
            step: TimeStep::LambdaA(7.0),
            t_final: 10.0,
            eps_tol: 1e-5,
            eps_kappa: 1e-3,
            eps: 9.9e-8,
            eps_gmres: 1e-10,
        },
        ExampleId::Ex44 => ExampleDefaults {
            integrator: Integrator::Be,
            n: 128,
            paper_n: 256,
            step: TimeStep::Dt(1000.0),
            t_final: 10_000.0,
            eps_tol: 1e-6,
            eps_kappa: 1e-10,
            eps: 1e-13,
            eps_gmres: 1e-12,
        },
    }
}

impl RunConfig {
    /// Fills unset fields from the example defaults and validates the result.
    pub fn resolve(file: ConfigFile, paper_scale: bool) -> Result<Self, CliError> {
        let example: ExampleId = match &file.example {
            Some(s) => s.parse()?,
            None => return Err(CliError::Config("no example given (use --example)".into())),
        };
        let d = example_defaults(example);
        let given: Vec<TimeStep> = [
            file.dt.map(TimeStep::Dt),
            file.lambda_d.map(TimeStep::LambdaD),
            file.lambda_a.map(TimeStep::LambdaA),
        ]
        .into_iter()
        .flatten()
        .collect();
        let step = match given.as_slice() {
            [] => d.step,
            [one] => *one,
            _ => {
                return Err(CliError::Config(
                    "give exactly one of dt, lambda_d and lambda_a".into(),
                ))
            }
        };
        let value = match step {
            TimeStep::Dt(v) | TimeStep::LambdaD(v) | TimeStep::LambdaA(v) => v,
        };
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Config(format!("step size must be positive, got {value}")));
        }
        let mut tolerances = Tolerances::new(
            file.eps_tol.unwrap_or(d.eps_tol),
            file.eps_kappa.unwrap_or(d.eps_kappa),
            file.eps.unwrap_or(d.eps),
            file.eps_gmres.unwrap_or(d.eps_gmres),
        )?;
        if let Some(m) = file.max_iter {
            tolerances.max_iter = m;
            tolerances.validate()?;
        }
        let n = file.n.unwrap_or(if paper_scale { d.paper_n } else { d.n });
        if n < 2 {
            return Err(CliError::Config(format!("n must be at least 2, got {n}")));
        }
        let t_final = file.t_final.unwrap_or(d.t_final);
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(CliError::Config(format!("t_final must be non-negative, got {t_final}")));
        }
        Ok(RunConfig {
            example,
            integrator: file.integrator.unwrap_or(d.integrator),
            n,
            step,
            t_final,
            tolerances,
            out: file.out.unwrap_or_else(|| PathBuf::from("out")),
            seed: file.seed.unwrap_or(0),
            timing: !file.no_timing.unwrap_or(false),
        })
    }
}
