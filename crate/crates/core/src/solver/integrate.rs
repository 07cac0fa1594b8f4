use thiserror::Error;

use crate::discretization::{cell_reynolds_check, Grid1D, OperatorSet, Problem};
use crate::error::{Error as CoreError, Result};
use crate::lowrank::LowRankMatrix;
use crate::solver::{dirk_step_detailed, ButcherTableau, SampledSource, StepReport, Tolerances};

/// A failed time integration with the reports of the steps that succeeded.
#[derive(Debug, Clone, Error)]
#[error("integration stopped at t = {time}: {error}")]
pub struct IntegrationFailure {
    #[source]
    pub error: CoreError,
    pub time: f64,
    pub reports: Vec<StepReport>,
}

/// Final state of a time integration.
#[derive(Debug, Clone)]
pub struct Integration {
    pub solution: LowRankMatrix,
    pub time: f64,
    pub reports: Vec<StepReport>,
}

/// Rescales `F` so that `Δx Δy Σ F_ij = target_mass`.
pub fn mass_rescale(f: &LowRankMatrix, target_mass: f64, dx: f64, dy: f64) -> Result<LowRankMatrix> {
    let current = f.mass(dx, dy);
    if current == 0.0 || !current.is_finite() {
        return Err(CoreError::ZeroMass);
    }
    Ok(f.scaled(target_mass / current))
}

/// A problem discretized on an `n x n` grid with a fixed scheme.
#[derive(Debug)]
pub struct Simulation<'p> {
    problem: &'p Problem,
    gx: Grid1D,
    gy: Grid1D,
    tableau: ButcherTableau,
    tols: Tolerances,
    source: Option<SampledSource>,
    mass_target: Option<f64>,
    phi_max: f64,
    sigma_max: f64,
    precondition: bool,
}

impl<'p> Simulation<'p> {
    pub fn new(problem: &'p Problem, n: usize, tableau: ButcherTableau, tols: Tolerances) -> Result<Self> {
        tols.validate()?;
        let (gx, gy) = problem.grids(n)?;
        let coeffs = &problem.coefficients;
        let source = if problem.source.is_empty() {
            None
        } else {
            Some(SampledSource::new(&problem.source, &gx, &gy)?)
        };
        let mass_target = if problem.conserve_mass {
            Some(problem.equilibrium_mass(&gx, &gy).ok_or(CoreError::ZeroMass)?)
        } else {
            None
        };
        cell_reynolds_check(coeffs, &gx, &gy);
        Ok(Self {
            problem,
            gx,
            gy,
            tableau,
            tols,
            source,
            mass_target,
            phi_max: coeffs.phi_max(&gx, &gy),
            sigma_max: coeffs.sigma_max(&gx, &gy),
            precondition: true,
        })
    }

    /// Turns the ACS preconditioner on or off for the reduced solves.
    pub fn with_preconditioning(mut self, on: bool) -> Self {
        self.precondition = on;
        self
    }

    pub fn grids(&self) -> (Grid1D, Grid1D) {
        (self.gx, self.gy)
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tols
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.tableau
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    /// `Δt` giving the diffusion number `λ_D = Δt φ_max / Δx²`.
    pub fn dt_from_lambda_d(&self, lambda_d: f64) -> Result<f64> {
        if self.phi_max == 0.0 {
            return Err(CoreError::Config("λ_D is undefined without diffusion".into()));
        }
        Ok(lambda_d * self.gx.dx() * self.gx.dx() / self.phi_max)
    }

    /// `Δt` giving the advective CFL number `λ_A = Δt σ_max / Δx`.
    pub fn dt_from_lambda_a(&self, lambda_a: f64) -> Result<f64> {
        if self.sigma_max == 0.0 {
            return Err(CoreError::Config("λ_A is undefined without advection".into()));
        }
        Ok(lambda_a * self.gx.dx() / self.sigma_max)
    }

    pub fn lambda_d(&self, dt: f64) -> f64 {
        dt * self.phi_max / (self.gx.dx() * self.gx.dx())
    }

    pub fn lambda_a(&self, dt: f64) -> f64 {
        dt * self.sigma_max / self.gx.dx()
    }

    /// Operators for steps of size `dt`.
    pub fn operators(&self, dt: f64) -> Result<OperatorSet> {
        OperatorSet::assemble(&self.gx, &self.gy, &self.problem.coefficients, self.tableau.diagonal() * dt)
    }

    /// The sampled initial condition, mass-corrected when the problem asks for it.
    pub fn initial(&self) -> Result<LowRankMatrix> {
        let f0 = LowRankMatrix::from_separable(&self.problem.initial, &self.gx, &self.gy)?;
        let f0 = crate::lowrank::truncated_svd(&f0, self.tols.eps)?.matrix;
        match self.mass_target {
            Some(m) => mass_rescale(&f0, m, self.gx.dx(), self.gy.dx()),
            None => Ok(f0),
        }
    }

    /// One step from `t` with prebuilt operators.
    pub fn step(&self, f: &LowRankMatrix, t: f64, ops: &OperatorSet) -> Result<StepOutcomeWithTime> {
        let out = dirk_step_detailed(
            f,
            ops,
            &self.tableau,
            &self.tols,
            self.source.as_ref().map(|s| (s, t)),
            self.precondition,
        )?;
        let mut report = out.report.clone();
        let dt = ops.dt_diag / self.tableau.diagonal();
        report.t = t + dt;
        report.dt = dt;
        report.lambda_d = self.lambda_d(dt);
        report.lambda_a = self.lambda_a(dt);
        let solution = match self.mass_target {
            Some(m) => mass_rescale(&out.solution, m, self.gx.dx(), self.gy.dx())?,
            None => out.solution.clone(),
        };
        Ok(StepOutcomeWithTime {
            solution,
            report,
            outcome: out,
        })
    }

    /// Integrates from `(t0, f0)` to `t_final` with fixed steps `dt`; the last
    /// step is shortened to land on `t_final`. `observer` sees every step.
    pub fn run(
        &self,
        f0: LowRankMatrix,
        t0: f64,
        t_final: f64,
        dt: f64,
        mut observer: impl FnMut(&LowRankMatrix, &StepReport),
    ) -> std::result::Result<Integration, IntegrationFailure> {
        let fail = |error, time, reports| IntegrationFailure { error, time, reports };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(fail(CoreError::Config(format!("dt must be positive, got {dt}")), t0, Vec::new()));
        }
        let mut reports = Vec::new();
        let mut f = f0;
        let mut t = t0;
        let span = t_final - t0;
        if span <= 0.0 {
            return Ok(Integration { solution: f, time: t, reports });
        }
        let steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
        let ops = self.operators(dt).map_err(|e| fail(e, t, Vec::new()))?;
        let mut clipped: Option<OperatorSet> = None;
        for k in 0..steps {
            let remaining = t_final - t;
            let this_dt = if k + 1 == steps { remaining } else { dt };
            if (this_dt - dt).abs() > 1e-12 * dt {
                clipped = Some(self.operators(this_dt).map_err(|e| fail(e, t, reports.clone()))?);
            }
            let ops_k = clipped.as_ref().unwrap_or(&ops);
            let step = match self.step(&f, t, ops_k) {
                Ok(s) => s,
                Err(e) => return Err(fail(e, t, reports)),
            };
            t = if k + 1 == steps { t_final } else { t + this_dt };
            let mut report = step.report;
            report.t = t;
            observer(&step.solution, &report);
            reports.push(report);
            f = step.solution;
        }
        Ok(Integration { solution: f, time: t, reports })
    }
}

/// A step result after time bookkeeping and mass correction.
#[derive(Debug, Clone)]
pub struct StepOutcomeWithTime {
    pub solution: LowRankMatrix,
    pub report: StepReport,
    pub outcome: crate::solver::StepOutcome,
}

/// Integrates `problem` on an `n x n` grid from its initial condition.
pub fn integrate(
    problem: &Problem,
    n: usize,
    tableau: ButcherTableau,
    t_final: f64,
    dt: f64,
    tols: Tolerances,
) -> std::result::Result<Integration, IntegrationFailure> {
    let setup = |e: CoreError| IntegrationFailure {
        error: e,
        time: 0.0,
        reports: Vec::new(),
    };
    let sim = Simulation::new(problem, n, tableau, tols).map_err(setup)?;
    let f0 = sim.initial().map_err(setup)?;
    sim.run(f0, 0.0, t_final, dt, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn mass_rescale_is_linear() {
        let ones = DenseMatrix::from_fn(4, 1, |_, _| 0.5);
        let f = LowRankMatrix::new(ones.clone(), DenseMatrix::from_diag(&[4.0]), ones).unwrap();
        let m = f.mass(0.1, 0.2);
        assert_eq!(mass_rescale(&f, m, 0.1, 0.2).unwrap(), f);
        let doubled = mass_rescale(&f, 2.0 * m, 0.1, 0.2).unwrap();
        assert!((doubled.mass(0.1, 0.2) - 2.0 * m).abs() < 1e-15);
        assert_eq!(mass_rescale(&LowRankMatrix::zeros(4, 4), 1.0, 0.1, 0.1), Err(CoreError::ZeroMass));
    }
}
