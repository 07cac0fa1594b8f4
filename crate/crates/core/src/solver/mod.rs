//! Adaptive-rank implicit integrators: backward Euler and stiffly accurate
//! DIRK schemes built on Galerkin-projected, ACS-preconditioned solves.

mod gmres;
mod integrate;
mod reduced;
mod step;
mod tableau;

pub use gmres::{gmres, gmres_solve, GmresOutcome};
pub use integrate::{integrate, mass_rescale, Integration, IntegrationFailure, Simulation, StepOutcomeWithTime};
pub use reduced::{acs_precondition, reduced_apply, ReducedSystem};
pub use step::{
    backward_euler_step, dirk_step, dirk_step_detailed, x_krylov_ops, y_krylov_ops, SampledSource, StepOutcome,
    StepReport,
};
pub use tableau::{ButcherTableau, Tolerances};
