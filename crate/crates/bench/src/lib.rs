//! Inputs shared by the kernel benchmarks.

use acs_core::discretization::{ExampleId, OperatorSet};
use acs_core::lowrank::LowRankMatrix;
use acs_core::solver::{Simulation, Tolerances};
use acs_core::{DenseMatrix, TridiagonalMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random `n × n` matrix shifted so that `A X + X Bᵀ = C` is well posed for
/// any pair drawn this way.
pub fn shifted_square(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    random_matrix(rng, n, n).add(&DenseMatrix::identity(n).scale(2.0 * (n as f64).sqrt()))
}

/// Diagonally dominant tridiagonal matrix of order `n`.
pub fn tridiagonal(rng: &mut impl Rng, n: usize) -> TridiagonalMatrix {
    let sub = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sup = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag = (0..n).map(|_| rng.gen_range(2.5..4.0)).collect();
    TridiagonalMatrix::new(sub, diag, sup).expect("consistent lengths")
}

/// The first example at mesh `n` with `Δt = 1e-3`, ready for one step.
pub struct StepSetup {
    pub ops: OperatorSet,
    pub f0: LowRankMatrix,
    pub tols: Tolerances,
}

pub fn ex41_step(n: usize) -> StepSetup {
    let problem = ExampleId::Ex41.problem();
    let tols = Tolerances::new(1e-4, 1e-3, 1e-8, 1e-8).expect("valid tolerances");
    let sim = Simulation::new(&problem, n, acs_core::solver::ButcherTableau::backward_euler(), tols)
        .expect("valid mesh");
    StepSetup {
        ops: sim.operators(1e-3).expect("operators assemble"),
        f0: sim.initial().expect("initial condition"),
        tols,
    }
}
