use acs_core::lowrank::{lowrank_residual_norm, truncated_svd, KrylovBasis, LowRankMatrix};
use acs_core::oracle::{dense_residual_norm, random_instance};
use acs_core::solver::{backward_euler_step, x_krylov_ops, y_krylov_ops, Tolerances};
use acs_core::DenseMatrix;
use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn orthonormality_error(q: &DenseMatrix) -> f64 {
    q.t_matmul(q).sub(&DenseMatrix::identity(q.cols())).max_abs()
}

/// Distance of `span(u)` from `span(q)`: `‖(I - QQᵀ)U‖_F`.
fn outside(q: &DenseMatrix, u: &DenseMatrix) -> f64 {
    u.sub(&q.matmul(&q.t_matmul(u))).frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn krylov_bases_stay_orthonormal_and_grow(seed in any::<u64>(), eps_kappa in prop::sample::select(vec![1e-3, 1e-6, 1e-10])) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 48).unwrap();
        let ops = inst.operators().unwrap();
        for (ops_list, seed_basis) in [(x_krylov_ops(&ops), inst.f0.u()), (y_krylov_ops(&ops), inst.f0.v())] {
            let mut basis = KrylovBasis::new(seed_basis, ops_list.len(), eps_kappa).unwrap();
            let mut size = basis.size();
            for _ in 0..4 {
                basis.augment(&ops_list, eps_kappa).unwrap();
                prop_assert!(basis.size() >= size);
                prop_assert!(basis.size() <= basis.pre_truncation_width());
                size = basis.size();
                prop_assert!(orthonormality_error(basis.q()) < 1e-10);
                prop_assert!(outside(basis.q(), seed_basis) < 1e-10);
            }
        }
    }

    #[test]
    fn truncation_error_is_bounded(
        (rows, cols, r) in (4usize..30, 4usize..30, 1usize..6),
        data in vec(-1.0f64..1.0, 30 * 6 * 2),
        decay in 0.01f64..0.9,
        eps in prop::sample::select(vec![1e-2, 1e-4, 1e-8]),
    ) {
        let x = DenseMatrix::from_fn(rows, r, |i, j| data[i * 6 + j] * decay.powi(j as i32));
        let y = DenseMatrix::from_fn(cols, r, |i, j| data[180 + i * 6 + j]);
        let f = LowRankMatrix::from_outer(&x, &y).unwrap();
        let t = truncated_svd(&f, eps).unwrap();
        let dropped = f.rank() - t.matrix.rank();
        let err = f.to_dense().sub(&t.matrix.to_dense()).frobenius_norm();
        prop_assert!(err <= eps * f.frobenius_norm() * (dropped as f64).sqrt() + 1e-12 * f.frobenius_norm());
        prop_assert!(orthonormality_error(t.matrix.u()) < 1e-12);
        prop_assert!(orthonormality_error(t.matrix.v()) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn accepted_steps_satisfy_the_dense_residual(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 64).unwrap();
        let ops = inst.operators().unwrap();
        let tols = Tolerances::new(1e-8, 1e-10, 1e-11, 1e-11).unwrap();
        let (f1, _) = backward_euler_step(&inst.f0, &ops, &tols).unwrap();
        let f0 = inst.f0.to_dense();
        let dense = dense_residual_norm(&ops, &f1.to_dense(), &f0, ops.dt_diag);
        prop_assert!(dense <= tols.eps_tol * f0.frobenius_norm(), "dense residual {dense:e}");
        // Residuals are relative to ‖F₀‖_F throughout the solver.
        let factored = lowrank_residual_norm(&f1, &inst.f0, &ops, ops.dt_diag).unwrap();
        prop_assert!((factored - dense).abs() <= 1e-9 * f0.frobenius_norm(), "{factored:e} vs {dense:e}");
        // Away from convergence the identity holds relative to the residual itself.
        let start = dense_residual_norm(&ops, &f0, &f0, ops.dt_diag);
        let start_factored = lowrank_residual_norm(&inst.f0, &inst.f0, &ops, ops.dt_diag).unwrap();
        prop_assert!((start_factored - start).abs() <= 1e-9 * start, "{start_factored:e} vs {start:e}");
    }
}
