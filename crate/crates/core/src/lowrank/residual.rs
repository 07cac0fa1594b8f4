use crate::discretization::{Factor, OperatorSet};
use crate::error::{Error, Result};
use crate::linalg::{reduced_qr, DenseMatrix};
use crate::lowrank::LowRankMatrix;

/// `Uᵀ M V` for a banded or diagonal `M`.
pub fn galerkin_project(u: &DenseMatrix, m: Factor<'_>, v: &DenseMatrix) -> DenseMatrix {
    u.t_matmul(&m.apply(v))
}

/// Triangular factors of the augmented blocks
/// `[U_B | U | L₁U | … | L_RU]` and `[V_B | V | R₁V | … | R_RV]`, where
/// `L_t ⊗ R_t` runs over the operator terms in order and `U_B`, `V_B` are
/// the factors of the right-hand side.
///
/// When a block is wider than it is tall the block itself stands in for its
/// triangular factor; the residual norm is unchanged.
#[derive(Debug, Clone)]
pub struct ResidualFactors {
    pub r_u: DenseMatrix,
    pub r_v: DenseMatrix,
    rhs_width: (usize, usize),
    width: (usize, usize),
    terms: usize,
}

fn triangular_factor(blocks: Vec<DenseMatrix>) -> Result<DenseMatrix> {
    let refs: Vec<&DenseMatrix> = blocks.iter().collect();
    let x = DenseMatrix::hcat(&refs)?;
    Ok(if x.rows() >= x.cols() { reduced_qr(&x).1 } else { x })
}

impl ResidualFactors {
    pub fn new(
        u_rhs: &DenseMatrix,
        v_rhs: &DenseMatrix,
        u: &DenseMatrix,
        v: &DenseMatrix,
        ops: &OperatorSet,
    ) -> Result<Self> {
        let terms = ops.terms();
        let mut left = vec![u_rhs.clone(), u.clone()];
        let mut right = vec![v_rhs.clone(), v.clone()];
        for t in &terms {
            left.push(t.left.apply(u));
            right.push(t.right.apply(v));
        }
        assert_eq!(left.len(), right.len(), "residual block counts differ");
        Ok(Self {
            r_u: triangular_factor(left)?,
            r_v: triangular_factor(right)?,
            rhs_width: (u_rhs.cols(), v_rhs.cols()),
            width: (u.cols(), v.cols()),
            terms: terms.len(),
        })
    }

    /// `‖R_U diag(rhs, first, rest, …, rest) R_Vᵀ‖_F`, with `rest` repeated
    /// once per operator term.
    pub fn norm(&self, rhs: &DenseMatrix, first: &DenseMatrix, rest: &DenseMatrix) -> f64 {
        let (bu, bv) = self.rhs_width;
        let (wu, wv) = self.width;
        assert_eq!(rhs.shape(), (bu, bv));
        assert_eq!(first.shape(), (wu, wv));
        assert_eq!(rest.shape(), (wu, wv));
        let mut out = self.r_u.columns(0, bu).matmul(rhs).matmul_t(&self.r_v.columns(0, bv));
        for b in 0..=self.terms {
            let mid = if b == 0 { first } else { rest };
            let ru = self.r_u.columns(bu + b * wu, bu + (b + 1) * wu);
            let rv = self.r_v.columns(bv + b * wv, bv + (b + 1) * wv);
            out.add_scaled(1.0, &ru.matmul(mid).matmul_t(&rv));
        }
        out.frobenius_norm()
    }
}

/// `‖F₁ − dt 𝓛(F₁) − B‖_F` evaluated in the reduced space from the factors
/// of `F₁` and `B`.
pub fn lowrank_residual_norm(f1: &LowRankMatrix, b: &LowRankMatrix, ops: &OperatorSet, dt_diag: f64) -> Result<f64> {
    if f1.shape() != b.shape() || f1.shape() != (ops.nx, ops.ny) {
        return Err(Error::Dimension(format!(
            "solution is {}x{}, right-hand side {}x{}, operators {}x{}",
            f1.shape().0,
            f1.shape().1,
            b.shape().0,
            b.shape().1,
            ops.nx,
            ops.ny
        )));
    }
    if f1.rank() == 0 {
        return Ok(b.frobenius_norm());
    }
    let factors = ResidualFactors::new(b.u(), b.v(), f1.u(), f1.v(), ops)?;
    Ok(factors.norm(&b.s().scale(-1.0), f1.s(), &f1.s().scale(-dt_diag)))
}
