use crate::discretization::{Factor, OperatorSet};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SylvesterSolver};
use crate::lowrank::galerkin_project;

/// Galerkin-projected operator `S ↦ S - dt Σ L̃_t S R̃_tᵀ` together with the
/// averaged-coefficient Sylvester preconditioner `S ↦ P̃₁S + SP̃₂ᵀ`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    left: Vec<DenseMatrix>,
    right: Vec<DenseMatrix>,
    p1: DenseMatrix,
    p2: DenseMatrix,
    preconditioner: SylvesterSolver,
    dt_diag: f64,
}

impl ReducedSystem {
    /// Projects every operator term onto the bases `U` (x) and `V` (y).
    pub fn assemble(u: &DenseMatrix, v: &DenseMatrix, ops: &OperatorSet) -> Result<Self> {
        let terms = ops.terms();
        let left = terms.iter().map(|t| galerkin_project(u, t.left, u)).collect();
        let right = terms.iter().map(|t| galerkin_project(v, t.right, v)).collect();
        let p1 = galerkin_project(u, Factor::Tri(&ops.p1), u);
        let p2 = galerkin_project(v, Factor::Tri(&ops.p2), v);
        Self::from_parts(left, right, p1, p2, ops.dt_diag)
    }

    /// Builds a system from already projected pieces.
    pub fn from_parts(
        left: Vec<DenseMatrix>,
        right: Vec<DenseMatrix>,
        p1: DenseMatrix,
        p2: DenseMatrix,
        dt_diag: f64,
    ) -> Result<Self> {
        let (rx, ry) = (p1.rows(), p2.rows());
        if left.len() != right.len()
            || left.iter().any(|m| m.shape() != (rx, rx))
            || right.iter().any(|m| m.shape() != (ry, ry))
        {
            return Err(Error::Dimension("projected operators do not match the basis sizes".into()));
        }
        let preconditioner = SylvesterSolver::new(&p1, &p2)?;
        Ok(Self {
            left,
            right,
            p1,
            p2,
            preconditioner,
            dt_diag,
        })
    }

    /// `(r_x, r_y)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.p1.rows(), self.p2.rows())
    }

    pub fn dt_diag(&self) -> f64 {
        self.dt_diag
    }

    pub fn p1(&self) -> &DenseMatrix {
        &self.p1
    }

    pub fn p2(&self) -> &DenseMatrix {
        &self.p2
    }

    /// Projected term pairs `(L̃_t, R̃_t)`.
    pub fn terms(&self) -> impl Iterator<Item = (&DenseMatrix, &DenseMatrix)> {
        self.left.iter().zip(&self.right)
    }

    pub fn apply(&self, s: &DenseMatrix) -> DenseMatrix {
        reduced_apply(self, s)
    }

    pub fn precondition(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        acs_precondition(self, z)
    }
}

/// `S - dt Σ L̃_t S R̃_tᵀ`.
pub fn reduced_apply(sys: &ReducedSystem, s: &DenseMatrix) -> DenseMatrix {
    assert_eq!(s.shape(), sys.shape(), "reduced_apply: wrong core shape");
    let mut out = s.clone();
    if sys.dt_diag != 0.0 {
        for (l, r) in sys.terms() {
            out.add_scaled(-sys.dt_diag, &l.matmul(s).matmul_t(r));
        }
    }
    out
}

/// Solves `P̃₁ Z + Z P̃₂ᵀ = Ẑ` with the cached Schur forms.
pub fn acs_precondition(sys: &ReducedSystem, z: &DenseMatrix) -> Result<DenseMatrix> {
    sys.preconditioner.solve(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_identity(n: usize) -> DenseMatrix {
        DenseMatrix::identity(n).scale(0.5)
    }

    #[test]
    fn zero_step_is_identity() {
        let l = vec![DenseMatrix::from_fn(3, 3, |i, j| (i + 2 * j) as f64)];
        let r = vec![DenseMatrix::from_fn(2, 2, |i, j| (i * j) as f64 + 1.0)];
        let sys = ReducedSystem::from_parts(l, r, half_identity(3), half_identity(2), 0.0).unwrap();
        let s = DenseMatrix::from_fn(3, 2, |i, j| (i as f64) - (j as f64));
        assert_eq!(sys.apply(&s), s);
    }

    #[test]
    fn half_identity_preconditioner_is_identity() {
        let sys = ReducedSystem::from_parts(vec![], vec![], half_identity(3), half_identity(2), 0.1).unwrap();
        let z = DenseMatrix::from_fn(3, 2, |i, j| (i + j) as f64 - 1.5);
        assert!(sys.precondition(&z).unwrap().sub(&z).max_abs() < 1e-15);
        assert_eq!(sys.precondition(&DenseMatrix::zeros(3, 2)).unwrap(), DenseMatrix::zeros(3, 2));
    }
}
