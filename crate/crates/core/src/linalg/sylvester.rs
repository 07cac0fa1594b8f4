//! Bartels-Stewart solver for `A Z + Z Bᵀ = C`.

use crate::error::{Error, Result};
use crate::linalg::schur::{diagonal_blocks, real_schur, SchurForm};
use crate::linalg::DenseMatrix;

/// Pivots below this fraction of the coefficient scale signal a singular operator.
const PIVOT_TOL: f64 = 1e-13;

/// Cached Schur forms of `A` and `Bᵀ` for repeated Sylvester solves.
#[derive(Debug, Clone)]
pub struct SylvesterSolver {
    a: SchurForm,
    bt: SchurForm,
    a_blocks: Vec<(usize, usize)>,
    b_blocks: Vec<(usize, usize)>,
    scale: f64,
}

fn block_ranges(t: &DenseMatrix) -> Vec<(usize, usize)> {
    let mut start = 0;
    diagonal_blocks(t)
        .into_iter()
        .map(|s| {
            let r = (start, s);
            start += s;
            r
        })
        .collect()
}

impl SylvesterSolver {
    pub fn new(a: &DenseMatrix, b: &DenseMatrix) -> Result<Self> {
        if !a.is_square() || !b.is_square() {
            return Err(Error::Dimension("Sylvester coefficients must be square".into()));
        }
        let a = real_schur(a)?;
        let bt = real_schur(&b.transpose())?;
        let a_blocks = block_ranges(&a.t);
        let b_blocks = block_ranges(&bt.t);
        let scale = a.t.max_abs().max(bt.t.max_abs());
        Ok(Self {
            a,
            bt,
            a_blocks,
            b_blocks,
            scale,
        })
    }

    /// Solves `A Z + Z Bᵀ = C`.
    pub fn solve(&self, c: &DenseMatrix) -> Result<DenseMatrix> {
        let (p, q) = (self.a.t.rows(), self.bt.t.rows());
        if c.shape() != (p, q) {
            return Err(Error::Dimension(format!(
                "Sylvester right-hand side is {}x{}, expected {p}x{q}",
                c.rows(),
                c.cols()
            )));
        }
        let ta = &self.a.t;
        let tb = &self.bt.t;
        let mut y = self.a.q.t_matmul(c).matmul(&self.bt.q);
        for &(c0, cs) in &self.b_blocks {
            for &(r0, rs) in self.a_blocks.iter().rev() {
                let mut rhs = [0.0; 4];
                for jj in 0..cs {
                    for ii in 0..rs {
                        let (i, j) = (r0 + ii, c0 + jj);
                        let mut s = y[(i, j)];
                        for k in r0 + rs..p {
                            s -= ta[(i, k)] * y[(k, j)];
                        }
                        for l in 0..c0 {
                            s -= y[(i, l)] * tb[(l, j)];
                        }
                        rhs[jj * rs + ii] = s;
                    }
                }
                let n = rs * cs;
                let mut m = [[0.0; 4]; 4];
                // (I ⊗ Ta_ii + Tb_jjᵀ ⊗ I) acting on the column-major block.
                for jj in 0..cs {
                    for ii in 0..rs {
                        let row = jj * rs + ii;
                        for kk in 0..rs {
                            m[row][jj * rs + kk] += ta[(r0 + ii, r0 + kk)];
                        }
                        for ll in 0..cs {
                            m[row][ll * rs + ii] += tb[(c0 + ll, c0 + jj)];
                        }
                    }
                }
                let sol = small_solve(&mut m, &mut rhs, n, PIVOT_TOL * self.scale)?;
                for jj in 0..cs {
                    for ii in 0..rs {
                        y[(r0 + ii, c0 + jj)] = sol[jj * rs + ii];
                    }
                }
            }
        }
        Ok(self.a.q.matmul(&y).matmul_t(&self.bt.q))
    }
}

/// Gaussian elimination with partial pivoting on an `n <= 4` system.
fn small_solve(m: &mut [[f64; 4]; 4], b: &mut [f64; 4], n: usize, tol: f64) -> Result<[f64; 4]> {
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap_or(k);
        let piv = m[p][k];
        if !(piv.abs() > tol) {
            return Err(Error::SingularSylvester { pivot: piv });
        }
        m.swap(p, k);
        b.swap(p, k);
        for i in k + 1..n {
            let f = m[i][k] / piv;
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 4];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    Ok(x)
}

/// One-shot Bartels-Stewart solve of `A Z + Z Bᵀ = C`.
pub fn sylvester_solve(a: &DenseMatrix, b: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    SylvesterSolver::new(a, b)?.solve(c)
}
