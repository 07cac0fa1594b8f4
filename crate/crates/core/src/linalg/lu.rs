//! Dense LU with partial pivoting, used for small systems and reference solves.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("LU of a non-square matrix".into()));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= f64::EPSILON * scale * n as f64 || pmax == 0.0 {
                return Err(Error::SingularMatrix { column: k, pivot: pmax });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= piv;
            }
            for j in k + 1..n {
                let akj = lu[(k, j)];
                if akj != 0.0 {
                    let (head, tail) = lu.as_mut_slice().split_at_mut(j * n);
                    let lk = &head[k * n + k + 1..k * n + n];
                    for (x, l) in tail[k + 1..n].iter_mut().zip(lk) {
                        *x -= l * akj;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::Dimension("LU solve: row mismatch".into()));
        }
        let mut x = DenseMatrix::zeros(n, b.cols());
        for c in 0..b.cols() {
            let bc = b.col(c);
            let xc = x.col_mut(c);
            for i in 0..n {
                xc[i] = bc[self.perm[i]];
            }
            for k in 0..n {
                let v = xc[k];
                if v != 0.0 {
                    let lk = &self.lu.col(k)[k + 1..];
                    for (x, l) in xc[k + 1..].iter_mut().zip(lk) {
                        *x -= l * v;
                    }
                }
            }
            for k in (0..n).rev() {
                xc[k] /= self.lu[(k, k)];
                let v = xc[k];
                if v != 0.0 {
                    let uk = &self.lu.col(k)[..k];
                    for (x, u) in xc[..k].iter_mut().zip(uk) {
                        *x -= u * v;
                    }
                }
            }
        }
        Ok(x)
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn dense_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    DenseLu::factor(a)?.solve(b)
}
