//! Reduced QR by modified Gram-Schmidt with one reorthogonalization pass.

use crate::linalg::dense::{axpy, dot, norm2};
use crate::linalg::DenseMatrix;

/// Relative size below which a column is treated as linearly dependent.
const DEPENDENCE_TOL: f64 = 1e-13;

/// Returns `(Q, R)` with `Q` orthonormal (`m x n`) and `R` upper triangular.
///
/// Requires `rows >= cols`. A column that is dependent on its predecessors
/// gets a zero diagonal in `R`; its `Q` column is then an arbitrary unit
/// vector orthogonal to the others, so `Q` stays orthonormal.
pub fn reduced_qr(m: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (rows, cols) = m.shape();
    assert!(rows >= cols, "reduced_qr needs rows >= cols, got {rows}x{cols}");
    let mut q = m.clone();
    let mut r = DenseMatrix::zeros(cols, cols);
    let mut next_unit = 0usize;
    for j in 0..cols {
        let original = norm2(m.col(j));
        for _pass in 0..2 {
            orthogonalize_against(&mut q, &mut r, j);
        }
        let nrm = norm2(q.col(j));
        if nrm > DEPENDENCE_TOL * original && nrm > 0.0 {
            r[(j, j)] = nrm;
            q.col_mut(j).iter_mut().for_each(|x| *x /= nrm);
        } else {
            r[(j, j)] = 0.0;
            next_unit = fill_orthogonal_unit(&mut q, j, next_unit);
        }
    }
    (q, r)
}

/// Subtracts projections onto columns `0..j` of `q` from column `j`, accumulating into `r`.
fn orthogonalize_against(q: &mut DenseMatrix, r: &mut DenseMatrix, j: usize) {
    let rows = q.rows();
    let (done, rest) = q.as_mut_slice().split_at_mut(j * rows);
    let v = &mut rest[..rows];
    for i in 0..j {
        let qi = &done[i * rows..(i + 1) * rows];
        let c = dot(qi, v);
        axpy(-c, qi, v);
        r[(i, j)] += c;
    }
}

/// Replaces column `j` by a unit vector orthogonal to columns `0..j`, built
/// from the canonical basis vector with the largest orthogonal component.
/// Candidates are tried from `start`; the first with a component above 1/2
/// is taken. Returns the next candidate.
fn fill_orthogonal_unit(q: &mut DenseMatrix, j: usize, start: usize) -> usize {
    let rows = q.rows();
    let mut best = (start, -1.0);
    for e in start..start + rows {
        let k = e % rows;
        let nrm = project_unit(q, j, k);
        if nrm > 0.5 {
            q.col_mut(j).iter_mut().for_each(|x| *x /= nrm);
            return e + 1;
        }
        if nrm > best.1 {
            best = (e, nrm);
        }
    }
    let nrm = project_unit(q, j, best.0 % rows);
    assert!(nrm > 0.0, "no unit vector is orthogonal to {j} columns in dimension {rows}");
    q.col_mut(j).iter_mut().for_each(|x| *x /= nrm);
    best.0 + 1
}

/// Sets column `j` to `e_k` minus its projection on columns `0..j` and
/// returns the remaining norm.
fn project_unit(q: &mut DenseMatrix, j: usize, k: usize) -> f64 {
    let rows = q.rows();
    {
        let col = q.col_mut(j);
        col.fill(0.0);
        col[k] = 1.0;
    }
    for _pass in 0..2 {
        let (done, rest) = q.as_mut_slice().split_at_mut(j * rows);
        let v = &mut rest[..rows];
        for i in 0..j {
            let qi = &done[i * rows..(i + 1) * rows];
            let c = dot(qi, v);
            axpy(-c, qi, v);
        }
    }
    norm2(q.col(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(q: &DenseMatrix) -> f64 {
        q.t_matmul(q).sub(&DenseMatrix::identity(q.cols())).frobenius_norm()
    }

    #[test]
    fn orthonormal_input_is_preserved() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = DenseMatrix::from_rows(&[&[s, 0.0], &[s, 0.0], &[0.0, 1.0]]);
        let (q, r) = reduced_qr(&m);
        for j in 0..2 {
            let sign = r[(j, j)].signum();
            for i in 0..3 {
                assert!((q[(i, j)] * sign - m[(i, j)]).abs() < 1e-15);
            }
        }
        assert!(r.sub(&DenseMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn duplicate_columns_give_zero_diagonal() {
        let m = DenseMatrix::from_rows(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]);
        let (q, r) = reduced_qr(&m);
        assert!(r[(1, 1)].abs() < 1e-14);
        assert!(orthogonality_error(&q) < 1e-14);
        assert!(q.matmul(&r).sub(&m).frobenius_norm() < 1e-14 * m.frobenius_norm());
    }

    #[test]
    fn zero_matrix_gives_orthonormal_q() {
        let (q, r) = reduced_qr(&DenseMatrix::zeros(4, 3));
        assert_eq!(r, DenseMatrix::zeros(3, 3));
        assert!(orthogonality_error(&q) < 1e-15);
    }
}
