use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::solver::ReducedSystem;

/// Output of a reduced GMRES solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: DenseMatrix,
    pub iterations: usize,
    /// Relative (preconditioned) residual after each iteration, starting
    /// with `1` for the zero initial guess.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Full GMRES for `𝒜 vec(S) = vec(B̃)`, left-preconditioned by the ACS
/// operator when `precondition` is set. Starts from zero and stops once the
/// relative (preconditioned) residual is at most `tol`.
pub fn gmres_solve(
    sys: &ReducedSystem,
    rhs: &DenseMatrix,
    tol: f64,
    max_iter: usize,
    precondition: bool,
) -> Result<GmresOutcome> {
    let (rx, ry) = sys.shape();
    if rhs.shape() != (rx, ry) {
        return Err(Error::Dimension(format!(
            "right-hand side is {}x{}, system is {rx}x{ry}",
            rhs.rows(),
            rhs.cols()
        )));
    }
    let op = |x: &DenseMatrix| -> Result<DenseMatrix> {
        let y = sys.apply(x);
        if precondition {
            sys.precondition(&y)
        } else {
            Ok(y)
        }
    };
    let r0 = if precondition { sys.precondition(rhs)? } else { rhs.clone() };
    gmres(&r0, tol, max_iter, op)
}

/// Full GMRES from a zero initial guess for `op(X) = rhs` on matrices of
/// the shape of `rhs`. The reported residuals are relative to `‖rhs‖_F`.
pub fn gmres(
    rhs: &DenseMatrix,
    tol: f64,
    max_iter: usize,
    op: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
) -> Result<GmresOutcome> {
    let (rx, ry) = rhs.shape();
    let r0 = rhs;
    let beta = norm(r0.as_slice());
    if beta == 0.0 || rx * ry == 0 {
        return Ok(GmresOutcome {
            solution: DenseMatrix::zeros(rx, ry),
            iterations: 0,
            history: vec![0.0],
        });
    }

    let mut basis: Vec<Vec<f64>> = vec![r0.as_slice().iter().map(|x| x / beta).collect()];
    // Column k of the Hessenberg matrix, already rotated.
    let mut h: Vec<Vec<f64>> = Vec::new();
    let mut rotations: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![beta];
    let mut history = vec![1.0];

    for k in 0..max_iter {
        let v = DenseMatrix::new(rx, ry, basis[k].clone())?;
        let mut w = op(&v)?.into_vec();
        let mut col = vec![0.0; k + 2];
        for (i, b) in basis.iter().enumerate() {
            let hij = dot(&w, b);
            col[i] = hij;
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= hij * y);
        }
        let hnext = norm(&w);
        col[k + 1] = hnext;
        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let (a, b) = (col[k], col[k + 1]);
        let rho = a.hypot(b);
        let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
        col[k] = rho;
        col[k + 1] = 0.0;
        rotations.push((c, s));
        g.push(-s * g[k]);
        g[k] *= c;
        h.push(col);

        let rel = g[k + 1].abs() / beta;
        if !rel.is_finite() {
            return Err(Error::NonFinite("GMRES residual"));
        }
        history.push(rel);
        let breakdown = hnext <= 1e-14 * beta;
        if rel <= tol || breakdown {
            let y = back_substitute(&h, &g[..=k]);
            let mut x = vec![0.0; rx * ry];
            for (yi, b) in y.iter().zip(&basis) {
                x.iter_mut().zip(b).for_each(|(xj, bj)| *xj += yi * bj);
            }
            return Ok(GmresOutcome {
                solution: DenseMatrix::new(rx, ry, x)?,
                iterations: k + 1,
                history,
            });
        }
        basis.push(w.iter().map(|x| x / hnext).collect());
    }
    Err(Error::GmresMaxIter {
        iterations: max_iter,
        residual: history.last().copied().unwrap_or(1.0),
        history,
    })
}

/// Solves the triangular system stored column-wise in `h`.
fn back_substitute(h: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = g[i];
        for j in i + 1..n {
            s -= h[j][i] * y[j];
        }
        y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(dt: f64) -> ReducedSystem {
        let l = vec![DenseMatrix::from_rows(&[&[-2.0, 1.0, 0.0], &[1.0, -2.0, 1.0], &[0.0, 1.0, -2.0]])];
        let r = vec![DenseMatrix::from_rows(&[&[1.0, 0.2], &[0.2, 1.5]])];
        ReducedSystem::from_parts(
            l,
            r,
            DenseMatrix::identity(3).scale(0.5),
            DenseMatrix::identity(2).scale(0.5),
            dt,
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs_takes_no_iterations() {
        let out = gmres_solve(&system(0.1), &DenseMatrix::zeros(3, 2), 1e-10, 10, true).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.solution, DenseMatrix::zeros(3, 2));
    }

    #[test]
    fn solves_small_system() {
        let sys = system(0.3);
        let b = DenseMatrix::from_fn(3, 2, |i, j| 1.0 + i as f64 - 0.5 * j as f64);
        for pre in [true, false] {
            let out = gmres_solve(&sys, &b, 1e-12, 20, pre).unwrap();
            assert!(sys.apply(&out.solution).sub(&b).frobenius_norm() < 1e-10 * b.frobenius_norm());
            assert!(out.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn max_iterations_reports_history() {
        let sys = system(0.3);
        let b = DenseMatrix::from_fn(3, 2, |i, j| 1.0 + i as f64 - 0.5 * j as f64);
        match gmres_solve(&sys, &b, 1e-14, 1, false) {
            Err(Error::GmresMaxIter { history, .. }) => assert_eq!(history.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
