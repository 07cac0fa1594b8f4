//! Tridiagonal matrices and the Thomas algorithm.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Tridiagonal matrix stored as sub-, main and super-diagonal arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        let off = n.saturating_sub(1);
        if sub.len() != off || sup.len() != off {
            return Err(Error::Dimension(format!(
                "tridiagonal of order {n} needs off-diagonals of length {off}, got {} and {}",
                sub.len(),
                sup.len()
            )));
        }
        if sub.iter().chain(&diag).chain(&sup).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tridiagonal matrix"));
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn zeros(n: usize) -> Self {
        let off = n.saturating_sub(1);
        Self {
            sub: vec![0.0; off],
            diag: vec![0.0; n],
            sup: vec![0.0; off],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n);
        t.diag.fill(1.0);
        t
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n(), other.n(), "lincomb: orders differ");
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Self {
            sub: mix(&self.sub, &other.sub),
            diag: mix(&self.diag, &other.diag),
            sup: mix(&self.sup, &other.sup),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.lincomb(s, self, 0.0)
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            diag: self.diag.clone(),
            sup: self.sub.clone(),
        }
    }

    /// `self * x` for a single vector.
    pub fn apply_vec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        assert!(x.len() == n && y.len() == n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// `self * x`, column by column.
    pub fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(x.rows(), self.n(), "tridiagonal apply: row mismatch");
        let mut y = DenseMatrix::zeros(x.rows(), x.cols());
        for j in 0..x.cols() {
            self.apply_vec(x.col(j), y.col_mut(j));
        }
        y
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// LU factors of a tridiagonal matrix (no pivoting).
#[derive(Debug, Clone, PartialEq)]
pub struct TriLu {
    /// Elimination multipliers `l[i]` for rows `1..n`.
    lower: Vec<f64>,
    /// Pivots.
    pivots: Vec<f64>,
    sup: Vec<f64>,
}

impl TriLu {
    /// Factors `a`; a pivot below `1e-14 * max|diag|` is reported as singular.
    pub fn factor(a: &TridiagonalMatrix) -> Result<Self> {
        let n = a.n();
        let scale = a.diag.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let threshold = 1e-14 * scale;
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut pivots = vec![0.0; n];
        for i in 0..n {
            let mut p = a.diag[i];
            if i > 0 {
                let l = a.sub[i - 1] / pivots[i - 1];
                lower[i - 1] = l;
                p -= l * a.sup[i - 1];
            }
            if p.abs() <= threshold || !p.is_finite() {
                return Err(Error::SingularPivot { row: i, pivot: p });
            }
            pivots[i] = p;
        }
        Ok(Self {
            lower,
            pivots,
            sup: a.sup.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.pivots.len()
    }

    /// Solves in place for one right-hand side.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n();
        assert_eq!(x.len(), n);
        for i in 1..n {
            x[i] -= self.lower[i - 1] * x[i - 1];
        }
        if n == 0 {
            return;
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.sup[i] * x[i + 1]) / self.pivots[i];
        }
    }
}

/// Solves `A X = rhs` column-wise with a precomputed factorization.
pub fn thomas_solve(lu: &TriLu, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if rhs.rows() != lu.n() {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, operator has order {}",
            rhs.rows(),
            lu.n()
        )));
    }
    let mut x = rhs.clone();
    for j in 0..x.cols() {
        lu.solve_in_place(x.col_mut(j));
    }
    Ok(x)
}
