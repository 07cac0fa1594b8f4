use crate::discretization::{Grid1D, SeparableTerm};
use crate::error::{Error, Result};
use crate::linalg::{dense_svd, reduced_qr, DenseMatrix};

/// A matrix `F = U S Vᵀ` kept in factored form.
///
/// `U` and `V` have orthonormal columns. `S` may be rectangular, as it is
/// right after a reduced solve on bases of different sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankMatrix {
    u: DenseMatrix,
    s: DenseMatrix,
    v: DenseMatrix,
}

impl LowRankMatrix {
    pub fn new(u: DenseMatrix, s: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if s.shape() != (u.cols(), v.cols()) {
            return Err(Error::Dimension(format!(
                "core is {}x{} but factors have {} and {} columns",
                s.rows(),
                s.cols(),
                u.cols(),
                v.cols()
            )));
        }
        Ok(Self { u, s, v })
    }

    /// The zero matrix of rank 0.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            u: DenseMatrix::zeros(rows, 0),
            s: DenseMatrix::zeros(0, 0),
            v: DenseMatrix::zeros(cols, 0),
        }
    }

    /// Factors `X Yᵀ` for tall `X` and `Y` with matching column counts.
    pub fn from_outer(x: &DenseMatrix, y: &DenseMatrix) -> Result<Self> {
        if x.cols() != y.cols() {
            return Err(Error::Dimension("outer factors differ in column count".into()));
        }
        if x.cols() > x.rows() || y.cols() > y.rows() {
            return Self::from_dense(&x.matmul_t(y));
        }
        let (qx, rx) = reduced_qr(x);
        let (qy, ry) = reduced_qr(y);
        Self::new(qx, rx.matmul_t(&ry), qy)
    }

    /// Factors a dense matrix through its SVD, dropping exact zeros.
    pub fn from_dense(f: &DenseMatrix) -> Result<Self> {
        let svd = dense_svd(f)?;
        let r = svd.sigma.iter().take_while(|&&s| s > 0.0).count();
        Self::new(
            svd.u.columns(0, r),
            DenseMatrix::from_diag(&svd.sigma[..r]),
            svd.v.columns(0, r),
        )
    }

    /// Samples `Σ x_k(x) y_k(y)` on the grid nodes.
    pub fn from_separable(terms: &[SeparableTerm], gx: &Grid1D, gy: &Grid1D) -> Result<Self> {
        let (xs, ys) = (gx.nodes(), gy.nodes());
        let cols_x: Vec<Vec<f64>> = terms.iter().map(|t| t.x.sample(&xs)).collect();
        let cols_y: Vec<Vec<f64>> = terms.iter().map(|t| t.y.sample(&ys)).collect();
        let x = DenseMatrix::from_fn(xs.len(), terms.len(), |i, k| cols_x[k][i]);
        let y = DenseMatrix::from_fn(ys.len(), terms.len(), |j, k| cols_y[k][j]);
        Self::from_outer(&x, &y)
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn s(&self) -> &DenseMatrix {
        &self.s
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    /// Size of the core, `min(r_x, r_y)`.
    pub fn rank(&self) -> usize {
        self.s.rows().min(self.s.cols())
    }

    /// `‖F‖_F`, which equals `‖S‖_F` for orthonormal factors.
    pub fn frobenius_norm(&self) -> f64 {
        self.s.frobenius_norm()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.u.matmul(&self.s).matmul_t(&self.v)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            s: self.s.scale(c),
            ..self.clone()
        }
    }

    /// `Δx Δy Σ F_ij` evaluated as `Δx Δy (1ᵀU) S (Vᵀ1)`.
    pub fn mass(&self, dx: f64, dy: f64) -> f64 {
        let col_sums = |m: &DenseMatrix| (0..m.cols()).map(|j| m.col(j).iter().sum()).collect::<Vec<f64>>();
        let (a, b) = (col_sums(&self.u), col_sums(&self.v));
        let mut total = 0.0;
        for (j, bj) in b.iter().enumerate() {
            for (i, ai) in a.iter().enumerate() {
                total += ai * self.s[(i, j)] * bj;
            }
        }
        dx * dy * total
    }
}

/// Result of rank truncation: the truncated matrix and the orthogonal
/// transforms that map old coordinates to the kept singular directions.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub matrix: LowRankMatrix,
    /// `r_x x r₁`, so that the new `U` is `U · left`.
    pub left: DenseMatrix,
    /// `r_y x r₁`, so that the new `V` is `V · right`.
    pub right: DenseMatrix,
}

/// Keeps the singular values with `σ_j / ‖S‖_F > eps`.
pub fn truncated_svd(f: &LowRankMatrix, eps: f64) -> Result<Truncation> {
    let (rx, ry) = f.s.shape();
    if rx == 0 || ry == 0 {
        return Ok(Truncation {
            matrix: LowRankMatrix::zeros(f.u.rows(), f.v.rows()),
            left: DenseMatrix::zeros(rx, 0),
            right: DenseMatrix::zeros(ry, 0),
        });
    }
    let svd = dense_svd(&f.s)?;
    let norm = f.s.frobenius_norm();
    let r = if norm > 0.0 {
        svd.sigma.iter().take_while(|&&s| s / norm > eps).count()
    } else {
        0
    };
    let left = svd.u.columns(0, r);
    let right = svd.v.columns(0, r);
    let matrix = LowRankMatrix::new(
        f.u.matmul(&left),
        DenseMatrix::from_diag(&svd.sigma[..r]),
        f.v.matmul(&right),
    )?;
    Ok(Truncation { matrix, left, right })
}
