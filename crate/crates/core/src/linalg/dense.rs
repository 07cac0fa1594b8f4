//! Column-major dense matrices.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// A dense real matrix stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps column-major `data`, rejecting wrong lengths and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input; meant for literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| rows[i][j])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// A single column as an `n x 1` matrix.
    pub fn column_vector(v: &[f64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Copies of columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols, "column range out of bounds");
        Self {
            rows: self.rows,
            cols: end - start,
            data: self.data[start * self.rows..end * self.rows].to_vec(),
        }
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &DenseMatrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for j in 0..b.cols {
            let dst = (c0 + j) * self.rows + r0;
            self.data[dst..dst + b.rows].copy_from_slice(b.col(j));
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(blocks: &[&DenseMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("hcat blocks differ in row count".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// `self * b`.
    pub fn matmul(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.cols, b.rows, "matmul: inner dimensions differ");
        let mut c = Self::zeros(self.rows, b.cols);
        for j in 0..b.cols {
            let cj = &mut c.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let s = b.data[j * b.rows + k];
                if s != 0.0 {
                    axpy(s, &self.data[k * self.rows..(k + 1) * self.rows], cj);
                }
            }
        }
        c
    }

    /// `selfᵀ * b`.
    pub fn t_matmul(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.rows, b.rows, "t_matmul: row counts differ");
        let mut c = Self::zeros(self.cols, b.cols);
        for j in 0..b.cols {
            let bj = b.col(j);
            for i in 0..self.cols {
                c.data[j * self.cols + i] = dot(self.col(i), bj);
            }
        }
        c
    }

    /// `self * bᵀ`.
    pub fn matmul_t(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.cols, b.cols, "matmul_t: column counts differ");
        let mut c = Self::zeros(self.rows, b.rows);
        for k in 0..self.cols {
            let ak = self.col(k);
            for j in 0..b.rows {
                let s = b.data[k * b.rows + j];
                if s != 0.0 {
                    axpy(s, ak, &mut c.data[j * self.rows..(j + 1) * self.rows]);
                }
            }
        }
        c
    }

    pub fn add(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), b.shape(), "add: shapes differ");
        let data = self.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
        Self { data, ..*self }
    }

    pub fn sub(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.shape(), b.shape(), "sub: shapes differ");
        let data = self.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
        Self { data, ..*self }
    }

    pub fn scale(&self, s: f64) -> Self {
        let data = self.data.iter().map(|x| s * x).collect();
        Self { data, ..*self }
    }

    /// `self += s * b`.
    pub fn add_scaled(&mut self, s: f64, b: &DenseMatrix) {
        assert_eq!(self.shape(), b.shape(), "add_scaled: shapes differ");
        axpy(s, &b.data, &mut self.data);
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for j in 0..self.cols {
            for (x, s) in out.col_mut(j).iter_mut().zip(d) {
                *x *= s;
            }
        }
        out
    }

    /// Scales column `j` by `d[j]` (right multiplication by a diagonal).
    pub fn scale_cols(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for (j, s) in d.iter().enumerate() {
            for x in out.col_mut(j) {
                *x *= s;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Sum of all entries.
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Euclidean norm with scaling to avoid overflow.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ss: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}
