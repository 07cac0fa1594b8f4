//! Kronecker products and column-stacking.

use crate::linalg::DenseMatrix;

/// Standard Kronecker product `A ⊗ B`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DenseMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Column-stacked `vec(F)` as an `rows*cols x 1` matrix.
pub fn vec_of(f: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::column_vector(f.as_slice())
}

/// Inverse of [`vec_of`].
pub fn unvec(v: &[f64], rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, v.to_vec()).expect("unvec: length must be rows*cols")
}
