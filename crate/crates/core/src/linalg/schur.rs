//! Real Schur decomposition: Householder reduction to Hessenberg form
//! followed by Francis double-shift QR iterations.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// `A = Q T Qᵀ` with `Q` orthogonal and `T` quasi-upper-triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
}

impl SchurForm {
    /// Sizes (1 or 2) of the diagonal blocks of `T`, top to bottom.
    pub fn block_sizes(&self) -> Vec<usize> {
        diagonal_blocks(&self.t)
    }
}

pub(crate) fn diagonal_blocks(t: &DenseMatrix) -> Vec<usize> {
    let n = t.rows();
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            sizes.push(2);
            i += 2;
        } else {
            sizes.push(1);
            i += 1;
        }
    }
    sizes
}

/// Computes the real Schur form of a square matrix.
pub fn real_schur(m: &DenseMatrix) -> Result<SchurForm> {
    if !m.is_square() {
        return Err(Error::Dimension("real Schur of a non-square matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("Schur input"));
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut q = DenseMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    francis(&mut h, &mut q)?;
    for j in 0..n {
        for i in j + 2..n {
            h[(i, j)] = 0.0;
        }
    }
    Ok(SchurForm { q, t: h })
}

/// Householder vector `v` (with `v[0] = 1` implied scaling) and `beta` so that
/// `(I - beta v vᵀ) x = ±‖x‖ e1`.
fn householder(x: &[f64]) -> (Vec<f64>, f64) {
    let alpha = x[0];
    let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
    let mut v = x.to_vec();
    if sigma == 0.0 {
        v[0] = 1.0;
        return (v, 0.0);
    }
    let mu = (alpha * alpha + sigma).sqrt();
    v[0] = if alpha <= 0.0 { alpha - mu } else { -sigma / (alpha + mu) };
    let v0 = v[0];
    let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for vi in v.iter_mut() {
        *vi /= v0;
    }
    (v, beta)
}

/// Applies `(I - beta v vᵀ)` from the left to rows `r0..r0+len` over columns `cols`.
fn reflect_rows(h: &mut DenseMatrix, v: &[f64], beta: f64, r0: usize, cols: std::ops::Range<usize>) {
    if beta == 0.0 {
        return;
    }
    for j in cols {
        let s: f64 = v.iter().enumerate().map(|(k, vk)| vk * h[(r0 + k, j)]).sum();
        let s = beta * s;
        for (k, vk) in v.iter().enumerate() {
            h[(r0 + k, j)] -= s * vk;
        }
    }
}

/// Applies `(I - beta v vᵀ)` from the right to columns `c0..c0+len` over rows `rows`.
fn reflect_cols(h: &mut DenseMatrix, v: &[f64], beta: f64, c0: usize, rows: std::ops::Range<usize>) {
    if beta == 0.0 {
        return;
    }
    for i in rows {
        let s: f64 = v.iter().enumerate().map(|(k, vk)| vk * h[(i, c0 + k)]).sum();
        let s = beta * s;
        for (k, vk) in v.iter().enumerate() {
            h[(i, c0 + k)] -= s * vk;
        }
    }
}

fn hessenberg(h: &mut DenseMatrix, q: &mut DenseMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let (v, beta) = householder(&x);
        reflect_rows(h, &v, beta, k + 1, k..n);
        reflect_cols(h, &v, beta, k + 1, 0..n);
        reflect_cols(q, &v, beta, k + 1, 0..n);
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
}

fn francis(h: &mut DenseMatrix, q: &mut DenseMatrix) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let max_iter = 100 * n.max(10);
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    let norm = h.max_abs();
    loop {
        if hi == 0 {
            break;
        }
        // Deflation search.
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            let s = if s == 0.0 { norm } else { s };
            if h[(l, l - 1)].abs() <= f64::EPSILON * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        if l + 1 == hi {
            standardize_block(h, q, l);
            if hi < 2 {
                break;
            }
            hi -= 2;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                routine: "real Schur",
                iterations: total,
            });
        }
        double_shift_step(h, q, l, hi, iter);
    }
    Ok(())
}

fn double_shift_step(h: &mut DenseMatrix, q: &mut DenseMatrix, l: usize, hi: usize, iter: usize) {
    let n = h.rows();
    let (s, t) = if iter % 11 == 10 {
        // Exceptional shift to break cycles.
        let w = h[(hi, hi - 1)].abs() + h[(hi - 1, hi - 2)].abs();
        let x = h[(hi, hi)] + 0.75 * w;
        (2.0 * x, x * x - 0.4375 * w * w)
    } else {
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        (a + d, a * d - b * c)
    };
    let mut x = h[(l, l)] * h[(l, l)] + h[(l, l + 1)] * h[(l + 1, l)] - s * h[(l, l)] + t;
    let mut y = h[(l + 1, l)] * (h[(l, l)] + h[(l + 1, l + 1)] - s);
    let mut z = h[(l + 1, l)] * h[(l + 2, l + 1)];
    for k in l..hi - 1 {
        let (v, beta) = householder(&[x, y, z]);
        let c0 = if k > l { k - 1 } else { l };
        reflect_rows(h, &v, beta, k, c0..n);
        let r1 = (k + 4).min(hi + 1);
        reflect_cols(h, &v, beta, k, 0..r1);
        reflect_cols(q, &v, beta, k, 0..n);
        if k > l {
            h[(k + 1, k - 1)] = 0.0;
            h[(k + 2, k - 1)] = 0.0;
        }
        x = h[(k + 1, k)];
        y = h[(k + 2, k)];
        if k + 3 <= hi {
            z = h[(k + 3, k)];
        }
    }
    let (v, beta) = householder(&[x, y]);
    let k = hi - 1;
    reflect_rows(h, &v, beta, k, (k - 1)..n);
    reflect_cols(h, &v, beta, k, 0..hi + 1);
    reflect_cols(q, &v, beta, k, 0..n);
    h[(hi, hi - 2)] = 0.0;
}

/// Splits a 2x2 diagonal block with real eigenvalues into triangular form;
/// complex pairs are left as a 2x2 block.
fn standardize_block(h: &mut DenseMatrix, q: &mut DenseMatrix, l: usize) {
    let n = h.rows();
    let (a, b, c, d) = (h[(l, l)], h[(l, l + 1)], h[(l + 1, l)], h[(l + 1, l + 1)]);
    if c == 0.0 {
        return;
    }
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    if disc < 0.0 {
        return;
    }
    // Eigenvector (z, c) for eigenvalue d + z.
    let z = p + if p >= 0.0 { disc.sqrt() } else { -disc.sqrt() };
    let tau = z.hypot(c);
    let (cs, sn) = (z / tau, c / tau);
    for j in l..n {
        let (x0, x1) = (h[(l, j)], h[(l + 1, j)]);
        h[(l, j)] = cs * x0 + sn * x1;
        h[(l + 1, j)] = -sn * x0 + cs * x1;
    }
    for i in 0..l + 2 {
        let (x0, x1) = (h[(i, l)], h[(i, l + 1)]);
        h[(i, l)] = cs * x0 + sn * x1;
        h[(i, l + 1)] = -sn * x0 + cs * x1;
    }
    for i in 0..n {
        let (x0, x1) = (q[(i, l)], q[(i, l + 1)]);
        q[(i, l)] = cs * x0 + sn * x1;
        q[(i, l + 1)] = -sn * x0 + cs * x1;
    }
    h[(l + 1, l)] = 0.0;
}
