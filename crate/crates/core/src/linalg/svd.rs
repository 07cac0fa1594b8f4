//! Thin SVD by Householder bidiagonalization and implicit-shift QR on the
//! bidiagonal (Golub-Reinsch).

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const MAX_SWEEPS: usize = 75;

/// Thin singular value decomposition `M = U diag(sigma) Vᵀ`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// Computes the thin SVD; singular values are non-negative and non-increasing.
pub fn dense_svd(m: &DenseMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite("SVD input"));
    }
    if m.rows() < m.cols() {
        let Svd { u, sigma, v } = golub_reinsch(&m.transpose())?;
        return Ok(sorted(Svd { u: v, sigma, v: u }));
    }
    Ok(sorted(golub_reinsch(m)?))
}

fn sorted(svd: Svd) -> Svd {
    let k = svd.sigma.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.sigma[b].total_cmp(&svd.sigma[a]));
    let pick = |m: &DenseMatrix| {
        let mut out = DenseMatrix::zeros(m.rows(), k);
        for (dst, &src) in order.iter().enumerate() {
            out.col_mut(dst).copy_from_slice(m.col(src));
        }
        out
    };
    Svd {
        u: pick(&svd.u),
        sigma: order.iter().map(|&i| svd.sigma[i]).collect(),
        v: pick(&svd.v),
    }
}

#[inline]
fn with_sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Requires `rows >= cols`.
fn golub_reinsch(m: &DenseMatrix) -> Result<Svd> {
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut w = vec![0.0; n];
    let mut v = DenseMatrix::zeros(n, n);
    let mut rv1 = vec![0.0; n];
    if n == 0 {
        return Ok(Svd { u: a, sigma: w, v });
    }

    // Householder reduction to bidiagonal form.
    let (mut g, mut scale, mut anorm) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut l = 0;
    for i in 0..n {
        l = i + 1;
        rv1[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        if i < rows {
            for k in i..rows {
                scale += a[(k, i)].abs();
            }
            if scale != 0.0 {
                let mut s = 0.0;
                for k in i..rows {
                    a[(k, i)] /= scale;
                    s += a[(k, i)] * a[(k, i)];
                }
                let f = a[(i, i)];
                g = -with_sign(s.sqrt(), f);
                let h = f * g - s;
                a[(i, i)] = f - g;
                for j in l..n {
                    let mut s = 0.0;
                    for k in i..rows {
                        s += a[(k, i)] * a[(k, j)];
                    }
                    let f = s / h;
                    for k in i..rows {
                        let aki = a[(k, i)];
                        a[(k, j)] += f * aki;
                    }
                }
                for k in i..rows {
                    a[(k, i)] *= scale;
                }
            }
        }
        w[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        if i < rows && i + 1 != n {
            for k in l..n {
                scale += a[(i, k)].abs();
            }
            if scale != 0.0 {
                let mut s = 0.0;
                for k in l..n {
                    a[(i, k)] /= scale;
                    s += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                g = -with_sign(s.sqrt(), f);
                let h = f * g - s;
                a[(i, l)] = f - g;
                for k in l..n {
                    rv1[k] = a[(i, k)] / h;
                }
                for j in l..rows {
                    let mut s = 0.0;
                    for k in l..n {
                        s += a[(j, k)] * a[(i, k)];
                    }
                    for k in l..n {
                        a[(j, k)] += s * rv1[k];
                    }
                }
                for k in l..n {
                    a[(i, k)] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    for i in (0..n).rev() {
        if i + 1 < n {
            if g != 0.0 {
                for j in l..n {
                    v[(j, i)] = (a[(i, j)] / a[(i, l)]) / g;
                }
                for j in l..n {
                    let mut s = 0.0;
                    for k in l..n {
                        s += a[(i, k)] * v[(k, j)];
                    }
                    for k in l..n {
                        let vki = v[(k, i)];
                        v[(k, j)] += s * vki;
                    }
                }
            }
            for j in l..n {
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        }
        v[(i, i)] = 1.0;
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for i in (0..n.min(rows)).rev() {
        let l = i + 1;
        let mut g = w[i];
        for j in l..n {
            a[(i, j)] = 0.0;
        }
        if g != 0.0 {
            g = 1.0 / g;
            for j in l..n {
                let mut s = 0.0;
                for k in l..rows {
                    s += a[(k, i)] * a[(k, j)];
                }
                let f = (s / a[(i, i)]) * g;
                for k in i..rows {
                    let aki = a[(k, i)];
                    a[(k, j)] += f * aki;
                }
            }
            for j in i..rows {
                a[(j, i)] *= g;
            }
        } else {
            for j in i..rows {
                a[(j, i)] = 0.0;
            }
        }
        a[(i, i)] += 1.0;
    }

    // Diagonalize the bidiagonal form.
    for k in (0..n).rev() {
        let mut its = 0;
        loop {
            let mut flag = true;
            let mut l = k;
            loop {
                // rv1[0] is always zero, so this terminates at l = 0.
                if rv1[l].abs() + anorm == anorm {
                    flag = false;
                    break;
                }
                if w[l - 1].abs() + anorm == anorm {
                    break;
                }
                l -= 1;
            }
            if flag {
                let nm = l - 1;
                let mut c = 0.0;
                let mut s = 1.0;
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if f.abs() + anorm == anorm {
                        break;
                    }
                    let g = w[i];
                    let h = f.hypot(g);
                    w[i] = h;
                    let h = 1.0 / h;
                    c = g * h;
                    s = -f * h;
                    for j in 0..rows {
                        let y = a[(j, nm)];
                        let z = a[(j, i)];
                        a[(j, nm)] = y * c + z * s;
                        a[(j, i)] = z * c - y * s;
                    }
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    for j in 0..n {
                        v[(j, k)] = -v[(j, k)];
                    }
                }
                break;
            }
            if its == MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    routine: "SVD",
                    iterations: MAX_SWEEPS,
                });
            }
            its += 1;
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + with_sign(g, f))) - h)) / x;
            let mut c = 1.0;
            let mut s = 1.0;
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g *= c;
                let mut z = f.hypot(h);
                rv1[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                for jj in 0..n {
                    let x = v[(jj, j)];
                    let z = v[(jj, i)];
                    v[(jj, j)] = x * c + z * s;
                    v[(jj, i)] = z * c - x * s;
                }
                z = f.hypot(h);
                w[j] = z;
                if z != 0.0 {
                    let zi = 1.0 / z;
                    c = f * zi;
                    s = h * zi;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                for jj in 0..rows {
                    let y = a[(jj, j)];
                    let z = a[(jj, i)];
                    a[(jj, j)] = y * c + z * s;
                    a[(jj, i)] = z * c - y * s;
                }
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }
    Ok(Svd { u: a, sigma: w, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd) -> DenseMatrix {
        s.u.scale_cols(&s.sigma).matmul_t(&s.v)
    }

    #[test]
    fn diagonal_matrix() {
        let m = DenseMatrix::from_diag(&[1.0, 3.0, 2.0]);
        let s = dense_svd(&m).unwrap();
        assert_eq!(s.sigma.len(), 3);
        for (got, want) in s.sigma.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(reconstruct(&s).sub(&m).max_abs() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let s = dense_svd(&DenseMatrix::zeros(4, 3)).unwrap();
        assert!(s.sigma.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn wide_matrix() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let s = dense_svd(&m).unwrap();
        assert_eq!((s.u.shape(), s.v.shape()), ((2, 2), (3, 2)));
        assert!(reconstruct(&s).sub(&m).frobenius_norm() < 1e-14 * m.frobenius_norm());
    }

    #[test]
    fn rank_one() {
        let m = DenseMatrix::from_fn(5, 4, |i, j| (i as f64 + 1.0) * (j as f64 - 1.5));
        let s = dense_svd(&m).unwrap();
        assert!(s.sigma[1] < 1e-14 * s.sigma[0]);
        assert!(reconstruct(&s).sub(&m).frobenius_norm() < 1e-14 * m.frobenius_norm());
    }
}
