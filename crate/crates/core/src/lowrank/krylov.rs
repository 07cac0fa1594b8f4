use crate::error::{Error, Result};
use crate::linalg::{dense_svd, reduced_qr, thomas_solve, DenseMatrix, TriLu, TridiagonalMatrix};

/// Relative threshold used when re-orthonormalizing a chain block.
const CHAIN_RANGE_TOL: f64 = 1e-12;

/// Orthonormal basis for the range of `m`, keeping directions whose singular
/// value exceeds `threshold(σ_max)`.
fn range_basis(m: &DenseMatrix, threshold: impl Fn(f64) -> f64) -> Result<DenseMatrix> {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return Ok(DenseMatrix::zeros(rows, 0));
    }
    let (q, core) = if rows >= cols {
        reduced_qr(m)
    } else {
        (DenseMatrix::identity(rows), m.clone())
    };
    let svd = dense_svd(&core)?;
    let cut = threshold(svd.sigma.first().copied().unwrap_or(0.0));
    let r = svd.sigma.iter().take_while(|&&s| s > cut).count();
    Ok(q.matmul(&svd.u.columns(0, r)))
}

/// Orthonormal basis of the concatenated blocks, dropping directions with
/// singular value at most `eps_kappa` (an absolute threshold).
pub fn svd_truncated_qr(blocks: &[&DenseMatrix], eps_kappa: f64) -> Result<DenseMatrix> {
    if blocks.is_empty() {
        return Err(Error::Dimension("svd_truncated_qr needs at least one block".into()));
    }
    range_basis(&DenseMatrix::hcat(blocks)?, |_| eps_kappa)
}

/// An operator that advances one Krylov chain.
#[derive(Debug, Clone, Copy)]
pub enum KrylovOp<'a> {
    Multiply(&'a TridiagonalMatrix),
    Solve(&'a TriLu),
    Diagonal(&'a [f64]),
}

impl KrylovOp<'_> {
    pub fn apply(&self, w: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            KrylovOp::Multiply(t) => Ok(t.apply(w)),
            KrylovOp::Solve(lu) => thomas_solve(lu, w),
            KrylovOp::Diagonal(d) => Ok(w.scale_rows(d)),
        }
    }
}

/// Extended Krylov basis `[U, M₁U, …, M_lU, …, M₁^{m+1}U, …, M_l^{m+1}U]`
/// for one direction, with one power chain per operator.
///
/// Each chain block is re-orthonormalized after every application. This
/// keeps the span of `M_i^k U` while making the absolute truncation
/// threshold independent of the operator norms.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    q: DenseMatrix,
    chains: Vec<DenseMatrix>,
    iteration: usize,
    last_width: usize,
}

impl KrylovBasis {
    /// Starts a basis from `seed` with `n_ops` chains.
    pub fn new(seed: &DenseMatrix, n_ops: usize, eps_kappa: f64) -> Result<Self> {
        let q = svd_truncated_qr(&[seed], eps_kappa)?;
        Ok(Self {
            chains: vec![q.clone(); n_ops],
            last_width: q.cols(),
            q,
            iteration: 0,
        })
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn size(&self) -> usize {
        self.q.cols()
    }

    /// Number of completed augmentations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn chains(&self) -> &[DenseMatrix] {
        &self.chains
    }

    /// Column count of the last concatenation before truncation.
    pub fn pre_truncation_width(&self) -> usize {
        self.last_width
    }

    /// Advances every chain by one power and appends the new directions.
    ///
    /// The chain blocks are orthogonalized against the current basis and only
    /// that complement goes through the SVD truncation, so the basis grows
    /// monotonically and always contains the seed. Truncating the whole
    /// concatenation instead would rotate kept directions by up to `eps_kappa`
    /// on every augmentation.
    pub fn augment(&mut self, ops: &[KrylovOp<'_>], eps_kappa: f64) -> Result<()> {
        if ops.len() != self.chains.len() {
            return Err(Error::Dimension(format!(
                "basis has {} chains but {} operators were given",
                self.chains.len(),
                ops.len()
            )));
        }
        let mut applied = Vec::with_capacity(ops.len());
        for (chain, op) in self.chains.iter_mut().zip(ops) {
            let next = op.apply(chain)?;
            *chain = range_basis(&next, |smax| CHAIN_RANGE_TOL * smax)?;
            applied.push(next);
        }
        let blocks: Vec<&DenseMatrix> = applied.iter().collect();
        let mut fresh = DenseMatrix::hcat(&blocks)?;
        self.last_width = self.q.cols() + fresh.cols();
        for _pass in 0..2 {
            let coeffs = self.q.t_matmul(&fresh);
            fresh.add_scaled(-1.0, &self.q.matmul(&coeffs));
        }
        let extra = svd_truncated_qr(&[&fresh], eps_kappa)?;
        if extra.cols() > 0 {
            // Guard against directions that re-entered the span through rounding.
            let mut extra = extra;
            let coeffs = self.q.t_matmul(&extra);
            extra.add_scaled(-1.0, &self.q.matmul(&coeffs));
            let extra = range_basis(&extra, |_| 0.5)?;
            self.q = DenseMatrix::hcat(&[&self.q, &extra])?;
        }
        self.iteration += 1;
        Ok(())
    }
}
