use crate::error::{Error, Result};

/// Uniform grid of interior nodes on `[xmin, xmax]` with homogeneous
/// Dirichlet boundaries: node `i` sits at `xmin + (i + 1) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    xmin: f64,
    xmax: f64,
    dx: f64,
}

impl Grid1D {
    pub fn new(n: usize, xmin: f64, xmax: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("grid needs at least 2 interior points, got {n}")));
        }
        if !(xmin.is_finite() && xmax.is_finite() && xmax > xmin) {
            return Err(Error::Config(format!("invalid domain [{xmin}, {xmax}]")));
        }
        Ok(Self {
            n,
            xmin,
            xmax,
            dx: (xmax - xmin) / (n + 1) as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node(&self, i: usize) -> f64 {
        self.xmin + (i + 1) as f64 * self.dx
    }

    /// Interior node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Cell-face coordinates `x_{i-1/2}` for `i = 0..=n`.
    pub fn half_nodes(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|k| self.xmin + (k as f64 + 0.5) * self.dx)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_excludes_boundaries() {
        let g = Grid1D::new(4, 0.0, 1.0).unwrap();
        assert_eq!(g.dx(), 0.2);
        assert_eq!(g.nodes().len(), 4);
        assert!((g.node(0) - 0.2).abs() < 1e-15 && (g.node(3) - 0.8).abs() < 1e-15);
        let h = g.half_nodes();
        assert_eq!(h.len(), 5);
        assert!((h[0] - 0.1).abs() < 1e-15 && (h[4] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(1, 0.0, 1.0).is_err());
        assert!(Grid1D::new(4, 1.0, 1.0).is_err());
    }
}
