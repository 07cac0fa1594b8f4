//! Separable coefficient factors.

use std::fmt;
use std::sync::Arc;

use crate::discretization::Grid1D;
use crate::error::{Error, Result};

/// A smooth scalar function of one variable that also reports its first and
/// second derivatives as `[f, f', f'']`.
#[derive(Clone)]
pub struct Profile(Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>);

impl Profile {
    pub fn new(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| [c, 0.0, 0.0])
    }

    /// Polynomial with coefficients in increasing degree.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::new(move |x| {
            let mut out = [0.0; 3];
            for (k, &c) in coeffs.iter().enumerate().rev() {
                let kf = k as f64;
                out[0] += c * x.powi(k as i32);
                if k >= 1 {
                    out[1] += c * kf * x.powi(k as i32 - 1);
                }
                if k >= 2 {
                    out[2] += c * kf * (kf - 1.0) * x.powi(k as i32 - 2);
                }
            }
            out
        })
    }

    /// `exp(-w (x - c)²)`.
    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::new(move |x| {
            let u = x - center;
            let e = (-width * u * u).exp();
            let d1 = -2.0 * width * u * e;
            [e, d1, (4.0 * width * width * u * u - 2.0 * width) * e]
        })
    }

    /// `sin(k x)`.
    pub fn sine(k: f64) -> Self {
        Self::new(move |x| {
            let (s, c) = (k * x).sin_cos();
            [s, k * c, -k * k * s]
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.0)(x)[0]
    }

    pub fn jet(&self, x: f64) -> [f64; 3] {
        (self.0)(x)
    }

    /// Pointwise product `f g`.
    pub fn product(&self, other: &Profile) -> Profile {
        let (f, g) = (self.clone(), other.clone());
        Profile::new(move |x| {
            let [a, a1, a2] = f.jet(x);
            let [b, b1, b2] = g.jet(x);
            [a * b, a1 * b + a * b1, a2 * b + 2.0 * a1 * b1 + a * b2]
        })
    }

    /// First derivative as a profile. Its own second derivative is not
    /// available and is reported as zero.
    pub fn derivative(&self) -> Profile {
        let f = self.clone();
        Profile::new(move |x| {
            let [_, d1, d2] = f.jet(x);
            [d1, d2, 0.0]
        })
    }

    /// `cos(k x)`.
    pub fn cosine(k: f64) -> Self {
        Self::new(move |x| {
            let (s, c) = (k * x).sin_cos();
            [c, -k * s, -k * k * c]
        })
    }

    /// Pointwise sum `f + g`.
    pub fn sum(&self, other: &Profile) -> Profile {
        let (f, g) = (self.clone(), other.clone());
        Profile::new(move |x| {
            let (a, b) = (f.jet(x), g.jet(x));
            [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
        })
    }

    /// `exp(-u²)` for the inner profile `u`.
    pub fn exp_neg_square(&self) -> Profile {
        let u = self.clone();
        Profile::new(move |x| {
            let [v, d1, d2] = u.jet(x);
            let e = (-v * v).exp();
            let g1 = -2.0 * v * d1;
            [e, g1 * e, (g1 * g1 - 2.0 * d1 * d1 - 2.0 * v * d2) * e]
        })
    }

    /// Pointwise `|f|`. Derivatives follow the sign of `f` away from its zeros.
    pub fn abs(&self) -> Profile {
        let f = self.clone();
        Profile::new(move |x| {
            let j = f.jet(x);
            let s = if j[0] < 0.0 { -1.0 } else { 1.0 };
            j.map(|v| s * v)
        })
    }

    pub fn scaled(&self, s: f64) -> Profile {
        let f = self.clone();
        Profile::new(move |x| f.jet(x).map(|v| s * v))
    }

    pub fn sample(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&x| self.value(x)).collect()
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Profile(..)")
    }
}

/// Samples of one coefficient factor at the nodes and at the cell faces.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableFactor {
    nodes: Vec<f64>,
    half: Vec<f64>,
}

impl SeparableFactor {
    pub fn new(nodes: Vec<f64>, half: Vec<f64>) -> Result<Self> {
        if half.len() != nodes.len() + 1 {
            return Err(Error::Dimension(format!(
                "{} node samples need {} face samples, got {}",
                nodes.len(),
                nodes.len() + 1,
                half.len()
            )));
        }
        if nodes.iter().chain(&half).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coefficient samples"));
        }
        Ok(Self { nodes, half })
    }

    /// Evaluates `p` at the nodes and faces of `grid`.
    pub fn sample(grid: &Grid1D, p: &Profile) -> Result<Self> {
        Self::new(p.sample(&grid.nodes()), p.sample(&grid.half_nodes()))
    }

    /// Builds face values from node samples by arithmetic averaging. The two
    /// outer faces copy the nearest node value.
    pub fn from_nodes_averaged(nodes: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        let half = (0..=n)
            .map(|k| {
                let left = if k == 0 { nodes[0] } else { nodes[k - 1] };
                let right = if k == n { nodes[n - 1] } else { nodes[k] };
                0.5 * (left + right)
            })
            .collect();
        Self::new(nodes, half)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Face values; entry `k` is the value at `x_{k-1/2}`.
    pub fn half(&self) -> &[f64] {
        &self.half
    }
}

/// One product term `f(x) g(y)` of a separable coefficient expansion.
#[derive(Debug, Clone)]
pub struct SeparableTerm {
    pub x: Profile,
    pub y: Profile,
}

impl SeparableTerm {
    pub fn new(x: Profile, y: Profile) -> Self {
        Self { x, y }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.x.value(x) * self.y.value(y)
    }
}

/// Multi-rank separable diffusion and advection coefficients.
///
/// `diffusion_x` holds the terms of `φ^x`, which is differentiated in `x`;
/// `advection_y` holds the terms of `σ^y`, differentiated in `y`; and so on.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub diffusion_x: Vec<SeparableTerm>,
    pub diffusion_y: Vec<SeparableTerm>,
    pub advection_x: Vec<SeparableTerm>,
    pub advection_y: Vec<SeparableTerm>,
}

impl CoefficientSet {
    pub fn new(
        diffusion_x: Vec<SeparableTerm>,
        diffusion_y: Vec<SeparableTerm>,
        advection_x: Vec<SeparableTerm>,
        advection_y: Vec<SeparableTerm>,
    ) -> Result<Self> {
        let set = Self {
            diffusion_x,
            diffusion_y,
            advection_x,
            advection_y,
        };
        if set.total_rank() == 0 {
            return Err(Error::Config("coefficient set has no terms".into()));
        }
        Ok(set)
    }

    /// `(ℓx, ℓy, kx, ky)`.
    pub fn ranks(&self) -> (usize, usize, usize, usize) {
        (
            self.diffusion_x.len(),
            self.diffusion_y.len(),
            self.advection_x.len(),
            self.advection_y.len(),
        )
    }

    /// Total number of separable terms, `ℓx + ℓy + kx + ky`.
    pub fn total_rank(&self) -> usize {
        let (a, b, c, d) = self.ranks();
        a + b + c + d
    }

    fn max_abs_sum(terms: &[SeparableTerm], gx: &Grid1D, gy: &Grid1D) -> f64 {
        if terms.is_empty() {
            return 0.0;
        }
        let xs: Vec<Vec<f64>> = terms.iter().map(|t| t.x.sample(&gx.nodes())).collect();
        let ys: Vec<Vec<f64>> = terms.iter().map(|t| t.y.sample(&gy.nodes())).collect();
        let mut m = 0.0_f64;
        for i in 0..gx.n() {
            for j in 0..gy.n() {
                let v: f64 = xs.iter().zip(&ys).map(|(a, b)| a[i] * b[j]).sum();
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Largest diffusion coefficient magnitude over the grid nodes.
    pub fn phi_max(&self, gx: &Grid1D, gy: &Grid1D) -> f64 {
        Self::max_abs_sum(&self.diffusion_x, gx, gy).max(Self::max_abs_sum(&self.diffusion_y, gx, gy))
    }

    /// Largest advection coefficient magnitude over the grid nodes.
    pub fn sigma_max(&self, gx: &Grid1D, gy: &Grid1D) -> f64 {
        Self::max_abs_sum(&self.advection_x, gx, gy).max(Self::max_abs_sum(&self.advection_y, gx, gy))
    }
}
