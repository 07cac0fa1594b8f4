use crate::error::{Error, Result};

const TABLEAU_TOL: f64 = 1e-12;

/// Butcher tableau of a stiffly accurate DIRK scheme with constant diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    /// Validates the tableau: lower triangular, `b_i = a_si`, `c_k = Σ_ℓ a_kℓ`
    /// and one positive value on the whole diagonal.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let s = a.len();
        if s == 0 || b.len() != s || c.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::Config("tableau must be square with matching b and c".into()));
        }
        if a.iter().flatten().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Butcher tableau"));
        }
        for (k, row) in a.iter().enumerate() {
            if row[k + 1..].iter().any(|&v| v != 0.0) {
                return Err(Error::Config("tableau is not lower triangular".into()));
            }
            if (row.iter().sum::<f64>() - c[k]).abs() > TABLEAU_TOL {
                return Err(Error::Config(format!("c[{k}] differs from the row sum of a")));
            }
            if (row[k] - a[0][0]).abs() > TABLEAU_TOL {
                return Err(Error::Config("tableau diagonal is not constant".into()));
            }
        }
        if !(a[0][0] > 0.0) {
            return Err(Error::Config("tableau diagonal must be positive".into()));
        }
        if b.iter().zip(&a[s - 1]).any(|(x, y)| (x - y).abs() > TABLEAU_TOL) {
            return Err(Error::Config("tableau is not stiffly accurate".into()));
        }
        Ok(Self { a, b, c })
    }

    /// Backward Euler as a one-stage DIRK.
    pub fn backward_euler() -> Self {
        Self::new(vec![vec![1.0]], vec![1.0], vec![1.0]).expect("valid tableau")
    }

    /// Two-stage, second-order, L-stable DIRK with `γ = 1 - √2/2`.
    pub fn dirk2() -> Self {
        let g = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
        Self::new(vec![vec![g, 0.0], vec![1.0 - g, g]], vec![1.0 - g, g], vec![g, 1.0]).expect("valid tableau")
    }

    /// Three-stage, third-order, L-stable DIRK with `x = 0.4358665215`.
    pub fn dirk3() -> Self {
        let x = 0.4358665215;
        let a31 = -1.5 * x * x + 4.0 * x - 0.25;
        let a32 = 1.5 * x * x - 5.0 * x + 1.25;
        Self::new(
            vec![vec![x, 0.0, 0.0], vec![(1.0 - x) / 2.0, x, 0.0], vec![a31, a32, x]],
            vec![a31, a32, x],
            vec![x, (1.0 + x) / 2.0, 1.0],
        )
        .expect("valid tableau")
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, k: usize, l: usize) -> f64 {
        self.a[k][l]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// The common diagonal entry `a_kk`.
    pub fn diagonal(&self) -> f64 {
        self.a[0][0]
    }
}

/// Tolerances of the adaptive-rank step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative residual required to accept a step.
    pub eps_tol: f64,
    /// Absolute singular-value cutoff when truncating Krylov bases.
    pub eps_kappa: f64,
    /// Relative singular-value cutoff when truncating the solution.
    pub eps: f64,
    /// Relative preconditioned residual for the reduced solve.
    pub eps_gmres: f64,
    /// Maximum number of basis augmentations per step.
    pub max_iter: usize,
    pub gmres_max_iter: usize,
}

impl Tolerances {
    pub fn new(eps_tol: f64, eps_kappa: f64, eps: f64, eps_gmres: f64) -> Result<Self> {
        let t = Self {
            eps_tol,
            eps_kappa,
            eps,
            eps_gmres,
            max_iter: 30,
            gmres_max_iter: 1000,
        };
        t.validate()?;
        Ok(t)
    }

    /// Checks signs and the ordering `eps_gmres, eps < 10⁻² eps_tol`.
    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_tol, self.eps_kappa, self.eps, self.eps_gmres];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(self.eps_tol > 0.0) {
            return Err(Error::Config("tolerances must be finite and non-negative, eps_tol positive".into()));
        }
        if !(self.eps_gmres < 1e-2 * self.eps_tol) {
            return Err(Error::Config(format!(
                "eps_gmres = {:e} must be below 1e-2 * eps_tol = {:e}",
                self.eps_gmres,
                1e-2 * self.eps_tol
            )));
        }
        if !(self.eps < 1e-2 * self.eps_tol) {
            return Err(Error::Config(format!(
                "eps = {:e} must be below 1e-2 * eps_tol = {:e}",
                self.eps,
                1e-2 * self.eps_tol
            )));
        }
        if self.max_iter == 0 || self.gmres_max_iter == 0 {
            return Err(Error::Config("iteration limits must be positive".into()));
        }
        Ok(())
    }
}
