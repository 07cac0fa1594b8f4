//! Built-in test problems `ex41` through `ex44`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::discretization::{CoefficientSet, Grid1D, Profile, SeparableTerm};
use crate::error::{Error, Result};

/// A space-separable term modulated in time: `h(t) a(x) b(y)`.
#[derive(Debug, Clone)]
pub struct TimeSeparableTerm {
    pub time: Profile,
    pub space: SeparableTerm,
}

/// Identifier of a built-in problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExampleId {
    /// Rank-3 diffusion with a rank-1 swirling advection field.
    Ex41,
    /// Manufactured solution with time-varying rank.
    Ex42,
    /// Swirling deformation flow with weak constant diffusion.
    Ex43,
    /// Coefficients balanced around a prescribed steady state.
    Ex44,
}

impl ExampleId {
    pub const ALL: [ExampleId; 4] = [ExampleId::Ex41, ExampleId::Ex42, ExampleId::Ex43, ExampleId::Ex44];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::Ex41 => "ex41",
            ExampleId::Ex42 => "ex42",
            ExampleId::Ex43 => "ex43",
            ExampleId::Ex44 => "ex44",
        }
    }

    pub fn problem(self) -> Problem {
        match self {
            ExampleId::Ex41 => ex41(),
            ExampleId::Ex42 => ex42(),
            ExampleId::Ex43 => ex43(),
            ExampleId::Ex44 => ex44(),
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown example '{s}' (expected ex41, ex42, ex43 or ex44)")))
    }
}

/// Coefficients, data and reference solutions of one problem on a square domain.
#[derive(Debug, Clone)]
pub struct Problem {
    pub id: ExampleId,
    pub domain: (f64, f64),
    pub coefficients: CoefficientSet,
    /// Initial condition as a sum of separable terms.
    pub initial: Vec<SeparableTerm>,
    /// Source term; empty when the equation is homogeneous.
    pub source: Vec<TimeSeparableTerm>,
    /// Closed-form solution, when one is known.
    pub exact: Vec<TimeSeparableTerm>,
    /// Steady state the solution relaxes to, up to its mass.
    pub equilibrium: Option<SeparableTerm>,
    /// Whether the discrete mass is pinned to that of `equilibrium` after every step.
    pub conserve_mass: bool,
}

impl Problem {
    /// Grids with `n` interior points per direction.
    pub fn grids(&self, n: usize) -> Result<(Grid1D, Grid1D)> {
        let g = Grid1D::new(n, self.domain.0, self.domain.1)?;
        Ok((g, g))
    }

    /// Discrete mass `Δx Δy Σ f_eq` of the equilibrium on the given grids.
    pub fn equilibrium_mass(&self, gx: &Grid1D, gy: &Grid1D) -> Option<f64> {
        let eq = self.equilibrium.as_ref()?;
        let sx: f64 = eq.x.sample(&gx.nodes()).iter().sum();
        let sy: f64 = eq.y.sample(&gy.nodes()).iter().sum();
        Some(gx.dx() * gy.dx() * sx * sy)
    }

    /// Evaluates the closed-form solution at `(x, y, t)`.
    pub fn exact_value(&self, x: f64, y: f64, t: f64) -> Option<f64> {
        if self.exact.is_empty() {
            return None;
        }
        Some(self.exact.iter().map(|term| term.time.value(t) * term.space.eval(x, y)).sum())
    }
}

fn term(x: Profile, y: Profile) -> SeparableTerm {
    SeparableTerm::new(x, y)
}

fn line() -> Profile {
    Profile::polynomial(vec![0.0, 1.0])
}

/// `exp(-(s - c f(s))²)` with `f` a sine or cosine profile.
fn bump(wobble: Profile, c: f64) -> Profile {
    line().sum(&wobble.scaled(-c)).exp_neg_square()
}

fn ex41_diffusion() -> Vec<SeparableTerm> {
    vec![
        term(bump(Profile::sine(1.0), 0.3), bump(Profile::cosine(1.0), 0.3)),
        term(bump(Profile::sine(PI), 0.6), bump(Profile::sine(PI), 0.6)),
        term(bump(Profile::sine(2.0 * PI), 0.6), bump(Profile::sine(2.0 * PI), 0.6)),
    ]
}

/// `σ^x = (1 - x²) 2y`, `σ^y = -2x (1 - y²)`, scaled by `sign`.
fn swirl(sign: f64) -> (Vec<SeparableTerm>, Vec<SeparableTerm>) {
    let bowl = Profile::polynomial(vec![1.0, 0.0, -1.0]);
    let two_s = Profile::polynomial(vec![0.0, 2.0]);
    (
        vec![term(bowl.scaled(sign), two_s.clone())],
        vec![term(two_s.scaled(-sign), bowl)],
    )
}

fn two_gaussians(width: f64) -> Vec<SeparableTerm> {
    vec![
        term(Profile::gaussian(0.3, width).scaled(0.5), Profile::gaussian(0.35, width)),
        term(Profile::gaussian(0.65, width).scaled(0.8), Profile::gaussian(0.5, width)),
    ]
}

fn ex41() -> Problem {
    let (adv_x, adv_y) = swirl(1.0);
    Problem {
        id: ExampleId::Ex41,
        domain: (-1.0, 1.0),
        coefficients: CoefficientSet::new(ex41_diffusion(), ex41_diffusion(), adv_x, adv_y)
            .expect("non-empty coefficients"),
        initial: two_gaussians(400.0),
        source: Vec::new(),
        exact: Vec::new(),
        equilibrium: None,
        conserve_mass: false,
    }
}

fn ex42_solution() -> Vec<TimeSeparableTerm> {
    let g = |c: f64| Profile::gaussian(c, 100.0);
    let t = |space: SeparableTerm, center: f64, width: f64| TimeSeparableTerm {
        time: Profile::gaussian(center, width * PI),
        space,
    };
    vec![
        t(term(Profile::sine(PI), Profile::sine(PI)), 2.0, 0.1),
        t(term(Profile::sine(2.0 * PI), Profile::sine(2.0 * PI)), 10.0, 0.5),
        t(term(g(0.3), g(0.3)), 15.0, 0.5),
        t(term(g(-0.3), g(-0.3)), 15.0, 0.5),
    ]
}

/// Source `∂f/∂t - 𝓛f` of a time-separable solution, expanded term by term.
pub fn manufactured_source(coeffs: &CoefficientSet, solution: &[TimeSeparableTerm]) -> Vec<TimeSeparableTerm> {
    let mut out = Vec::new();
    for s in solution {
        let (a, b) = (&s.space.x, &s.space.y);
        let minus_h = s.time.scaled(-1.0);
        out.push(TimeSeparableTerm {
            time: s.time.derivative(),
            space: term(a.clone(), b.clone()),
        });
        // (φ1 a')' φ2 b
        for c in &coeffs.diffusion_x {
            let flux = c.x.product(&a.derivative()).derivative();
            out.push(TimeSeparableTerm {
                time: minus_h.clone(),
                space: term(flux, c.y.product(b)),
            });
        }
        // φ1 a (φ2 b')'
        for c in &coeffs.diffusion_y {
            let flux = c.y.product(&b.derivative()).derivative();
            out.push(TimeSeparableTerm {
                time: minus_h.clone(),
                space: term(c.x.product(a), flux),
            });
        }
        // -(σ1 a)' σ2 b
        for c in &coeffs.advection_x {
            out.push(TimeSeparableTerm {
                time: s.time.clone(),
                space: term(c.x.product(a).derivative(), c.y.product(b)),
            });
        }
        // -σ1 a (σ2 b)'
        for c in &coeffs.advection_y {
            out.push(TimeSeparableTerm {
                time: s.time.clone(),
                space: term(c.x.product(a), c.y.product(b).derivative()),
            });
        }
    }
    out
}

fn ex42() -> Problem {
    let mut p = ex41();
    let exact = ex42_solution();
    p.id = ExampleId::Ex42;
    p.source = manufactured_source(&p.coefficients, &exact);
    p.initial = exact
        .iter()
        .map(|e| term(e.space.x.scaled(e.time.value(0.0)), e.space.y.clone()))
        .collect();
    p.exact = exact;
    p
}

fn ex43() -> Problem {
    let nu = 1e-3;
    let (adv_x, adv_y) = swirl(-1.0);
    let diffusion = || vec![term(Profile::constant(nu), Profile::constant(1.0))];
    let width = 1.0 / (2.0 * 0.15 * 0.15);
    Problem {
        id: ExampleId::Ex43,
        domain: (-1.0, 1.0),
        coefficients: CoefficientSet::new(diffusion(), diffusion(), adv_x, adv_y).expect("non-empty coefficients"),
        initial: two_gaussians(width),
        source: Vec::new(),
        exact: Vec::new(),
        equilibrium: None,
        conserve_mass: false,
    }
}

fn ex44() -> Problem {
    // s²(1 - s)² and its logarithmic-derivative companion 2s(1 - 3s + 2s²).
    let quartic = || Profile::polynomial(vec![0.0, 0.0, 1.0, -2.0, 1.0]);
    let drift = || Profile::polynomial(vec![0.0, 2.0, -6.0, 4.0]);
    let diffusion = || vec![term(quartic(), quartic())];
    let wave = || Profile::sine(2.0 * PI).abs();
    Problem {
        id: ExampleId::Ex44,
        domain: (0.0, 1.0),
        coefficients: CoefficientSet::new(
            diffusion(),
            diffusion(),
            vec![term(drift(), quartic())],
            vec![term(quartic(), drift())],
        )
        .expect("non-empty coefficients"),
        initial: vec![term(wave(), wave())],
        source: Vec::new(),
        exact: Vec::new(),
        equilibrium: Some(term(quartic(), quartic())),
        conserve_mass: true,
    }
}
