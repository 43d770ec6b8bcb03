use serde::Serialize;

use super::grid::PolarGrid;
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::profiles::{solve_profile_with, ProfileKind, ProfileOptions, ProfileSolution};
use crate::scalar::Real;

/// Data on the inner arc `r = r_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum InnerBoundary<T> {
    /// `r^{-γ} w(|θ - π/2|)` with `w` the half-circle profile of `kind`.
    SeparableProfile { kind: ProfileKind },
    /// Half-plane Poisson extension of `mass` spread over `|x₁| < width` on the flat boundary.
    MollifiedDirac { mass: T, width: T },
}

/// Data on the outer arc `r = r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OuterBoundary {
    Zero,
    /// Continues the inner data: the separable field or the Poisson extension.
    Separable,
}

/// The flat rows `θ ∈ {0, π}` always carry zero data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySpec<T> {
    pub inner: InnerBoundary<T>,
    pub outer: OuterBoundary,
}

/// Exact separable solution `r^{-γ} w(|θ - π/2|)` for `N = 2`.
#[derive(Debug, Clone)]
pub struct SeparableField<T> {
    pub gamma: T,
    pub profile: ProfileSolution<T>,
}

impl<T: Real> SeparableField<T> {
    pub fn new(kind: ProfileKind, params: &ProblemParams<T>) -> Result<Self> {
        let outcome = solve_profile_with(kind, params, &ProfileOptions::default())?;
        let profile = outcome
            .first()
            .cloned()
            .ok_or_else(|| Error::NoBracket(format!("no {kind} profile for the separable boundary data")))?;
        let gamma = match kind {
            ProfileKind::Chi => params.beta(),
            _ => params.alpha(),
        };
        Ok(SeparableField { gamma, profile })
    }

    pub fn angular(&self, theta: T) -> T {
        self.profile.eval((theta - T::FRAC_PI_2()).abs()).max(T::zero())
    }

    pub fn value(&self, r: T, theta: T) -> T {
        r.powf(-self.gamma) * self.angular(theta)
    }
}

/// Poisson extension of a normalized `C^∞` bump of total mass `mass`.
#[derive(Debug, Clone)]
pub struct PoissonBump<T> {
    /// Quadrature nodes and weights (density already folded in).
    nodes: Vec<(T, T)>,
}

const BUMP_NODES: usize = 400;

impl<T: Real> PoissonBump<T> {
    pub fn new(mass: T, width: T) -> Result<Self> {
        if !(mass > T::zero()) || !(width > T::zero()) {
            return Err(Error::domain(format!("mollified Dirac needs mass > 0 and width > 0, got {mass}, {width}")));
        }
        let n = BUMP_NODES;
        let h = T::lit(2.0) * width / T::from_usize_lossy(n);
        let raw: Vec<(T, T)> = (1..n)
            .map(|k| {
                let t = -width + h * T::from_usize_lossy(k);
                let z = t / width;
                (t, (-T::one() / (T::one() - z * z)).exp())
            })
            .collect();
        let total = raw.iter().fold(T::zero(), |a, &(_, v)| a + v) * h;
        let nodes = raw.into_iter().map(|(t, v)| (t, mass * v * h / total)).collect();
        Ok(PoissonBump { nodes })
    }

    pub fn value(&self, x1: T, x2: T) -> T {
        if x2 <= T::zero() {
            return T::zero();
        }
        let s = self.nodes.iter().fold(T::zero(), |a, &(t, w)| {
            let d = x1 - t;
            a + w * x2 / (d * d + x2 * x2)
        });
        s / T::PI()
    }

    pub fn polar(&self, r: T, theta: T) -> T {
        self.value(r * theta.cos(), r * theta.sin())
    }
}

impl<T: Real> BoundarySpec<T> {
    pub fn new(inner: InnerBoundary<T>, outer: OuterBoundary) -> Self {
        BoundarySpec { inner, outer }
    }

    /// Full field holding the Dirichlet data and zeros in the interior.
    pub fn evaluate(&self, g: &PolarGrid<T>, params: &ProblemParams<T>) -> Result<Vec<T>> {
        let eval: Box<dyn Fn(T, T) -> T> = match self.inner {
            InnerBoundary::SeparableProfile { kind } => {
                let field = SeparableField::new(kind, params)?;
                Box::new(move |r, t| field.value(r, t))
            }
            InnerBoundary::MollifiedDirac { mass, width } => {
                if !(width < g.r_min) {
                    return Err(Error::domain(format!(
                        "mollification width {width} must be below r_min = {}",
                        g.r_min
                    )));
                }
                let bump = PoissonBump::new(mass, width)?;
                Box::new(move |r, t| bump.polar(r, t))
            }
        };
        let mut u = vec![T::zero(); g.len()];
        let last = g.n_r - 1;
        for j in 1..g.n_theta - 1 {
            let t = g.theta(j);
            u[g.node(0, j)] = eval(g.r_min, t);
            if self.outer == OuterBoundary::Separable {
                u[g.node(last, j)] = eval(g.r_max, t);
            }
        }
        Ok(u)
    }
}
