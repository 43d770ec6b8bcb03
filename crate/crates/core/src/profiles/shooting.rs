//! Fixed-step RK4 shooting from the pole of the half-sphere.
//!
//! In the colatitude `θ` measured from the pole, an axisymmetric profile
//! satisfies `w'' + (N-2) cot(θ) w' = G(w, w')` with `w(0) = a₀`,
//! `w'(0) = 0`. The `0·∞` at the pole is removed by starting at
//! [`POLE_OFFSET`] from the even expansion `w ≈ a₀ + c₂θ²`, where
//! `2(N-1) c₂ = G(a₀, 0)`.

use serde::Serialize;

use super::{laplace_beltrami_rhs, ProfileKind};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::scalar::Real;

/// Colatitude at which integration starts.
pub const POLE_OFFSET: f64 = 1e-6;

/// Smallest accepted number of steps on `[0, π/2]`.
pub const MIN_STEPS: usize = 64;

/// Nodal values of one integration; nodes are `i·h`, `h = (π/2)/n_steps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub theta: Vec<T>,
    pub values: Vec<T>,
    pub derivatives: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: crate::scalar::Real"))]
pub struct ShootOutcome<T> {
    /// `w(π/2)`; `+∞` after blow-up; the (negative) first value past zero if
    /// the trajectory left the positive cone early.
    #[serde(serialize_with = "crate::scalar::serialize_real")]
    pub endpoint: T,
    pub hit_zero_early: bool,
    pub blew_up: bool,
    /// Last node reached before the run stopped.
    pub stopped_at: T,
    pub trajectory: Trajectory<T>,
}

impl<T: Real> ShootOutcome<T> {
    /// Positive when the run reached the equator without leaving the
    /// positive cone (or blew up upwards), negative when it crossed zero first.
    pub fn is_positive_side(&self) -> bool {
        !self.hit_zero_early
    }
}

#[inline]
fn rhs<T: Real>(kind: ProfileKind, params: &ProblemParams<T>, theta: T, w: T, w1: T) -> (T, T) {
    let g = laplace_beltrami_rhs(kind, params, w, w1);
    let cot_term = (params.dim() - T::lit(2.0)) * w1 / theta.tan();
    (w1, g - cot_term)
}

fn rk4_step<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    theta: T,
    h: T,
    (w, w1): (T, T),
) -> (T, T) {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let k1 = rhs(kind, params, theta, w, w1);
    let k2 = rhs(kind, params, theta + half * h, w + half * h * k1.0, w1 + half * h * k1.1);
    let k3 = rhs(kind, params, theta + half * h, w + half * h * k2.0, w1 + half * h * k2.1);
    let k4 = rhs(kind, params, theta + h, w + h * k3.0, w1 + h * k3.1);
    (
        w + h / six * (k1.0 + two * k2.0 + two * k3.0 + k4.0),
        w1 + h / six * (k1.1 + two * k2.1 + two * k3.1 + k4.1),
    )
}

/// Integrates the pole initial value problem with pole value `a0`.
pub fn shoot<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    a0: T,
    n_steps: usize,
) -> Result<ShootOutcome<T>> {
    if n_steps < MIN_STEPS {
        return Err(Error::domain(format!("shooting needs at least {MIN_STEPS} steps, got {n_steps}")));
    }
    if !(a0 >= T::zero()) || !a0.is_finite() {
        return Err(Error::domain(format!("pole value a0 = {a0} must be finite and nonnegative")));
    }
    let h = T::FRAC_PI_2() / T::from_usize_lossy(n_steps);
    let mut traj = Trajectory {
        theta: Vec::with_capacity(n_steps + 1),
        values: Vec::with_capacity(n_steps + 1),
        derivatives: Vec::with_capacity(n_steps + 1),
    };
    traj.theta.push(T::zero());
    traj.values.push(a0);
    traj.derivatives.push(T::zero());

    if a0 == T::zero() {
        for i in 1..=n_steps {
            traj.theta.push(h * T::from_usize_lossy(i));
            traj.values.push(T::zero());
            traj.derivatives.push(T::zero());
        }
        return Ok(ShootOutcome {
            endpoint: T::zero(),
            hit_zero_early: false,
            blew_up: false,
            stopped_at: T::FRAC_PI_2(),
            trajectory: traj,
        });
    }

    let guard = T::max_value().sqrt();
    let theta_s = T::lit(POLE_OFFSET).min(h * T::lit(0.5));
    let c2 = laplace_beltrami_rhs(kind, params, a0, T::zero())
        / (T::lit(2.0) * (params.dim() - T::one()));
    let mut state = (a0 + c2 * theta_s * theta_s, T::lit(2.0) * c2 * theta_s);
    let mut theta = theta_s;
    let mut step = h - theta_s;

    for i in 1..=n_steps {
        state = rk4_step(kind, params, theta, step, state);
        theta = h * T::from_usize_lossy(i);
        step = h;
        let (w, w1) = state;
        if !w.is_finite() || !w1.is_finite() || w.abs() > guard || w1.abs() > guard {
            // NaN only arises from overflowing powers on the way up.
            return Ok(ShootOutcome {
                endpoint: T::infinity(),
                hit_zero_early: false,
                blew_up: true,
                stopped_at: theta,
                trajectory: traj,
            });
        }
        if w < T::zero() && i < n_steps {
            traj.theta.push(theta);
            traj.values.push(w);
            traj.derivatives.push(w1);
            return Ok(ShootOutcome {
                endpoint: w,
                hit_zero_early: true,
                blew_up: false,
                stopped_at: theta,
                trajectory: traj,
            });
        }
        traj.theta.push(theta);
        traj.values.push(w);
        traj.derivatives.push(w1);
    }
    let endpoint = *traj.values.last().expect("nonempty trajectory");
    Ok(ShootOutcome {
        endpoint,
        hit_zero_early: endpoint < T::zero(),
        blew_up: false,
        stopped_at: T::FRAC_PI_2(),
        trajectory: traj,
    })
}
