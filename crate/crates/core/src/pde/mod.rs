//! Finite-difference solver for `-Δu + m|∇u|^q - u^p = 0` on a planar half-annulus.
//!
//! In log-polar coordinates `s = ln r` the equation multiplied by `r²` reads
//! `-(u_ss + u_θθ) + m r^{2-q} (u_s² + u_θ²)^{q/2} - σ r² u^p = 0`,
//! discretized with the 5-point stencil on a uniform `(s, θ)` grid. `σ` is
//! the continuation parameter on the source term.

mod analysis;
mod banded;
mod boundary;
mod grid;

use serde::Serialize;

pub use analysis::{ray_value, estimate_m_threshold, fit_exponent, fit_exponent_default, ExponentFit, ThresholdEstimate};
pub use banded::{BandLu, BandMatrix};
pub use boundary::{BoundarySpec, InnerBoundary, OuterBoundary, PoissonBump, SeparableField};
pub use grid::{PolarGrid, MIN_NODES};


use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::scalar::Real;

/// Which nonlinear terms are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Terms {
    pub absorption_q: bool,
    pub source_p: bool,
}

impl Terms {
    pub const HARMONIC: Terms = Terms { absorption_q: false, source_p: false };
    pub const GRADIENT_ONLY: Terms = Terms { absorption_q: true, source_p: false };
    pub const SOURCE_ONLY: Terms = Terms { absorption_q: false, source_p: true };
    pub const FULL: Terms = Terms { absorption_q: true, source_p: true };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverOptions<T> {
    /// Bound on the scaled residual `max |F| / (|u_ss| + |u_θθ| + |grad| + |src|)`.
    pub tol: T,
    pub max_newton: usize,
    pub continuation_steps: usize,
    /// Extra halvings of a continuation step after a failed Newton solve.
    pub max_step_splits: usize,
    pub damping_floor: T,
    /// Radial cells next to `r_min` where `u_s` is one-sided.
    pub upwind_cells: usize,
    pub initial: InitialIterate<T>,
}

/// Starting point of the Newton iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitialIterate<T> {
    /// Harmonic field, then the gradient term, then the source ramped from zero.
    Continuation,
    /// Geometric interpolation in `s = ln r` between the inner and outer arc
    /// data (linear when the outer data vanish), then Newton on the full problem.
    LogInterpolated,
    /// Full row-major field; boundary entries are overwritten by the data.
    Supplied(Vec<T>),
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::lit(1e-10).max(T::epsilon() * T::lit(1e3)),
            max_newton: 40,
            continuation_steps: 8,
            max_step_splits: 4,
            damping_floor: T::lit(2f64.powi(-20)),
            upwind_cells: 3,
            initial: InitialIterate::Continuation,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        SolverOptions { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSolution<T> {
    pub grid: PolarGrid<T>,
    pub params: ProblemParams<T>,
    pub terms: Terms,
    pub boundary: BoundarySpec<T>,
    /// Row-major values, `u[i * n_theta + j]` at `(r_i, θ_j)`.
    pub u: Vec<T>,
    /// Scaled residual before every Newton step, across all continuation stages.
    pub residual_history: Vec<T>,
    pub newton_iters: usize,
    /// Source coefficients visited by the continuation (empty without source).
    pub continuation: Vec<T>,
    pub final_residual: T,
}

impl<T: Real> FieldSolution<T> {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.u[self.grid.node(i, j)]
    }

    /// Wraps an analytic field sampled on the grid (flat rows forced to zero).
    pub fn from_fn(
        grid: PolarGrid<T>,
        params: ProblemParams<T>,
        terms: Terms,
        boundary: BoundarySpec<T>,
        f: impl Fn(T, T) -> T,
    ) -> Self {
        let mut u = vec![T::zero(); grid.len()];
        for i in 0..grid.n_r {
            for j in 1..grid.n_theta - 1 {
                u[grid.node(i, j)] = f(grid.r(i), grid.theta(j));
            }
        }
        let final_residual = scaled_residual(&grid, &coefficients(&params, terms, T::one()), &u, 3);
        FieldSolution {
            grid,
            params,
            terms,
            boundary,
            u,
            residual_history: Vec::new(),
            newton_iters: 0,
            continuation: Vec::new(),
            final_residual,
        }
    }

    /// Independent re-evaluation of the scaled discrete residual.
    pub fn residual_certificate(&self) -> T {
        let sigma = if self.terms.source_p { T::one() } else { T::zero() };
        scaled_residual(&self.grid, &coefficients(&self.params, self.terms, sigma), &self.u, 3)
    }

    /// Scaled residual of the continuous operator with fourth-order centered
    /// differences at nodes two cells away from every boundary.
    ///
    /// Measures discretization error rather than solver error.
    pub fn high_order_residual(&self) -> T {
        let g = &self.grid;
        let c = coefficients(&self.params, self.terms, if self.terms.source_p { T::one() } else { T::zero() });
        let (hs, ht) = (g.h_s(), g.h_theta());
        let d1 = |a: T, b: T, d: T, e: T, h: T| (a - T::lit(8.0) * b + T::lit(8.0) * d - e) / (T::lit(12.0) * h);
        let d2 = |a: T, b: T, m: T, d: T, e: T, h: T| {
            (-a + T::lit(16.0) * b - T::lit(30.0) * m + T::lit(16.0) * d - e) / (T::lit(12.0) * h * h)
        };
        let mut worst = T::zero();
        for i in 2..g.n_r - 2 {
            let r = g.r(i);
            for j in 2..g.n_theta - 2 {
                let at = |ii: usize, jj: usize| self.u[g.node(ii, jj)];
                let us = d1(at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j), hs);
                let ut = d1(at(i, j - 2), at(i, j - 1), at(i, j + 1), at(i, j + 2), ht);
                let uss = d2(at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j), hs);
                let utt = d2(at(i, j - 2), at(i, j - 1), at(i, j), at(i, j + 1), at(i, j + 2), ht);
                let grad = c.m * r.powf(T::lit(2.0) - c.q) * (us * us + ut * ut).powf(c.q * T::lit(0.5));
                let src = c.sigma * r * r * at(i, j).max(T::zero()).powf(c.p);
                let f = -uss - utt + grad - src;
                let scale = uss.abs() + utt.abs() + grad.abs() + src.abs() + T::min_positive_value();
                worst = worst.max(f.abs() / scale);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy)]
struct Coefficients<T> {
    m: T,
    q: T,
    sigma: T,
    p: T,
}

fn coefficients<T: Real>(params: &ProblemParams<T>, terms: Terms, sigma: T) -> Coefficients<T> {
    Coefficients {
        m: if terms.absorption_q { params.m() } else { T::zero() },
        q: params.q(),
        sigma: if terms.source_p { sigma } else { T::zero() },
        p: params.p(),
    }
}

/// Residual, per-node scale and (optionally) the Jacobian over interior unknowns.
fn assemble<T: Real>(
    g: &PolarGrid<T>,
    c: &Coefficients<T>,
    u: &[T],
    upwind_cells: usize,
    jacobian: bool,
) -> (Vec<T>, Vec<T>, Option<BandMatrix<T>>) {
    let nt = g.n_theta - 2;
    let n = g.n_unknowns();
    let (hs, ht) = (g.h_s(), g.h_theta());
    let (ihs2, iht2) = (T::one() / (hs * hs), T::one() / (ht * ht));
    let two = T::lit(2.0);
    let half_q = c.q * T::lit(0.5);
    let mut f = vec![T::zero(); n];
    let mut scale = vec![T::zero(); n];
    let mut jac = if jacobian { Some(BandMatrix::zeros(n, nt, nt)) } else { None };
    for i in 1..g.n_r - 1 {
        let r = g.r(i);
        let a = c.m * r.powf(two - c.q);
        let b = c.sigma * r * r;
        let upwind = i <= upwind_cells;
        for j in 1..g.n_theta - 1 {
            let k = g.unknown(i, j);
            let u0 = u[g.node(i, j)];
            let (ue, uw) = (u[g.node(i + 1, j)], u[g.node(i - 1, j)]);
            let (un, us) = (u[g.node(i, j + 1)], u[g.node(i, j - 1)]);
            let lap_s = (ue - two * u0 + uw) * ihs2;
            let lap_t = (un - two * u0 + us) * iht2;

            // D_s u and its partials with respect to (u0, ue, uw). The
            // second-order backward stencil also touches u[i-2]; that entry
            // is left out of the Jacobian to keep the band at n_theta - 2.
            let (ds, dds_0, dds_e, dds_w) = if upwind && i >= 2 {
                let uww = u[g.node(i - 2, j)];
                let ih2 = T::one() / (two * hs);
                ((T::lit(3.0) * u0 - T::lit(4.0) * uw + uww) * ih2, T::lit(3.0) * ih2, T::zero(), -T::lit(4.0) * ih2)
            } else if upwind {
                ((u0 - uw) / hs, T::one() / hs, T::zero(), -T::one() / hs)
            } else {
                ((ue - uw) / (two * hs), T::zero(), T::one() / (two * hs), -T::one() / (two * hs))
            };
            let dt = (un - us) / (two * ht);
            let g2 = ds * ds + dt * dt;
            let (grad, dgrad_ds, dgrad_dt) = if a != T::zero() && g2 > T::zero() {
                let pw = g2.powf(half_q - T::one());
                (a * pw * g2, a * c.q * pw * ds, a * c.q * pw * dt)
            } else {
                (T::zero(), T::zero(), T::zero())
            };
            let up = u0.max(T::zero());
            let (src, dsrc) = if b != T::zero() && up > T::zero() {
                let pw = up.powf(c.p - T::one());
                (b * pw * up, b * c.p * pw)
            } else {
                (T::zero(), T::zero())
            };
            f[k] = -lap_s - lap_t + grad - src;
            scale[k] = lap_s.abs() + lap_t.abs() + grad.abs() + src.abs();

            if let Some(m) = jac.as_mut() {
                let diag = two * ihs2 + two * iht2 + dgrad_ds * dds_0 - dsrc;
                m.add(k, k, diag);
                if i + 1 < g.n_r - 1 {
                    m.add(k, g.unknown(i + 1, j), -ihs2 + dgrad_ds * dds_e);
                }
                if i > 1 {
                    m.add(k, g.unknown(i - 1, j), -ihs2 + dgrad_ds * dds_w);
                }
                let ddt = dgrad_dt / (two * ht);
                if j + 1 < g.n_theta - 1 {
                    m.add(k, g.unknown(i, j + 1), -iht2 + ddt);
                }
                if j > 1 {
                    m.add(k, g.unknown(i, j - 1), -iht2 - ddt);
                }
            }
        }
    }
    (f, scale, jac)
}

fn scaled_max<T: Real>(f: &[T], scale: &[T]) -> T {
    f.iter()
        .zip(scale)
        .fold(T::zero(), |w, (&r, &s)| w.max(r.abs() / (s + T::min_positive_value())))
}

fn scaled_residual<T: Real>(g: &PolarGrid<T>, c: &Coefficients<T>, u: &[T], upwind_cells: usize) -> T {
    let (f, s, _) = assemble(g, c, u, upwind_cells, false);
    scaled_max(&f, &s)
}

fn l2<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
}

/// Damped Newton for fixed coefficients; `u` holds boundary values and the initial iterate.
fn newton<T: Real>(
    g: &PolarGrid<T>,
    c: &Coefficients<T>,
    u: &mut [T],
    opts: &SolverOptions<T>,
    history: &mut Vec<T>,
    iters: &mut usize,
    stage: &str,
) -> Result<T> {
    let (mut f, mut scale, _) = assemble(g, c, u, opts.upwind_cells, false);
    for _ in 0..opts.max_newton {
        let res = scaled_max(&f, &scale);
        history.push(res);
        if res <= opts.tol {
            return Ok(res);
        }
        let (_, _, jac) = assemble(g, c, u, opts.upwind_cells, true);
        let lu = jac.expect("jacobian requested").factor()?;
        let mut delta: Vec<T> = f.iter().map(|&x| -x).collect();
        lu.solve(&mut delta);
        *iters += 1;

        let norm0 = l2(&f);
        let mut lambda = T::one();
        let mut trial = u.to_vec();
        let mut last_negative: Option<(usize, usize)>;
        loop {
            for i in 1..g.n_r - 1 {
                for j in 1..g.n_theta - 1 {
                    let n = g.node(i, j);
                    trial[n] = u[n] + lambda * delta[g.unknown(i, j)];
                }
            }
            let negative = (1..g.n_r - 1)
                .flat_map(|i| (1..g.n_theta - 1).map(move |j| (i, j)))
                .find(|&(i, j)| trial[g.node(i, j)] < T::zero());
            if let Some(ij) = negative {
                last_negative = Some(ij);
            } else {
                let (ft, st, _) = assemble(g, c, &trial, opts.upwind_cells, false);
                let decrease = l2(&ft) <= norm0 * (T::one() - T::lit(1e-4) * lambda);
                if decrease || scaled_max(&ft, &st) <= opts.tol {
                    u.copy_from_slice(&trial);
                    f = ft;
                    scale = st;
                    break;
                }
                last_negative = None;
            }
            lambda = lambda * T::lit(0.5);
            if lambda < opts.damping_floor {
                return Err(match last_negative {
                    Some((i, j)) => Error::Positivity { i, j, stage: stage.to_string() },
                    None => Error::Divergence {
                        history: history.iter().map(|x| x.as_f64()).collect(),
                        last: res.as_f64(),
                    },
                });
            }
        }
    }
    let res = scaled_max(&f, &scale);
    history.push(res);
    if res <= opts.tol {
        Ok(res)
    } else {
        Err(Error::Divergence { history: history.iter().map(|x| x.as_f64()).collect(), last: res.as_f64() })
    }
}

/// Walks a coefficient upwards from `from` to `to`, halving steps after failures.
#[allow(clippy::too_many_arguments)]
fn continue_in<T: Real>(
    g: &PolarGrid<T>,
    make: impl Fn(T) -> Coefficients<T>,
    from: T,
    to: T,
    u: &mut Vec<T>,
    opts: &SolverOptions<T>,
    history: &mut Vec<T>,
    iters: &mut usize,
    visited: &mut Vec<T>,
    stage: &str,
) -> Result<T> {
    let steps = opts.continuation_steps.max(1);
    let base = (to - from) / T::from_usize_lossy(steps);
    let mut last = T::zero();
    let mut cur = from;
    for k in 1..=steps {
        let target = if k == steps { to } else { from + base * T::from_usize_lossy(k) };
        let mut step = target - cur;
        let mut splits = 0;
        while cur < target {
            let next = (cur + step).min(target);
            let saved = u.clone();
            match newton(g, &make(next), u, opts, history, iters, stage) {
                Ok(r) => {
                    last = r;
                    cur = next;
                    visited.push(next);
                }
                Err(e) => {
                    *u = saved;
                    if splits >= opts.max_step_splits {
                        return Err(e);
                    }
                    splits += 1;
                    step = step * T::lit(0.5);
                    log::debug!("{stage}: halving continuation step at {cur} (split {splits})");
                }
            }
        }
    }
    Ok(last)
}

fn log_interpolate<T: Real>(g: &PolarGrid<T>, u: &mut [T]) {
    let last = g.n_r - 1;
    for j in 1..g.n_theta - 1 {
        let (a, b) = (u[g.node(0, j)], u[g.node(last, j)]);
        for i in 1..last {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(last);
            u[g.node(i, j)] = if a > T::zero() && b > T::zero() {
                a.powf(T::one() - t) * b.powf(t)
            } else {
                a * (T::one() - t) + b * t
            };
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn continuation_path<T: Real>(
    g: &PolarGrid<T>,
    params: &ProblemParams<T>,
    terms: Terms,
    u: &mut Vec<T>,
    opts: &SolverOptions<T>,
    history: &mut Vec<T>,
    iters: &mut usize,
    visited: &mut Vec<T>,
) -> Result<T> {
    let harmonic = Coefficients { m: T::zero(), q: params.q(), sigma: T::zero(), p: params.p() };
    let mut last = newton(g, &harmonic, u, opts, history, iters, "harmonic")?;

    if terms.absorption_q && params.m() > T::zero() {
        let full = coefficients(params, Terms::GRADIENT_ONLY, T::zero());
        let saved = u.clone();
        match newton(g, &full, u, opts, history, iters, "gradient") {
            Ok(r) => last = r,
            Err(e) => {
                log::debug!("direct gradient solve failed ({e}); continuing in m");
                *u = saved;
                let mk = |m: T| Coefficients { m, ..full };
                let mut ms = Vec::new();
                last = continue_in(g, mk, T::zero(), params.m(), u, opts, history, iters, &mut ms, "gradient")?;
            }
        }
    }
    if terms.source_p {
        let base = coefficients(params, terms, T::zero());
        let mk = |sigma: T| Coefficients { sigma, ..base };
        last = continue_in(g, mk, T::zero(), T::one(), u, opts, history, iters, visited, "source")?;
    }
    Ok(last)
}

/// Solves the boundary value problem on the half-annulus.
///
/// With [`InitialIterate::Continuation`] the harmonic problem with the same
/// boundary data is solved first, the gradient term is then switched on
/// (with continuation in `m` if a direct Newton solve fails) and finally the
/// source is ramped up from zero. That path follows the minimal branch; the
/// other starting points let Newton reach other solutions.
pub fn solve_bvp<T: Real>(
    grid: PolarGrid<T>,
    params: ProblemParams<T>,
    terms: Terms,
    boundary: BoundarySpec<T>,
    opts: &SolverOptions<T>,
) -> Result<FieldSolution<T>> {
    if params.n() != 2 {
        return Err(Error::domain(format!("the field solver is planar (N = 2), got N = {}", params.n())));
    }
    let g = &grid;
    let data = boundary.evaluate(g, &params)?;
    let mut u = data;
    let mut history = Vec::new();
    let mut iters = 0;
    let mut visited = Vec::new();

    let last = match &opts.initial {
        InitialIterate::Continuation => {
            continuation_path(g, &params, terms, &mut u, opts, &mut history, &mut iters, &mut visited)?
        }
        InitialIterate::LogInterpolated => {
            log_interpolate(g, &mut u);
            let c = coefficients(&params, terms, T::one());
            newton(g, &c, &mut u, opts, &mut history, &mut iters, "direct")?
        }
        InitialIterate::Supplied(v) => {
            if v.len() != g.len() {
                return Err(Error::domain(format!("initial iterate has {} values, grid has {}", v.len(), g.len())));
            }
            for i in 1..g.n_r - 1 {
                for j in 1..g.n_theta - 1 {
                    u[g.node(i, j)] = v[g.node(i, j)].max(T::zero());
                }
            }
            let c = coefficients(&params, terms, T::one());
            newton(g, &c, &mut u, opts, &mut history, &mut iters, "direct")?
        }
    };
    if terms.source_p && visited.is_empty() {
        visited.push(T::one());
    }
    log::info!("field solve {}x{}: {} Newton steps, scaled residual {:e}", g.n_r, g.n_theta, iters, last);
    Ok(FieldSolution {
        grid,
        params,
        terms,
        boundary,
        u,
        residual_history: history,
        newton_iters: iters,
        continuation: visited,
        final_residual: last,
    })
}
