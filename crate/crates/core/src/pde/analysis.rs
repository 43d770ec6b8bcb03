//! Post-processing of field solutions: radial exponent fits and the
//! gradient/value threshold estimate.

use serde::Serialize;

use super::{FieldSolution, Terms};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r2: T,
    pub n_points: usize,
}

/// Value along the ray `θ` at radial node `i`, by 4-point Lagrange interpolation.
pub fn ray_value<T: Real>(sol: &FieldSolution<T>, i: usize, theta: T) -> T {
    let g = &sol.grid;
    let h = g.h_theta();
    let x = theta / h;
    let base = x.floor().to_usize().unwrap_or(0);
    let j0 = base.saturating_sub(1).min(g.n_theta - 4);
    let xs: Vec<T> = (0..4).map(|k| T::from_usize_lossy(j0 + k)).collect();
    (0..4).fold(T::zero(), |acc, k| {
        let mut w = T::one();
        for l in 0..4 {
            if l != k {
                w = w * (x - xs[l]) / (xs[k] - xs[l]);
            }
        }
        acc + w * sol.at(i, j0 + k)
    })
}

/// Least-squares slope of `ln u` against `ln r` along a ray, over radial
/// nodes inside `window`.
pub fn fit_exponent<T: Real>(sol: &FieldSolution<T>, ray_theta: T, window: (T, T)) -> Result<ExponentFit<T>> {
    let g = &sol.grid;
    let (lo, hi) = window;
    if !(ray_theta > T::zero() && ray_theta < T::PI()) {
        return Err(Error::domain(format!("ray angle {ray_theta} must lie strictly inside (0, π)")));
    }
    if !(lo >= g.r_min && hi <= g.r_max && lo < hi) {
        return Err(Error::domain(format!(
            "fit window [{lo}, {hi}] must be an interval inside [{}, {}]",
            g.r_min, g.r_max
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..g.n_r {
        let r = g.r(i);
        if r < lo || r > hi {
            continue;
        }
        let v = ray_value(sol, i, ray_theta);
        if !(v > T::zero()) {
            return Err(Error::Fit(format!("non-positive value {v} at r = {r} on the ray")));
        }
        xs.push(r.ln());
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(Error::Fit(format!("only {} radial nodes inside the window", xs.len())));
    }
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    Ok(ExponentFit { slope, intercept, r2, n_points: xs.len() })
}

/// [`fit_exponent`] on the ray `θ = π/2` with the window `[2 r_min, √(r_min r_max)]`.
pub fn fit_exponent_default<T: Real>(sol: &FieldSolution<T>) -> Result<ExponentFit<T>> {
    let g = &sol.grid;
    fit_exponent(sol, T::FRAC_PI_2(), (T::lit(2.0) * g.r_min, (g.r_min * g.r_max).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate<T> {
    /// Grid minimum of `|∇u|^q / u^p`.
    pub m_est: T,
    /// Node `(i, j)` where the minimum is attained.
    pub argmin: (usize, usize),
    pub x0: T,
    pub m_threshold: T,
    /// `X₀ + 1/(X₀^{(p-q)/(q-1)} M)`, equal to `m_threshold` in exact arithmetic.
    pub m_threshold_check: T,
    pub near_critical_nodes: usize,
    pub excluded_nodes: usize,
    pub warning: Option<String>,
}

/// Relative gradient `r|∇u|/u` below which a node counts as near-critical.
pub const NEAR_CRITICAL: f64 = 1e-3;

/// Minimum of `|∇u|^q/u^p` over interior nodes and the derived thresholds.
///
/// With `exclusion_radius > 0`, nodes within that distance of a
/// near-critical node are skipped.
pub fn estimate_m_threshold<T: Real>(
    sol: &FieldSolution<T>,
    params: &ProblemParams<T>,
    exclusion_radius: T,
) -> Result<ThresholdEstimate<T>> {
    if sol.terms != Terms::GRADIENT_ONLY {
        return Err(Error::domain("threshold estimate needs a gradient-only field"));
    }
    let (p, q) = (params.p(), params.q());
    if !(params.q_above_critical() && q < params.q_c()) {
        return Err(Error::domain(format!(
            "threshold estimate needs 2p/(p+1) = {} < q < (N+1)/N = {}, got q = {q}",
            params.q_star(),
            params.q_c()
        )));
    }
    if !(exclusion_radius >= T::zero()) {
        return Err(Error::domain("exclusion radius must be nonnegative"));
    }
    let g = &sol.grid;
    let two = T::lit(2.0);
    let (hs, ht) = (g.h_s(), g.h_theta());
    let mut nodes = Vec::new();
    for i in 1..g.n_r - 1 {
        let r = g.r(i);
        for j in 1..g.n_theta - 1 {
            let u = sol.at(i, j);
            let us = (sol.at(i + 1, j) - sol.at(i - 1, j)) / (two * hs);
            let ut = (sol.at(i, j + 1) - sol.at(i, j - 1)) / (two * ht);
            let rel = (us * us + ut * ut).sqrt();
            let grad = rel / r;
            nodes.push((i, j, r, u, grad, rel));
        }
    }
    let critical: Vec<(T, T)> = nodes
        .iter()
        .filter(|n| n.3 > T::zero() && n.5 < T::lit(NEAR_CRITICAL) * n.3)
        .map(|n| {
            let t = g.theta(n.1);
            (n.2 * t.cos(), n.2 * t.sin())
        })
        .collect();
    let mut best: Option<(T, usize, usize)> = None;
    let mut excluded = 0;
    for &(i, j, r, u, grad, _) in &nodes {
        if !(u > T::zero()) {
            continue;
        }
        if exclusion_radius > T::zero() && !critical.is_empty() {
            let t = g.theta(j);
            let (x, y) = (r * t.cos(), r * t.sin());
            let close = critical.iter().any(|&(cx, cy)| {
                let (dx, dy) = (x - cx, y - cy);
                (dx * dx + dy * dy).sqrt() <= exclusion_radius
            });
            if close {
                excluded += 1;
                continue;
            }
        }
        let ratio = grad.powf(q) / u.powf(p);
        if best.is_none_or(|b| ratio < b.0) {
            best = Some((ratio, i, j));
        }
    }
    let (m_est, bi, bj) = best.ok_or_else(|| Error::Fit("no admissible interior node".into()))?;
    let warning = if !critical.is_empty() && exclusion_radius == T::zero() {
        Some(format!("M_est may be spurious zero: {} near-critical nodes, no exclusion", critical.len()))
    } else if m_est == T::zero() {
        Some("M_est may be spurious zero".to_string())
    } else {
        None
    };
    let one = T::one();
    let x0 = ((p - q) / ((q - one) * m_est)).powf((q - one) / (p - one));
    let m_threshold = (p - one) / (p - q) * x0;
    let m_threshold_check = x0 + one / (x0.powf((p - q) / (q - one)) * m_est);
    Ok(ThresholdEstimate {
        m_est,
        argmin: (bi, bj),
        x0,
        m_threshold,
        m_threshold_check,
        near_critical_nodes: critical.len(),
        excluded_nodes: excluded,
        warning,
    })
}
