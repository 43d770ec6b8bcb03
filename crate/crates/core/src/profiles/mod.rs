//! Axisymmetric profiles on the upper half-sphere.
//!
//! Four reductions are supported, all written as `Δ'w = G(w, w')` with the
//! axisymmetric Laplace-Beltrami operator `Δ'w = w'' + (N-2) cot(θ) w'`,
//! zero Dirichlet data on the equator and regularity at the pole.

mod shooting;

use serde::Serialize;

pub use shooting::{shoot, ShootOutcome, Trajectory, MIN_STEPS, POLE_OFFSET};

use crate::constants::phi_eval;
use crate::error::{Error, Result};
use crate::fd::fornberg_weights;
use crate::params::ProblemParams;
use crate::roots::bisect_bracket;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProfileKind {
    /// Source only: `α(N-2-α)w - w^p`.
    Psi,
    /// Source and gradient absorption at the balanced exponent `2p/(p+1)`.
    Omega,
    /// Gradient absorption only, at the balanced exponent.
    Eta,
    /// Gradient absorption with exponent `q`, scaled by `β`.
    Chi,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 4] = [ProfileKind::Psi, ProfileKind::Omega, ProfileKind::Eta, ProfileKind::Chi];

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Psi => "PSI",
            ProfileKind::Omega => "OMEGA",
            ProfileKind::Eta => "ETA",
            ProfileKind::Chi => "CHI",
        }
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PSI" => Ok(ProfileKind::Psi),
            "OMEGA" => Ok(ProfileKind::Omega),
            "ETA" => Ok(ProfileKind::Eta),
            "CHI" => Ok(ProfileKind::Chi),
            _ => Err(Error::Format(format!("unknown profile kind '{s}' (PSI, OMEGA, ETA, CHI)"))),
        }
    }
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Right-hand side `G(w, w')` of `Δ'w = G`.
#[inline]
pub fn laplace_beltrami_rhs<T: Real>(kind: ProfileKind, params: &ProblemParams<T>, w: T, w1: T) -> T {
    let p = params.p();
    let m = params.m();
    let wp = w.max(T::zero());
    match kind {
        ProfileKind::Psi => params.alpha_shift() * w - wp.powf(p),
        ProfileKind::Omega => {
            let a = params.alpha();
            let grad = (a * a * w * w + w1 * w1).powf(p / (p + T::one()));
            params.alpha_shift() * w + m * grad - wp.powf(p)
        }
        ProfileKind::Eta => {
            let a = params.alpha();
            let grad = (a * a * w * w + w1 * w1).powf(p / (p + T::one()));
            params.alpha_shift() * w + m * grad
        }
        ProfileKind::Chi => {
            let b = params.beta();
            let n2 = params.dim() - T::lit(2.0);
            let grad = (b * b * w * w + w1 * w1).powf(params.q() * T::lit(0.5));
            -b * (b - n2) * w + m * grad
        }
    }
}

/// Residual of the profile equation in the form `-Δ'w + (lower order terms)`.
pub fn ode_residual<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    theta: T,
    w: T,
    w1: T,
    w2: T,
) -> Result<T> {
    if theta == T::zero() {
        return Err(Error::Pole(
            "cot(θ) is singular at the pole; use the even expansion or pole_residual".into(),
        ));
    }
    if !(theta > T::zero()) || theta > T::FRAC_PI_2() * (T::one() + T::epsilon()) {
        return Err(Error::domain(format!("colatitude {theta} outside (0, π/2]")));
    }
    if w < T::zero() {
        return Err(Error::domain(format!("profile value {w} is negative")));
    }
    let lap = w2 + (params.dim() - T::lit(2.0)) * w1 / theta.tan();
    Ok(laplace_beltrami_rhs(kind, params, w, w1) - lap)
}

/// Residual at the pole, where `Δ'w → (N-1) w''` for an even profile.
pub fn pole_residual<T: Real>(kind: ProfileKind, params: &ProblemParams<T>, w: T, w2: T) -> T {
    laplace_beltrami_rhs(kind, params, w, T::zero()) - (params.dim() - T::one()) * w2
}

/// `φ₁` as a function of colatitude: the sine of the latitude.
pub fn phi1<T: Real>(colat: T) -> T {
    (T::FRAC_PI_2() - colat).sin()
}

/// Maximum-principle bound on ETA profiles, `None` unless `α + 2 - N > 0`.
pub fn eta_sup_bound<T: Real>(params: &ProblemParams<T>) -> Option<T> {
    let a = params.alpha();
    let gap = a + T::lit(2.0) - params.dim();
    if !(gap > T::zero()) || !(params.m() > T::zero()) {
        return None;
    }
    let p = params.p();
    Some((gap / params.m()).powf((p + T::one()) / (p - T::one())) / a)
}

/// Checks the parameter window each kind is posed in.
pub fn check_window<T: Real>(kind: ProfileKind, params: &ProblemParams<T>) -> Result<()> {
    let p = params.p();
    let m = params.m();
    match kind {
        ProfileKind::Psi => Ok(()),
        ProfileKind::Omega | ProfileKind::Eta => {
            if !(p < params.p_c()) {
                return Err(Error::domain(format!(
                    "{kind} profiles need 1 < p < (N+1)/(N-1) = {}, got p = {p}",
                    params.p_c()
                )));
            }
            if !(m > T::zero()) {
                return Err(Error::domain(format!("{kind} profiles need m > 0, got m = {m}")));
            }
            Ok(())
        }
        ProfileKind::Chi => {
            if !(params.q() < params.q_c()) {
                return Err(Error::domain(format!(
                    "CHI profiles need 1 < q < (N+1)/N = {}, got q = {}",
                    params.q_c(),
                    params.q()
                )));
            }
            if !(m > T::zero()) {
                return Err(Error::domain(format!("CHI profiles need m > 0, got m = {m}")));
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileOptions<T> {
    pub n_steps: usize,
    /// Bound on `|w(π/2)|`.
    pub tol: T,
    /// Bound on the relative residual `sup|R| / sup|w|` over interior nodes.
    pub tol_residual: T,
    pub sweep_samples: usize,
    pub a0_min: T,
    pub a0_max: T,
    /// Retry once at `2 n_steps` before declaring no solution.
    pub refine_retry: bool,
}

impl<T: Real> Default for ProfileOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        ProfileOptions {
            n_steps: 512,
            tol: T::lit(1e-8).max(eps * T::lit(1e3)),
            tol_residual: T::lit(1e-6).max(eps * T::lit(1e6)),
            sweep_samples: 200,
            a0_min: T::lit(1e-8),
            a0_max: T::lit(1e8),
            refine_retry: true,
        }
    }
}

impl<T: Real> ProfileOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        ProfileOptions { tol, ..Self::default() }
    }
}

/// A validated positive profile on `[0, π/2]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSolution<T> {
    pub kind: ProfileKind,
    pub params: ProblemParams<T>,
    pub theta_grid: Vec<T>,
    pub values: Vec<T>,
    pub derivatives: Vec<T>,
    /// Finite-difference residual at each node (pole form at index 0).
    pub residuals: Vec<T>,
    pub pole_value: T,
    pub pole_derivative: T,
    pub residual_sup: T,
    pub endpoint_value: T,
}

impl<T: Real> ProfileSolution<T> {
    pub fn n_steps(&self) -> usize {
        self.theta_grid.len() - 1
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    fn cell(&self, colat: T) -> (usize, T, T) {
        let n = self.n_steps();
        let h = self.theta_grid[1] - self.theta_grid[0];
        let c = colat.max(T::zero()).min(T::FRAC_PI_2());
        let i = (c / h).floor().to_usize().unwrap_or(0).min(n - 1);
        (i, (c - self.theta_grid[i]) / h, h)
    }

    /// Derivative of the cubic Hermite interpolant.
    pub fn eval_derivative(&self, colat: T) -> T {
        let (i, t, h) = self.cell(colat);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivatives[i] * h, self.derivatives[i + 1] * h);
        let (two, three, four, six) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
        let t2 = t * t;
        ((six * t2 - six * t) * y0
            + (three * t2 - four * t + T::one()) * d0
            + (-six * t2 + six * t) * y1
            + (three * t2 - two * t) * d1)
            / h
    }

    /// Cubic Hermite interpolation in colatitude.
    pub fn eval(&self, colat: T) -> T {
        let n = self.n_steps();
        let h = self.theta_grid[1] - self.theta_grid[0];
        let c = colat.max(T::zero()).min(T::FRAC_PI_2());
        let mut i = (c / h).floor().to_usize().unwrap_or(0);
        if i >= n {
            i = n - 1;
        }
        let t = (c - self.theta_grid[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivatives[i] * h, self.derivatives[i + 1] * h);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let t2 = t * t;
        let t3 = t2 * t;
        (two * t3 - three * t2 + T::one()) * y0
            + (t3 - two * t2 + t) * d0
            + (-two * t3 + three * t2) * y1
            + (t3 - t2) * d1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileOutcome<T> {
    /// All validated solutions, sorted by pole value.
    Found(Vec<ProfileSolution<T>>),
    /// No bracket survived at any of the listed resolutions.
    NoSolution { resolutions: Vec<usize> },
}

impl<T: Real> ProfileOutcome<T> {
    pub fn solutions(&self) -> &[ProfileSolution<T>] {
        match self {
            ProfileOutcome::Found(v) => v,
            ProfileOutcome::NoSolution { .. } => &[],
        }
    }

    pub fn first(&self) -> Option<&ProfileSolution<T>> {
        self.solutions().first()
    }

    pub fn is_found(&self) -> bool {
        !self.solutions().is_empty()
    }
}

/// Finite-difference residuals on a uniform colatitude grid.
///
/// Returns the per-node residual and the relative sup over interior nodes.
pub fn residual_certificate<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    theta: &[T],
    values: &[T],
) -> (Vec<T>, T) {
    let n = values.len() - 1;
    let h = theta[1] - theta[0];
    let offsets = |lo: i64| -> Vec<T> { (lo..lo + 5).map(|k| T::lit(k as f64) * h).collect() };
    let centered = fornberg_weights(T::zero(), &offsets(-2), 2);
    let near_end = fornberg_weights(T::zero(), &offsets(-3), 2);
    let at_end = fornberg_weights(T::zero(), &offsets(-4), 2);

    // Even reflection through the pole.
    let sample = |k: i64| -> T { values[k.unsigned_abs() as usize] };
    let apply = |w: &[T], i: usize, lo: i64| -> T {
        w.iter().enumerate().fold(T::zero(), |acc, (k, &c)| acc + c * sample(i as i64 + lo + k as i64))
    };

    let mut res = Vec::with_capacity(n + 1);
    let mut sup_r = T::zero();
    let sup_w = values.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    for i in 0..=n {
        let (weights, lo) = if i + 2 <= n {
            (&centered, -2)
        } else if i + 1 == n {
            (&near_end, -3)
        } else {
            (&at_end, -4)
        };
        let w1 = apply(&weights[1], i, lo);
        let w2 = apply(&weights[2], i, lo);
        let r = if i == 0 {
            pole_residual(kind, params, values[0], w2)
        } else {
            let w = values[i].max(T::zero());
            ode_residual(kind, params, theta[i], w, w1, w2).unwrap_or(T::nan())
        };
        if i > 0 && i < n {
            sup_r = sup_r.max(r.abs());
        }
        res.push(r);
    }
    let scale = if sup_w > T::zero() { sup_w } else { T::one() };
    (res, sup_r / scale)
}

fn sweep_grid<T: Real>(opts: &ProfileOptions<T>) -> Vec<T> {
    let k = opts.sweep_samples.max(2);
    let lo = opts.a0_min.ln();
    let hi = opts.a0_max.ln();
    (0..k)
        .map(|i| (lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(k - 1)).exp())
        .collect()
}

fn side<T: Real>(kind: ProfileKind, params: &ProblemParams<T>, a0: T, n: usize) -> bool {
    shoot(kind, params, a0, n).map(|o| o.is_positive_side()).unwrap_or(false)
}

fn validate<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    a0: T,
    opts: &ProfileOptions<T>,
    n: usize,
) -> Option<ProfileSolution<T>> {
    let out = shoot(kind, params, a0, n).ok()?;
    if out.hit_zero_early || out.blew_up || out.trajectory.values.len() != n + 1 {
        return None;
    }
    let Trajectory { mut theta, values, derivatives } = out.trajectory;
    theta[n] = T::FRAC_PI_2();
    if !(out.endpoint.abs() <= opts.tol) {
        return None;
    }
    if values[1..n].iter().any(|&v| !(v > T::zero())) {
        return None;
    }
    let (residuals, residual_sup) = residual_certificate(kind, params, &theta, &values);
    if !(residual_sup <= opts.tol_residual) {
        log::debug!("{kind}: a0 = {a0:e} rejected, relative residual {residual_sup:e}");
        return None;
    }
    Some(ProfileSolution {
        kind,
        params: *params,
        theta_grid: theta,
        values,
        derivatives,
        residuals,
        pole_value: a0,
        pole_derivative: T::zero(),
        residual_sup,
        endpoint_value: out.endpoint,
    })
}

/// Why a bracketed candidate was rejected.
enum Rejection {
    Shape,
    Residual,
}

fn validate_or_reason<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    a0: T,
    opts: &ProfileOptions<T>,
    n: usize,
) -> std::result::Result<ProfileSolution<T>, Rejection> {
    match validate(kind, params, a0, opts, n) {
        Some(s) => Ok(s),
        None => {
            // Distinguish a resolution problem from a wrong candidate.
            let shape_ok = shoot(kind, params, a0, n).is_ok_and(|o| {
                !o.hit_zero_early && !o.blew_up && o.endpoint.abs() <= opts.tol
            });
            Err(if shape_ok { Rejection::Residual } else { Rejection::Shape })
        }
    }
}

/// Bisects one bracket, refining the grid up to [`MAX_REFINEMENTS`] times
/// when only the residual certificate fails.
fn solve_bracket<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    opts: &ProfileOptions<T>,
    lo: T,
    hi: T,
    n: usize,
) -> Option<ProfileSolution<T>> {
    let mut n_try = n;
    for _ in 0..=MAX_REFINEMENTS {
        let lo_pos = side(kind, params, lo, n_try);
        if lo_pos == side(kind, params, hi, n_try) {
            return None;
        }
        let f = |a: T| if side(kind, params, a, n_try) { T::one() } else { -T::one() };
        let (a, b) = bisect_bracket(f, lo, hi, T::zero());
        // Keep the endpoint on the positive side: it is the one that reached π/2.
        let a0 = if lo_pos { a } else { b };
        match validate_or_reason(kind, params, a0, opts, n_try) {
            Ok(sol) => return Some(sol),
            Err(Rejection::Shape) => return None,
            Err(Rejection::Residual) => {
                log::debug!("{kind}: a0 = {a0:e} needs a finer grid than {n_try}");
                n_try *= 2;
            }
        }
    }
    None
}

/// Number of grid doublings tried on a bracket whose residual is too large.
pub const MAX_REFINEMENTS: usize = 3;

fn solve_at<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    opts: &ProfileOptions<T>,
    n: usize,
) -> Vec<ProfileSolution<T>> {
    let grid = sweep_grid(opts);
    let signs: Vec<bool> = grid.iter().map(|&a| side(kind, params, a, n)).collect();
    let mut found: Vec<ProfileSolution<T>> = Vec::new();
    for k in 0..grid.len() - 1 {
        if signs[k] == signs[k + 1] {
            continue;
        }
        log::debug!("{kind}: sign change on [{:e}, {:e}]", grid[k], grid[k + 1]);
        if let Some(sol) = solve_bracket(kind, params, opts, grid[k], grid[k + 1], n) {
            let a0 = sol.pole_value;
            let dup = found
                .iter()
                .any(|s| (s.pole_value - a0).abs() <= T::lit(1e-6) * a0.abs().max(s.pole_value.abs()));
            if !dup {
                found.push(sol);
            }
        }
    }
    found.sort_by(|a, b| a.pole_value.partial_cmp(&b.pole_value).expect("finite pole values"));
    found
}

/// Shooting solve with the default options and the given endpoint tolerance.
pub fn solve_profile<T: Real>(kind: ProfileKind, params: &ProblemParams<T>, tol: T) -> Result<ProfileOutcome<T>> {
    solve_profile_with(kind, params, &ProfileOptions::with_tol(tol))
}

pub fn solve_profile_with<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    opts: &ProfileOptions<T>,
) -> Result<ProfileOutcome<T>> {
    check_window(kind, params)?;
    if opts.n_steps < MIN_STEPS {
        return Err(Error::domain(format!("n_steps must be at least {MIN_STEPS}")));
    }
    if !(opts.a0_min > T::zero()) || !(opts.a0_max > opts.a0_min) {
        return Err(Error::domain("sweep interval must satisfy 0 < a0_min < a0_max"));
    }
    let mut resolutions = vec![opts.n_steps];
    let mut found = solve_at(kind, params, opts, opts.n_steps);
    if found.is_empty() && opts.refine_retry {
        resolutions.push(2 * opts.n_steps);
        found = solve_at(kind, params, opts, 2 * opts.n_steps);
    }
    if found.is_empty() {
        return Ok(ProfileOutcome::NoSolution { resolutions });
    }
    if kind == ProfileKind::Eta {
        if let Some(bound) = eta_sup_bound(params) {
            for s in &found {
                let mx = s.max_value();
                if mx > bound * (T::one() + T::lit(1e-9).max(T::epsilon() * T::lit(64.0))) {
                    log::warn!("ETA maximum {mx:e} exceeds the maximum-principle bound {bound:e}");
                }
            }
        }
    }
    Ok(ProfileOutcome::Found(found))
}

/// `Φ(max ω)` for an OMEGA profile.
pub fn omega_max_phi<T: Real>(sol: &ProfileSolution<T>) -> Result<T> {
    phi_eval(sol.max_value(), &sol.params)
}

/// Sup-norm mismatch between the profile at `m` and the rescaled profile at `m2`.
pub fn profile_scaling_check<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    m2: T,
    tol: T,
) -> Result<T> {
    scaling_check_with(kind, params, m2, &ProfileOptions::with_tol(tol))
}

pub fn scaling_check_with<T: Real>(
    kind: ProfileKind,
    params: &ProblemParams<T>,
    m2: T,
    opts: &ProfileOptions<T>,
) -> Result<T> {
    let exponent = match kind {
        ProfileKind::Chi => T::one() / (params.q() - T::one()),
        ProfileKind::Eta => (params.p() + T::one()) / (params.p() - T::one()),
        _ => {
            return Err(Error::domain(format!("no scaling law is available for {kind} profiles")));
        }
    };
    let other = params.with_m(m2)?;
    check_window(kind, params)?;
    check_window(kind, &other)?;
    let a = solve_profile_with(kind, params, opts)?;
    if params.m() == m2 {
        return match a.first() {
            Some(_) => Ok(T::zero()),
            None => Err(Error::NoBracket(format!("{kind} profile at m = {m2} not found"))),
        };
    }
    let b = solve_profile_with(kind, &other, opts)?;
    let (Some(a), Some(b)) = (a.first(), b.first()) else {
        return Err(Error::NoBracket(format!("{kind} profile not found at m = {} or m = {m2}", params.m())));
    };
    let factor = (m2 / params.m()).powf(exponent);
    let n = a.n_steps().min(b.n_steps());
    let h = T::FRAC_PI_2() / T::from_usize_lossy(n);
    let mut sup = T::zero();
    for i in 0..=n {
        let t = h * T::from_usize_lossy(i);
        sup = sup.max((a.eval(t) - factor * b.eval(t)).abs());
    }
    Ok(sup)
}
