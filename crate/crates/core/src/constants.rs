//! Closed-form constants of the problem, the algebraic function Φ whose
//! positive roots are the constant full-sphere profiles, and the
//! nonexistence threshold `m_p` for half-sphere profiles.
//!
//! Φ is handled through the substitution `Y = X^{(p-1)/(p+1)}`, which turns it
//! into `Φ̃(Y) = Y^{p+1} - m α^{2p/(p+1)} Y - α(N-2-α)`. For `m > 0`, `Φ̃`
//! decreases on `[0, Y₀)` and increases afterwards, so its root structure is
//! decided by the signs of `Φ̃(0)` and `Φ̃(Y₀)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::roots::bisect;
use crate::scalar::Real;

/// Half-width of the band `|m - m*|` inside which the two roots of Φ are
/// reported as a single tangential root.
pub const TANGENCY_BAND: f64 = 1e-8;

/// Relative agreement required between the two printed expressions for `m_p`.
pub const M_P_CONSISTENCY_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: crate::scalar::Real"))]
pub struct CriticalExponents<T> {
    pub p_c: T,
    pub q_c: T,
    #[serde(serialize_with = "crate::scalar::serialize_real")]
    pub p_serrin: T,
    #[serde(serialize_with = "crate::scalar::serialize_real")]
    pub p_sobolev: T,
}

pub fn critical_exponents<T: Real>(n: u32) -> Result<CriticalExponents<T>> {
    if n < 2 {
        return Err(Error::domain(format!("dimension N = {n} must be at least 2")));
    }
    let nn = T::from_u32(n).expect("dimension fits scalar");
    let one = T::one();
    let two = T::lit(2.0);
    let (p_serrin, p_sobolev) = if n == 2 {
        (T::infinity(), T::infinity())
    } else {
        (nn / (nn - two), (nn + two) / (nn - two))
    };
    Ok(CriticalExponents {
        p_c: (nn + one) / (nn - one),
        q_c: (nn + one) / nn,
        p_serrin,
        p_sobolev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularExponents<T> {
    pub alpha: T,
    pub beta: T,
    pub q_star: T,
}

pub fn singular_exponents<T: Real>(p: T, q: T) -> Result<SingularExponents<T>> {
    if !(p > T::one()) {
        return Err(Error::domain(format!("source exponent p = {p} must satisfy p > 1")));
    }
    if !(q > T::one() && q < T::lit(2.0)) {
        return Err(Error::domain(format!("gradient exponent q = {q} must lie in (1, 2)")));
    }
    let two = T::lit(2.0);
    Ok(SingularExponents {
        alpha: two / (p - T::one()),
        beta: (two - q) / (q - T::one()),
        q_star: two * p / (p + T::one()),
    })
}

/// `m* = (p+1) ((N - p(N-2)) / (2p))^{p/(p+1)}`, defined for `1 < p < N/(N-2)`.
pub fn m_star<T: Real>(n: u32, p: T) -> Result<T> {
    let ce = critical_exponents::<T>(n)?;
    if !(p > T::one()) {
        return Err(Error::domain(format!("source exponent p = {p} must satisfy p > 1")));
    }
    if p >= ce.p_serrin {
        return Err(Error::domain(format!(
            "m* undefined in Serrin-supercritical range: p = {p} >= N/(N-2) = {}",
            ce.p_serrin
        )));
    }
    let nn = T::from_u32(n).expect("dimension fits scalar");
    let two = T::lit(2.0);
    let base = (nn - p * (nn - two)) / (two * p);
    Ok((p + T::one()) * base.powf(p / (p + T::one())))
}

/// Φ(X) for `X ≥ 0`, with `X^{(p-1)/(p+1)}` continued by zero at the origin.
pub fn phi_eval<T: Real>(x: T, params: &ProblemParams<T>) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::domain(format!("Φ is evaluated on X >= 0, got {x}")));
    }
    let p = params.p();
    let one = T::one();
    let middle = if x == T::zero() {
        T::zero()
    } else {
        params.m() * params.alpha().powf(params.q_star()) * x.powf((p - one) / (p + one))
    };
    Ok(x.powf(p - one) - middle - params.alpha_shift())
}

/// Φ̃(Y) = Y^{p+1} - m α^{2p/(p+1)} Y - α(N-2-α).
pub fn phi_tilde<T: Real>(y: T, params: &ProblemParams<T>) -> T {
    let p = params.p();
    y.powf(p + T::one()) - params.m() * params.alpha().powf(params.q_star()) * y - params.alpha_shift()
}

/// Unique minimizer `Y₀ = (m/(p+1))^{1/p} α^{2/(p+1)}` of Φ̃ on `[0, ∞)`.
pub fn phi_tilde_minimizer<T: Real>(params: &ProblemParams<T>) -> Result<T> {
    if !(params.m() > T::zero()) {
        return Err(Error::domain("the root structure of Φ requires m > 0"));
    }
    let p = params.p();
    let one = T::one();
    Ok((params.m() / (p + one)).powf(one / p) * params.alpha().powf(T::lit(2.0) / (p + one)))
}

/// Maps a root of Φ̃ back to the corresponding root of Φ.
fn y_to_x<T: Real>(y: T, p: T) -> T {
    y.powf((p + T::one()) / (p - T::one()))
}

/// How the positive roots of Φ are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStructure {
    /// `p ≥ N/(N-2)`: exactly one positive root.
    Single,
    /// `p < N/(N-2)`, `m > m*`: two roots `X₁ < X₂`.
    Pair,
    /// `|m - m*|` within the tangency band: one double root.
    Tangential,
    /// `p < N/(N-2)`, `m < m*`: no positive root.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiRoots<T> {
    pub structure: RootStructure,
    /// Positive roots of Φ, ascending.
    pub roots: Vec<T>,
    pub y0: T,
}

/// Positive roots of Φ, sorted ascending.
pub fn phi_roots<T: Real>(params: &ProblemParams<T>) -> Result<Vec<T>> {
    phi_root_structure(params).map(|r| r.roots)
}

/// Positive roots of Φ together with the branch of the case analysis that produced them.
pub fn phi_root_structure<T: Real>(params: &ProblemParams<T>) -> Result<PhiRoots<T>> {
    let y0 = phi_tilde_minimizer(params)?;
    let p = params.p();
    let f = |y: T| phi_tilde(y, params);

    let upper_bracket = |from: T| {
        let mut hi = from.max(T::one());
        while f(hi) <= T::zero() {
            hi = hi * T::lit(2.0);
        }
        hi
    };

    let at_origin = f(T::zero());
    if at_origin <= T::zero() {
        // p ≥ N/(N-2): Φ̃ starts nonpositive, dips to Y₀ and then increases.
        let y = bisect(f, y0, upper_bracket(y0), T::zero());
        return Ok(PhiRoots { structure: RootStructure::Single, roots: vec![y_to_x(y, p)], y0 });
    }

    let mstar = m_star(params.n(), p)?;
    if (params.m() - mstar).abs() <= T::lit(TANGENCY_BAND) {
        return Ok(PhiRoots {
            structure: RootStructure::Tangential,
            roots: vec![y_to_x(y0, p)],
            y0,
        });
    }
    if f(y0) >= T::zero() {
        return Ok(PhiRoots { structure: RootStructure::Empty, roots: Vec::new(), y0 });
    }
    let y1 = bisect(f, T::zero(), y0, T::zero());
    let y2 = bisect(f, y0, upper_bracket(y0), T::zero());
    Ok(PhiRoots {
        structure: RootStructure::Pair,
        roots: vec![y_to_x(y1, p), y_to_x(y2, p)],
        y0,
    })
}

/// `X_{m*} = Y₀(m*)^{(p+1)/(p-1)}`, the double root of Φ at `m = m*`.
pub fn x_at_m_star<T: Real>(n: u32, p: T) -> Result<T> {
    let mstar = m_star(n, p)?;
    // q does not enter Φ; any admissible value works here.
    let pp = ProblemParams::new(n, p, T::lit(1.5), mstar)?;
    Ok(y_to_x(phi_tilde_minimizer(&pp)?, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpThreshold<T> {
    pub b_p: T,
    /// Crossing of the two bounds `f₁` and `f₂`.
    pub theta_star: T,
    /// Common value `f₁(θ*) = f₂(θ*)`.
    pub m_p: T,
    /// The literal closed form `p / (b_p (b_p - 1))` given alongside the threshold.
    pub theta_literal: T,
    /// `(f₁, f₂)` evaluated at `theta_literal`.
    pub m_p_literal_pair: (T, T),
    /// Whether the two members of `m_p_literal_pair` agree.
    pub consistent: bool,
}

#[allow(clippy::type_complexity)]
fn mp_parts<T: Real>(n: u32, p: T) -> Result<(T, impl Fn(T) -> T, impl Fn(T) -> T)> {
    let ce = critical_exponents::<T>(n)?;
    if !(p > T::one() && p < ce.p_c) {
        return Err(Error::domain(format!(
            "b_p <= 1: nonexistence window empty (need 1 < p < (N+1)/(N-1) = {}, got p = {p})",
            ce.p_c
        )));
    }
    let nn = T::from_u32(n).expect("dimension fits scalar");
    let one = T::one();
    let alpha = T::lit(2.0) / (p - one);
    let b = alpha * (alpha + T::lit(2.0) - nn) / (nn - one);
    let f1 = move |theta: T| {
        (p + one) * (b - one) * theta.powf((p + one) / p) / (p * b.powf((p - one) / (p + one)))
    };
    let f2 = move |theta: T| (p + one) / (b.powf(T::lit(2.0) * p / (p + one)) * theta.powf(p + one));
    Ok((b, f1, f2))
}

/// Increasing bound `f₁(θ)` of the nonexistence argument.
pub fn mp_bound_increasing<T: Real>(n: u32, p: T, theta: T) -> Result<T> {
    mp_parts(n, p).map(|(_, f1, _)| f1(theta))
}

/// Decreasing bound `f₂(θ)` of the nonexistence argument.
pub fn mp_bound_decreasing<T: Real>(n: u32, p: T, theta: T) -> Result<T> {
    mp_parts(n, p).map(|(_, _, f2)| f2(theta))
}

pub fn m_p_threshold<T: Real>(n: u32, p: T) -> Result<MpThreshold<T>> {
    let (b, f1, f2) = mp_parts(n, p)?;
    let one = T::one();
    let gap = |theta: T| f1(theta).ln() - f2(theta).ln();

    let mut lo = one;
    while gap(lo) > T::zero() {
        lo = lo * T::lit(0.5);
    }
    let mut hi = one;
    while gap(hi) < T::zero() {
        hi = hi * T::lit(2.0);
    }
    let theta_star = bisect(gap, lo, hi, T::zero());
    let m_p = f2(theta_star);

    let theta_literal = p / (b * (b - one));
    let pair = (f1(theta_literal), f2(theta_literal));
    let consistent = (pair.0 - pair.1).abs() <= T::lit(M_P_CONSISTENCY_RTOL) * pair.0.abs().max(pair.1.abs());
    Ok(MpThreshold { b_p: b, theta_star, m_p, theta_literal, m_p_literal_pair: pair, consistent })
}

/// `m₁(p, b) = ((b-1)/(2b))^{p/(p+1)}` for `b > 1`.
pub fn m_one<T: Real>(p: T, b: T) -> Result<T> {
    if !(p > T::one()) {
        return Err(Error::domain(format!("source exponent p = {p} must satisfy p > 1")));
    }
    if !(b > T::one()) {
        return Err(Error::domain(format!("m_1 requires b > 1, got b = {b}")));
    }
    Ok(((b - T::one()) / (T::lit(2.0) * b)).powf(p / (p + T::one())))
}

/// `sup_{b>1} m₁(p, b) = (1/2)^{p/(p+1)}`, approached as `b → ∞`.
pub fn m_one_supremum<T: Real>(p: T) -> T {
    T::lit(0.5).powf(p / (p + T::one()))
}

/// Every closed-form constant attached to a parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: crate::scalar::Real"))]
pub struct ConstantReport<T> {
    pub params: ProblemParams<T>,
    pub alpha: T,
    pub beta: T,
    pub p_c: T,
    pub q_c: T,
    #[serde(serialize_with = "crate::scalar::serialize_real")]
    pub p_serrin: T,
    #[serde(serialize_with = "crate::scalar::serialize_real")]
    pub p_sobolev: T,
    pub q_star: T,
    pub m_star: Option<T>,
    pub x_m_star: Option<T>,
    pub y0: Option<T>,
    pub phi_structure: Option<RootStructure>,
    pub phi_roots: Vec<T>,
    pub b_p: Option<T>,
    pub theta_star: Option<T>,
    pub m_p: Option<T>,
    pub m_p_literal: Option<(T, T)>,
    pub m_p_consistent: Option<bool>,
    pub m_one: Option<T>,
    pub citations: BTreeMap<&'static str, &'static str>,
}

pub fn constant_report<T: Real>(params: &ProblemParams<T>) -> ConstantReport<T> {
    let (n, p) = (params.n(), params.p());
    let m_star_v = m_star(n, p).ok();
    let x_m_star = x_at_m_star(n, p).ok();
    let roots = phi_root_structure(params).ok();
    let mp = m_p_threshold(n, p).ok();

    let mut citations = BTreeMap::new();
    citations.insert("alpha", "scaling exponent 2/(p-1) of the source term");
    citations.insert("beta", "scaling exponent (2-q)/(q-1) of the gradient term");
    citations.insert("p_c", "boundary critical exponent (N+1)/(N-1)");
    citations.insert("q_c", "boundary critical exponent (N+1)/N for the gradient term");
    citations.insert("p_serrin", "interior critical exponent N/(N-2)");
    citations.insert("p_sobolev", "Sobolev exponent (N+2)/(N-2), a priori estimate window");
    citations.insert("q_star", "balance exponent 2p/(p+1) of the scaling invariance");
    citations.insert("m_star", "tangency threshold for constant full-sphere profiles");
    citations.insert("x_m_star", "double root of Phi at m = m*");
    citations.insert("y0", "minimizer of the reduced function Phi~");
    citations.insert("phi_roots", "constant positive full-sphere profiles (roots of Phi)");
    citations.insert("b_p", "power substitution exponent of the nonexistence argument");
    citations.insert("theta_star", "crossing of the two Holder bounds");
    citations.insert("m_p", "half-sphere nonexistence threshold (optimized crossing)");
    citations.insert("m_p_literal", "both threshold expressions at theta = p/(b(b-1))");
    citations.insert("m_one", "radon-trace threshold m_1(p,b), supremum over b > 1");

    ConstantReport {
        params: *params,
        alpha: params.alpha(),
        beta: params.beta(),
        p_c: params.p_c(),
        q_c: params.q_c(),
        p_serrin: params.p_serrin(),
        p_sobolev: params.p_sobolev(),
        q_star: params.q_star(),
        m_star: m_star_v,
        x_m_star,
        y0: roots.as_ref().map(|r| r.y0),
        phi_structure: roots.as_ref().map(|r| r.structure),
        phi_roots: roots.map(|r| r.roots).unwrap_or_default(),
        b_p: mp.map(|t| t.b_p),
        theta_star: mp.map(|t| t.theta_star),
        m_p: mp.map(|t| t.m_p),
        m_p_literal: mp.map(|t| t.m_p_literal_pair),
        m_p_consistent: mp.map(|t| t.consistent),
        m_one: Some(m_one_supremum(p)),
        citations,
    }
}
