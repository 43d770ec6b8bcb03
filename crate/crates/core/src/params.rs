use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{near, Real};

/// The quadruple `(N, p, q, m)` of `-Δu + m|∇u|^q - u^p = 0`.
///
/// Fields are private so that every instance satisfies `N ≥ 2`, `p > 1`,
/// `1 < q < 2` and `m ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams<T> {
    #[serde(rename = "N")]
    n: u32,
    p: T,
    q: T,
    m: T,
}

impl<T: Real> ProblemParams<T> {
    pub fn new(n: u32, p: T, q: T, m: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension N = {n} must be at least 2")));
        }
        if !(p > T::one()) || !p.is_finite() {
            return Err(Error::domain(format!("source exponent p = {p} must satisfy p > 1")));
        }
        if !(q > T::one() && q < T::lit(2.0)) {
            return Err(Error::domain(format!("gradient exponent q = {q} must lie in (1, 2)")));
        }
        if !(m >= T::zero()) || !m.is_finite() {
            return Err(Error::domain(format!("coefficient m = {m} must be finite and nonnegative")));
        }
        Ok(Self { n, p, q, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn p(&self) -> T {
        self.p
    }
    pub fn q(&self) -> T {
        self.q
    }
    pub fn m(&self) -> T {
        self.m
    }

    /// Same `(N, p, q)` with a different coefficient `m`.
    pub fn with_m(&self, m: T) -> Result<Self> {
        Self::new(self.n, self.p, self.q, m)
    }

    pub fn with_p(&self, p: T) -> Result<Self> {
        Self::new(self.n, p, self.q, self.m)
    }

    pub fn with_q(&self, q: T) -> Result<Self> {
        Self::new(self.n, self.p, q, self.m)
    }

    pub fn dim(&self) -> T {
        T::from_u32(self.n).expect("dimension fits scalar")
    }

    /// Scaling exponent `2/(p-1)` of the source term.
    pub fn alpha(&self) -> T {
        T::lit(2.0) / (self.p - T::one())
    }

    /// Scaling exponent `(2-q)/(q-1)` of the gradient term.
    pub fn beta(&self) -> T {
        (T::lit(2.0) - self.q) / (self.q - T::one())
    }

    /// Gradient exponent `2p/(p+1)` for which both nonlinearities scale alike.
    pub fn q_star(&self) -> T {
        T::lit(2.0) * self.p / (self.p + T::one())
    }

    pub fn p_c(&self) -> T {
        let n = self.dim();
        (n + T::one()) / (n - T::one())
    }

    pub fn q_c(&self) -> T {
        let n = self.dim();
        (n + T::one()) / n
    }

    /// `N/(N-2)`, infinite in dimension two.
    pub fn p_serrin(&self) -> T {
        if self.n == 2 {
            T::infinity()
        } else {
            let n = self.dim();
            n / (n - T::lit(2.0))
        }
    }

    /// `(N+2)/(N-2)`, infinite in dimension two.
    pub fn p_sobolev(&self) -> T {
        if self.n == 2 {
            T::infinity()
        } else {
            let n = self.dim();
            (n + T::lit(2.0)) / (n - T::lit(2.0))
        }
    }

    /// Zero-order coefficient `α(N-2-α)` of the source-scaled profile equations.
    pub fn alpha_shift(&self) -> T {
        let a = self.alpha();
        a * (self.dim() - T::lit(2.0) - a)
    }

    pub fn q_is_critical(&self) -> bool {
        near(self.q, self.q_star())
    }

    /// `q < 2p/(p+1)`, with the critical value excluded.
    pub fn q_below_critical(&self) -> bool {
        self.q < self.q_star() && !self.q_is_critical()
    }

    pub fn q_above_critical(&self) -> bool {
        self.q > self.q_star() && !self.q_is_critical()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(ProblemParams::new(1, 2.0, 1.5, 1.0).is_err());
        assert!(ProblemParams::new(3, 1.0, 1.5, 1.0).is_err());
        assert!(ProblemParams::new(3, 2.0, 2.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 2.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 2.0, 1.5, -0.1).is_err());
        assert!(ProblemParams::new(3, f64::NAN, 1.5, 1.0).is_err());
        assert!(ProblemParams::new(2, 2.0, 1.5, 0.0).is_ok());
    }

    #[test]
    fn derived_exponents() {
        let pp = ProblemParams::new(3, 3.0, 1.5, 1.0).unwrap();
        assert_eq!(pp.alpha(), 1.0);
        assert_eq!(pp.beta(), 1.0);
        assert_eq!(pp.q_star(), 1.5);
        assert!(pp.q_is_critical());
        let pp = ProblemParams::<f64>::new(2, 3.0, 1.5, 1.0).unwrap();
        assert!(pp.p_serrin().is_infinite() && pp.p_sobolev().is_infinite());
    }
}
