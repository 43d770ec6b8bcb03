use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Half-annulus `r_min ≤ r ≤ r_max`, `0 ≤ θ ≤ π`, log-spaced in `r`.
///
/// Node counts include the boundary layers; rows `j = 0` and
/// `j = n_theta - 1` lie on the flat boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarGrid<T> {
    pub r_min: T,
    pub r_max: T,
    pub n_r: usize,
    pub n_theta: usize,
}

pub const MIN_NODES: usize = 16;

impl<T: Real> PolarGrid<T> {
    pub fn new(r_min: T, r_max: T, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_min > T::zero()) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::domain(format!("need 0 < r_min < r_max, got r_min = {r_min}, r_max = {r_max}")));
        }
        if n_r < MIN_NODES || n_theta < MIN_NODES {
            return Err(Error::domain(format!("grid needs at least {MIN_NODES} nodes per direction, got {n_r}x{n_theta}")));
        }
        Ok(PolarGrid { r_min, r_max, n_r, n_theta })
    }

    /// Same domain with both node counts doubled (in intervals).
    pub fn refined(&self) -> Self {
        PolarGrid { n_r: 2 * self.n_r, n_theta: 2 * self.n_theta, ..*self }
    }

    pub fn h_s(&self) -> T {
        (self.r_max / self.r_min).ln() / T::from_usize_lossy(self.n_r - 1)
    }

    pub fn h_theta(&self) -> T {
        T::PI() / T::from_usize_lossy(self.n_theta - 1)
    }

    pub fn s(&self, i: usize) -> T {
        self.r_min.ln() + self.h_s() * T::from_usize_lossy(i)
    }

    pub fn r(&self, i: usize) -> T {
        if i + 1 == self.n_r {
            return self.r_max;
        }
        self.s(i).exp()
    }

    pub fn theta(&self, j: usize) -> T {
        self.h_theta() * T::from_usize_lossy(j)
    }

    /// Row-major index `(i, j)` into a full field.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_unknowns(&self) -> usize {
        (self.n_r - 2) * (self.n_theta - 2)
    }

    /// Unknown index of interior node `(i, j)`, `1 ≤ i ≤ n_r-2`, `1 ≤ j ≤ n_theta-2`.
    #[inline]
    pub fn unknown(&self, i: usize, j: usize) -> usize {
        (i - 1) * (self.n_theta - 2) + (j - 1)
    }
}
