//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the usual band layout: row `r` keeps columns
//! `r - kl ..= r + kl + ku`, the extra `kl` upper diagonals holding fill-in
//! created by row interchanges.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.kl - r)
    }

    /// Adds `v` to entry `(r, c)`; panics outside the declared band.
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: T) {
        assert!(c + self.kl >= r && c <= r + self.ku, "entry ({r}, {c}) outside band");
        let k = self.idx(r, c);
        self.data[k] = self.data[k] + v;
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        if c + self.kl < r || c > r + self.kl + self.ku {
            return T::zero();
        }
        self.data[self.idx(r, c)]
    }

    /// `y = A x` for an unfactored matrix.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.kl);
                let hi = (r + self.ku).min(self.n - 1);
                (lo..=hi).fold(T::zero(), |acc, c| acc + self.data[self.idx(r, c)] * x[c])
            })
            .collect()
    }

    /// Factors in place. Returns the factorization or the first zero pivot.
    pub fn factor(mut self) -> Result<BandLu<T>> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut perm = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > T::zero()) {
                return Err(Error::Singular(k));
            }
            perm[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for c in k..=last_col {
                    let (a, b) = (self.idx(k, c), self.idx(p, c));
                    self.data.swap(a, b);
                }
            }
            let row_k = self.idx(k, k);
            let pivot = self.data[row_k];
            let span = last_col - k;
            for r in k + 1..=last_row {
                let rk = self.idx(r, k);
                let (head, tail) = self.data.split_at_mut(rk);
                let src = &head[row_k + 1..=row_k + span];
                let dst = &mut tail[..=span];
                let l = dst[0] / pivot;
                dst[0] = l;
                if l == T::zero() {
                    continue;
                }
                for (d, &v) in dst[1..].iter_mut().zip(src) {
                    *d = *d - l * v;
                }
            }
        }
        Ok(BandLu { m: self, perm })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu<T> {
    m: BandMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn solve(&self, b: &mut [T]) {
        let a = &self.m;
        let n = a.n;
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == T::zero() {
                continue;
            }
            for r in k + 1..=(k + a.kl).min(n - 1) {
                b[r] = b[r] - a.data[a.idx(r, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let last = (k + a.kl + a.ku).min(n - 1);
            let row = a.idx(k, k);
            let coeffs = &a.data[row + 1..=row + (last - k)];
            let s = coeffs.iter().zip(&b[k + 1..=last]).fold(b[k], |acc, (&c, &x)| acc - c * x);
            b[k] = s / a.data[row];
        }
    }
}
