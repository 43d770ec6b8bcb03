//! Sign-based bisection shared by the algebraic and shooting solvers.

use crate::scalar::Real;

/// Bisects a sign change of `f` on `[lo, hi]`.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs; runs until the
/// bracket is at most `abs_tol` wide or cannot be split further in `T`.
/// Returns the final `(lo, hi)` bracket, `lo` keeping the sign of the input `lo`.
pub fn bisect_bracket<T, F>(mut f: F, mut lo: T, mut hi: T, abs_tol: T) -> (T, T)
where
    T: Real,
    F: FnMut(T) -> T,
{
    let lo_positive = f(lo) > T::zero();
    let half = T::lit(0.5);
    for _ in 0..2048 {
        if (hi - lo).abs() <= abs_tol {
            break;
        }
        let mid = lo + (hi - lo) * half;
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > T::zero()) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Midpoint of [`bisect_bracket`].
pub fn bisect<T, F>(f: F, lo: T, hi: T, abs_tol: T) -> T
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (a, b) = bisect_bracket(f, lo, hi, abs_tol);
    a + (b - a) * T::lit(0.5)
}
