//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating point type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for types that cannot hold finite `f64`s.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Relative comparison used for the boundary-of-window checks (`p == p_c` and friends).
#[inline]
pub(crate) fn near<T: Real>(a: T, b: T) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) * scale
}

/// Serializes non-finite values as the strings `"inf"`, `"-inf"` or `"nan"`
/// (JSON has no literal for them).
pub fn serialize_real<T: Float + Serialize, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    if v.is_nan() {
        s.serialize_str("nan")
    } else if v.is_infinite() {
        s.serialize_str(if *v > T::zero() { "inf" } else { "-inf" })
    } else {
        v.serialize(s)
    }
}
