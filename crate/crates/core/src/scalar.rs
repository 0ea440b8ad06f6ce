use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used by every numerical kernel: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Never fails for the two supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable")
    }

    /// Relative tolerance that is still meaningful at this precision.
    #[inline]
    fn clamp_tol(tol: Self) -> Self {
        tol.max(Self::epsilon() * Self::lit(8.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Arbitrary precision rational, for the exact slicing identities.
pub type Rational = num_rational::Ratio<BigInt>;
