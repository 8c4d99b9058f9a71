//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the transform, laws and estimators are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that are requested below what the
/// type can resolve are clamped to a small multiple of its epsilon.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest relative tolerance worth asking of an iterative routine.
    #[inline]
    fn tol_floor() -> Self {
        Self::epsilon() * Self::lit(50.0)
    }

    /// Gamma function, evaluated in double precision.
    fn gamma(self) -> Self;
}

impl Real for f32 {
    fn gamma(self) -> Self {
        libm::tgamma(self as f64) as f32
    }
}

impl Real for f64 {
    fn gamma(self) -> Self {
        libm::tgamma(self)
    }
}
