//! Scalar abstraction shared by the analytical layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the analytical code is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for error reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest tolerance that is still meaningful for this precision.
    #[inline]
    fn tol_floor() -> Self {
        Self::epsilon() * Self::lit(16.0)
    }

    /// `max(requested, tol_floor())`.
    #[inline]
    fn clamp_tol(requested: f64) -> Self {
        Self::lit(requested).max(Self::tol_floor())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
