//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the solvers are generic over (`f32` or `f64`).
///
/// Tolerances quoted throughout the crate assume `f64`; `f32` instances are
/// useful for quick sweeps but will not meet the tight conservation checks.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("representable literal")
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as num_traits::FromPrimitive>::from_usize(n).expect("representable count")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Smallest distance to the pure phases `±1` that is still resolvable
    /// next to 1 in this precision.
    fn default_guard() -> Self {
        let four_eps = Self::epsilon() * Self::lit(4.0);
        four_eps.max(Self::lit(1e-14))
    }
}

impl Real for f32 {}
impl Real for f64 {}
