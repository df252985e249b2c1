//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, ToPrimitive};
use serde::Serialize;

/// Real scalar used for states, increments, payoffs and accumulated sums.
///
/// Implemented for `f32` and `f64`. Random draws are always produced in
/// double precision and then narrowed, so a model integrated in `f32` sees
/// the same Brownian path as its `f64` counterpart up to rounding.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + Debug
    + Display
    + Default
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and normal draws.
    #[inline(always)]
    fn of(value: f64) -> Self {
        <Self as NumCast>::from(value).expect("f64 converts to every float type")
    }

    /// Conversion from an integer count.
    #[inline(always)]
    fn of_u64(value: u64) -> Self {
        <Self as NumCast>::from(value).expect("u64 converts to every float type")
    }

    #[inline(always)]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
