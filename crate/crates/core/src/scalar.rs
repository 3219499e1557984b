//! Scalar abstraction for the geometry kernels.
//!
//! All metric formulas are written against [`Scalar`] so the same code runs
//! on `f32` and `f64`. The crate-root aliases pin `f64` as the default
//! precision; the audit tolerances elsewhere in the crate assume it.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable in every distance/measure formula.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into this scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Lower into `f64` (lossless for f32/f64).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar fits in f64")
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_constants_both_widths() {
        assert_eq!(<f64 as Scalar>::of(0.25), 0.25);
        assert_eq!(<f32 as Scalar>::of(0.25), 0.25f32);
        assert_eq!(0.25f32.as_f64(), 0.25);
    }
}
