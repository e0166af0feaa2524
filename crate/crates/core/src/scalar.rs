//! Floating-point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FloatConst, ToPrimitive};

/// Real scalar the whole crate is generic over.
///
/// Implemented for `f32` and `f64`. All experiment drivers run in `f64`;
/// the building blocks accept either so that single-precision runs can be
/// compared against double-precision ones.
pub trait Scalar:
    RealField + Copy + FloatConst + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Machine epsilon.
    fn eps() -> Self;
}

impl Scalar for f32 {
    #[inline]
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    #[inline]
    fn eps() -> Self {
        f64::EPSILON
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(<f64 as Scalar>::lit(0.25).as_f64(), 0.25);
        assert_eq!(<f32 as Scalar>::lit(0.5).as_f64(), 0.5);
        assert_eq!(<f64 as Scalar>::from_count(7), 7.0);
    }
}
