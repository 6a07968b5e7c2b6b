//! Scalar abstraction for the planner math.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used throughout the planner.
///
/// Blanket-implemented for `f32` and `f64`. All physical quantities and
/// solver internals are generic over this trait; concrete `f64` aliases
/// live at the crate root.
pub trait Real: Float + FromPrimitive + Sum<Self> + fmt::Debug + fmt::Display + 'static {
    /// Lift an `f64` literal into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Sum<T> + fmt::Debug + fmt::Display + 'static {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_literals_for_both_widths() {
        assert_eq!(f64::of(1.5), 1.5);
        assert_eq!(f32::of(1.5), 1.5f32);
        assert_eq!(f64::two(), 2.0);
        assert_eq!(f64::half(), 0.5);
    }
}
