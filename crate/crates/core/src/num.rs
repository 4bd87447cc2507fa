//! Scalar abstraction shared by the numeric kernels.
//!
//! Geometry primitives, scoring kernels and the log-scaled loss are written
//! against [`Real`] so they run in `f32` or `f64`. Structures parsed from
//! disk store `f64` coordinates (see the aliases in the crate root).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

/// Floating-point scalar usable by every numeric routine in the crate.
pub trait Real: Float + FloatConst + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion() {
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::lit(1.1), 1.1);
        assert_eq!(2.5f32.to_f64_lossy(), 2.5);
    }
}
