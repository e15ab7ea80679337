//! Real scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// A real floating-point element type: `f64` (the default everywhere) or `f32`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative cutoff below which singular or eigenvalues count as zero.
    ///
    /// 1e-12 for `f64`; lifted to a small multiple of machine epsilon for
    /// types where 1e-12 is below resolution.
    #[inline]
    fn pinv_cutoff() -> Self {
        let floor = Self::lit(1e-12);
        let eps = Self::epsilon() * Self::lit(16.0);
        if eps > floor {
            eps
        } else {
            floor
        }
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
