use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
///
/// Transcendental functions come from [`RealField`]; conversions to and from
/// `f64` literals go through num-traits.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Display + Debug + Send + Sync
{
    /// Converts an `f64` constant. Infinities and NaN map to their counterparts.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }

    /// Machine epsilon of the concrete type.
    fn epsilon() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

/// Relative tolerance that never drops below a few ulps of `T`.
#[inline]
pub(crate) fn tol<T: Real>(x: f64) -> T {
    let floor = T::epsilon() * T::lit(64.0);
    let t = T::lit(x);
    if t > floor {
        t
    } else {
        floor
    }
}
