//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable by the pointwise algebra, the spectral
/// calculus and the flow integrators.
pub trait Real:
    Float + FloatConst + FromPrimitive + rustfft::FftNum + Default + Debug + Display + Send + Sync + 'static
{
    /// Machine epsilon of the type.
    const EPS: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal")
    }

    /// Converts a count or index.
    #[inline]
    fn of(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize literal")
    }

    /// Lossless widening used for reporting.
    #[inline]
    fn to_f64(self) -> f64 {
        <Self as num_traits::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const EPS: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON;
}

// `Float` and `Signed` both provide `abs`/`signum`; these free functions
// pick the `Float` versions unambiguously.

#[inline]
pub fn abs<T: Float>(x: T) -> T {
    x.abs()
}

#[inline]
pub fn signum<T: Float>(x: T) -> T {
    x.signum()
}

/// Real cube root preserving sign.
#[inline]
pub fn cbrt<T: Float>(x: T) -> T {
    x.cbrt()
}

/// Real odd root `x^(1/m)` for odd `m`, defined for negative `x`.
#[inline]
pub fn odd_root<T: Float>(x: T, m: i32) -> T {
    let r = x.abs().powf(T::one() / T::from(m).unwrap());
    if x < T::zero() {
        -r
    } else {
        r
    }
}

/// Largest absolute value in a slice, zero when empty.
pub fn max_abs<T: Float>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}
