//! Scalar abstraction: all geometry is generic over a floating-point type.
//!
//! `f64` is the type the CLI and the test suites use; `f32` works for the
//! core predicates but its default tolerance is necessarily coarser.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance used by predicates (tie detection, containment
    /// slop). Comparisons that need a different tolerance take it explicitly.
    fn tol() -> Self;

    /// Cast a literal. Panics only if the value is not representable, which
    /// cannot happen for finite `f64` into `f32`/`f64`.
    #[inline]
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 must cast into a Scalar")
    }

    /// Lossy view as `f64`, for reporting and serialization helpers.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar must convert to f64")
    }
}

impl Scalar for f64 {
    #[inline]
    fn tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn tol() -> Self {
        1e-6
    }
}

/// Three-way comparison with absolute tolerance: values within `tol` of each
/// other compare equal.
#[inline]
pub fn cmp_tol<F: Scalar>(a: F, b: F) -> std::cmp::Ordering {
    if (a - b).abs() <= F::tol() {
        std::cmp::Ordering::Equal
    } else {
        a.partial_cmp(&b).expect("non-finite value in comparison")
    }
}
