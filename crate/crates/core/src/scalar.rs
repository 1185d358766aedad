//! Scalar abstraction shared by every module.
//!
//! All geometry and solvers are written against [`Real`]. Binary64 is the
//! production scalar; `f32` is supported for the geometry and the strip
//! recursions but is too coarse for the default solver tolerances.

use core::fmt::{Debug, Display, LowerExp};
use core::iter::Sum;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Residual target for the small Newton solves.
    fn solve_tol() -> Self;

    /// Central-difference step used for Jacobians.
    fn fd_step() -> Self;
}

impl Real for f64 {
    #[inline]
    fn solve_tol() -> Self {
        1e-11
    }

    #[inline]
    fn fd_step() -> Self {
        1e-7
    }
}

impl Real for f32 {
    #[inline]
    fn solve_tol() -> Self {
        2e-5
    }

    #[inline]
    fn fd_step() -> Self {
        5e-3
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}

/// Converts a signed integer into `T`.
#[inline]
pub fn int<T: Real>(v: i64) -> T {
    T::from_i64(v).expect("integer representable in scalar type")
}

#[inline]
pub fn sqrt3<T: Real>() -> T {
    lit::<T>(3.0).sqrt()
}
