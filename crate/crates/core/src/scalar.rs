//! Scalar abstraction for the linear-algebra and propagation layers.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar (f32 or f64).
///
/// The structural and scalar tolerances scale with the precision of the
/// type: the f64 values are the ones every documented bound refers to.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Tolerance for matrix-level identities (Hermiticity, unitarity, norms).
    fn structural_tol() -> Self;
    /// Tolerance for scalar comparisons such as fidelities.
    fn scalar_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Real for f64 {
    #[inline]
    fn structural_tol() -> Self {
        1e-10
    }
    #[inline]
    fn scalar_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    #[inline]
    fn structural_tol() -> Self {
        1e-4
    }
    #[inline]
    fn scalar_tol() -> Self {
        1e-5
    }
}
