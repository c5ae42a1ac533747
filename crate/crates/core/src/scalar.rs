//! Scalar abstraction for the numerical core.
//!
//! Everything downstream (eigenproblems, tilted families, strategy runs) is
//! generic over [`Scalar`]. The trait bundles the `num_traits` float surface
//! with the per-precision tolerances the algorithms need; `f64` is the working
//! precision of the shipped binaries, `f32` is supported with proportionally
//! looser gates.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for probability normalization checks (row sums,
    /// distribution sums).
    const NORM_TOL: Self;

    /// Relative residual target for the power-iteration eigensolver.
    const PF_TOL: Self;

    /// Relative residual gate above which an eigentriple is rejected outright.
    const PF_GATE: Self;

    /// Absolute tolerance on the mean when inverting the mean map.
    const INV_TOL: Self;

    /// Shorthand for converting an `f64` literal; panics only for values not
    /// representable in the target type (never for ordinary constants).
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("literal conversion")
    }

    /// Shorthand for converting a count.
    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count conversion")
    }

    /// Lossless-enough view as `f64` for reporting and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Scalar for f64 {
    const NORM_TOL: Self = 1e-12;
    const PF_TOL: Self = 1e-13;
    const PF_GATE: Self = 1e-10;
    const INV_TOL: Self = 1e-12;
}

impl Scalar for f32 {
    const NORM_TOL: Self = 1e-5;
    const PF_TOL: Self = 1e-6;
    const PF_GATE: Self = 1e-4;
    const INV_TOL: Self = 1e-5;
}
