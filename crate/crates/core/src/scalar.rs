//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type backing complex amplitudes: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance on `| ‖ψ‖ − 1 |` when validating a state.
    const NORM_TOLERANCE: f64;

    /// Tolerance used when checking that a matrix is Hermitian.
    const HERMITIAN_TOLERANCE: f64;

    /// Machine epsilon as `f64`, used to scale iterative convergence tests.
    const EPSILON_F64: f64;

    /// Converts an `f64` literal. Panics only if the target type cannot
    /// represent finite `f64` values, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    const NORM_TOLERANCE: f64 = 1e-12;
    const HERMITIAN_TOLERANCE: f64 = 1e-12;
    const EPSILON_F64: f64 = f64::EPSILON;
}

impl Real for f32 {
    const NORM_TOLERANCE: f64 = 1e-5;
    const HERMITIAN_TOLERANCE: f64 = 1e-5;
    const EPSILON_F64: f64 = f32::EPSILON as f64;
}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}
