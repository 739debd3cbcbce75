//! Scalar abstraction for the dense complex kernel.
//!
//! The linear-algebra layer is generic over the real scalar so the same
//! kernels run at `f32` or `f64`. Tolerances scale with the precision of
//! the scalar; the `f64` values are the ones the rest of the toolkit is
//! specified against.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Allowed Hermitian asymmetry before an input is rejected.
    const TOL_HERMITIAN: Self;
    /// Allowed deviation from orthonormality for isometry/unitary inputs.
    const TOL_ORTHO: Self;
    /// Jacobi sweep target for the off-diagonal Frobenius norm (relative).
    const TOL_JACOBI_OFF: Self;
    /// Near-dependence threshold when filling out a unitary completion.
    const TOL_FILL: Self;
}

impl Scalar for f64 {
    const TOL_HERMITIAN: f64 = 1e-10;
    const TOL_ORTHO: f64 = 1e-10;
    const TOL_JACOBI_OFF: f64 = 1e-12;
    const TOL_FILL: f64 = 1e-8;
}

impl Scalar for f32 {
    const TOL_HERMITIAN: f32 = 1e-4;
    const TOL_ORTHO: f32 = 1e-4;
    const TOL_JACOBI_OFF: f32 = 1e-6;
    const TOL_FILL: f32 = 1e-4;
}
