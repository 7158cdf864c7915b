//! Floating-point abstraction shared by the simulator, the Pauli algebra and
//! the exact eigensolver.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real scalar type the numerical kernels are written against.
///
/// Implemented for `f32` and `f64`. All reported tolerances in this crate
/// (1e-10 amplitude agreement, 1e-9 eigen-residuals) assume `f64`; the
/// `f32` instantiation is usable for quick exploratory runs only.
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
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    C::new(T::one(), T::zero())
}

/// Multiply by `i^k`.
#[inline]
pub(crate) fn mul_i_pow<T: Real>(z: C<T>, k: u32) -> C<T> {
    match k & 3 {
        0 => z,
        1 => C::new(-z.im, z.re),
        2 => C::new(-z.re, -z.im),
        _ => C::new(z.im, -z.re),
    }
}
