//! Real scalar abstraction backing all dense complex linear algebra.
//!
//! Everything in this crate is generic over the floating-point type `T`
//! through `Complex<T>`; `f64` is the intended precision for production
//! runs and is what the concrete aliases at the crate root use.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable as the real type of all matrix entries.
pub trait Scalar:
    Float
    + FloatConst
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
    /// Absolute tolerance applied when the caller does not supply one.
    fn default_tol() -> Self;
}

impl Scalar for f64 {
    fn default_tol() -> f64 {
        1e-10
    }
}

impl Scalar for f32 {
    fn default_tol() -> f32 {
        1e-4
    }
}

/// Converts an `f64` constant into the working scalar type.
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Converts a count into the working scalar type.
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count not representable in scalar type")
}

/// Complex number from `f64` parts.
pub fn cplx<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(real(re), real(im))
}

/// Real value promoted to a complex entry.
pub fn re_c<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
