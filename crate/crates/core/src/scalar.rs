//! Floating-point scalar abstraction.
//!
//! All numerical routines are generic over [`Real`], which is satisfied by
//! `f32` and `f64`. Exact combinatorial quantities (walk weights, contravariant
//! coefficients, Clebsch-Gordan sums) are computed with big integers and only
//! converted to a `Real` at the very end.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Real scalar type used for all floating-point arithmetic.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal conversion")
    }

    /// Conversion from a signed integer.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("i64 conversion")
    }

    /// Conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("usize conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the chosen real scalar.
pub type C<R> = Complex<R>;

/// i (the imaginary unit).
pub fn imag_unit<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::one())
}

/// Real number promoted to a complex one.
pub fn re<R: Real>(x: R) -> C<R> {
    Complex::new(x, R::zero())
}
