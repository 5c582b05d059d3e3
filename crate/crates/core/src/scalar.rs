//! Scalar abstractions.
//!
//! Two tiers are used throughout the crate:
//!
//! * [`Field`] is anything with exact field arithmetic and an ordering. It is
//!   enough for the parameter algebra in [`crate::model`] (ratios,
//!   polynomial re-expansion, squared sound speed, dispersion coefficient),
//!   so those can run on `Ratio<i64>` as well as on floats.
//! * [`Real`] adds transcendental functions and FFT support. Everything that
//!   touches `sqrt`, `cos` or a Fourier transform is generic over it; `f32`
//!   and `f64` both qualify.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num};
use rustfft::FftNum;

/// Exact-or-approximate ordered field.
pub trait Field: Clone + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + Debug {}

impl<T> Field for T where T: Clone + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + Debug {}

/// Floating point scalar usable by the spectral machinery.
pub trait Real:
    Field + Float + FloatConst + FftNum + Default + Display + LowerExp + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Field + Float + FloatConst + FftNum + Default + Display + LowerExp + Send + Sync + 'static
{
}

/// Small integer constant in any [`Field`].
#[inline]
pub fn int<T: Field>(n: i64) -> T {
    T::from_i64(n).expect("integer constant representable in scalar type")
}

/// Floating literal in any [`Real`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Lossy conversion to `f64`, used for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `usize` index as a scalar.
#[inline]
pub fn idx<T: Real>(i: usize) -> T {
    T::from_usize(i).expect("index representable in scalar type")
}
