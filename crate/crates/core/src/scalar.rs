//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::Debug;

/// Real floating point type the simulator can run on.
///
/// `TOL` is the default invariant tolerance (unit norm, hermiticity,
/// orthonormality) used by validating constructors for this precision.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    const TOL: f64;

    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn tol() -> Self {
        Self::lit(Self::TOL)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOL: f64 = 1e-10;
}

impl Real for f32 {
    const TOL: f64 = 1e-5;
}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    abs2(z).sqrt()
}

#[inline]
pub fn arg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}
