//! Elementary functions routed through `libm`.
//!
//! Every transcendental call in the crate goes through here so that results
//! do not depend on whether `std` is linked or which platform intrinsics it
//! lowers to.

use crate::C64;

pub use core::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    let (s, c) = libm::sincos(theta);
    C64::new(c, s)
}

#[inline]
pub fn cabs(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}
