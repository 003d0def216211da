//! Generic scalar abstraction for the numeric core.
//!
//! Every physics routine in this crate is generic over a real scalar type
//! `R: Real`, so the whole pipeline (Hamiltonian build, eigensolve,
//! relaxation rates, density-matrix propagation, curve fits) can run in
//! `f32` or `f64`. Concrete aliases for the common case live at the crate
//! root (see `lib.rs`).
//!
//! The trait deliberately combines `nalgebra::RealField` (which supplies
//! transcendental functions and lets `Complex<R>` act as a nalgebra
//! `ComplexField`) with `num_traits::FromPrimitive` (used to inject `f64`
//! literals such as pinned physical constants). We do *not* also require
//! `num_traits::Float`: its inherent methods shadow `RealField`'s and make
//! every `x.sqrt()` call ambiguous in generic code.

use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable throughout the numeric core (`f32`, `f64`).
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {
    /// Converts an `f64` literal (e.g. a pinned physical constant) into `R`.
    ///
    /// Panics only if the scalar type cannot represent finite `f64` values
    /// at all, which no implementor of `RealField` does.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal must convert into a Real scalar")
    }

    /// Converts into `f64` for diagnostics and error messages.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy> Real for T {}

/// Modulus |z| of a complex number over a generic real scalar.
///
/// (The inherent `Complex::norm` requires `num_traits::Float`, which the
/// generic scalar deliberately does not implement; see the trait docs.)
#[inline]
pub fn cnorm<R: Real>(z: Complex<R>) -> R {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Complex exponential e^z over a generic real scalar.
#[inline]
pub fn cexp<R: Real>(z: Complex<R>) -> Complex<R> {
    let m = z.re.exp();
    Complex::new(m * z.im.cos(), m * z.im.sin())
}
