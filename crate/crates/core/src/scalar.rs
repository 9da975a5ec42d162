//! Scalar abstraction: the whole library is generic over the floating-point
//! type through [`Real`], with `f64` as the default used by the CLI.

use num_traits::FromPrimitive;

/// Scalar type the geometry is computed with (`f32` or `f64`).
pub trait Real: nalgebra::RealField + FromPrimitive + Copy {}

impl<T> Real for T where T: nalgebra::RealField + FromPrimitive + Copy {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}
