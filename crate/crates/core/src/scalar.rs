//! Floating-point abstraction so the whole model can run in `f32` or `f64`.
//!
//! Every numeric routine in this crate is generic over [`Scalar`]. The trait
//! bundles the `num_traits` float surface with the two random draws the
//! channel model needs, so call sites never name a concrete float type.
//! `f64` is the recommended precision; the crate root exposes concrete
//! aliases for it.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Real scalar used for all internal arithmetic.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draws a standard normal sample.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draws uniformly from `[lo, hi)`; a degenerate interval returns `lo`.
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self;
}

macro_rules! impl_scalar {
    ($($t:ty)*) => {$(
        impl Scalar for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(StandardNormal)
            }

            fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
                if lo < hi {
                    rng.gen_range(lo..hi)
                } else {
                    lo
                }
            }
        }
    )*};
}

impl_scalar!(f32 f64);

/// Converts an `f64` constant into the working scalar type.
pub fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}
