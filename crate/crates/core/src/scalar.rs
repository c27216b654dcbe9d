//! Scalar abstraction for the numeric core.
//!
//! All kernel, posterior and confidence-bound math is written against the
//! [`Scalar`] trait so the same code runs in `f32` or `f64`. The crate root
//! exposes double-precision aliases, which is what the CLI and the test
//! suites use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar usable throughout the crate.
///
/// Beyond the `num-traits` arithmetic surface this adds the two sampling
/// hooks the simulator needs, so generic code never has to spell out
/// `Distribution` bounds.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` constant.
    fn real(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// One draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the uniform distribution on [0, 1).
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}
