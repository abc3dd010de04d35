use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand::distr::uniform::SampleUniform;
use rand_distr::StandardNormal;

/// Floating-point scalar the whole crate is generic over: `f64` or `f32`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + SampleUniform
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draw one standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from(x).expect("f64 -> Scalar conversion")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from(x).expect("usize -> Scalar conversion")
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f32 {
        rng.sample(StandardNormal)
    }
}
