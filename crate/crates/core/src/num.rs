//! Scalar abstraction shared by every numeric module.
//!
//! All solvers, samplers and networks are generic over [`Real`]. The crate
//! root re-exports `f64` aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::SimRng;

/// Floating point scalar usable by the simulators, solvers and networks.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for `f32`/`f64`.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    /// One draw from N(0, 1).
    fn standard_normal(rng: &mut SimRng) -> Self;

    /// One draw from U[0, 1).
    fn unit_uniform(rng: &mut SimRng) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            #[inline]
            fn standard_normal(rng: &mut SimRng) -> Self {
                rng.sample::<$t, _>(StandardNormal)
            }

            #[inline]
            fn unit_uniform(rng: &mut SimRng) -> Self {
                rng.random::<$t>()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Parses a scalar, mapping the error to a message.
pub(crate) fn parse_real<T: Real>(tok: &str) -> Option<T> {
    match tok {
        "inf" | "+inf" => Some(T::infinity()),
        "-inf" => Some(T::neg_infinity()),
        _ => tok.parse::<T>().ok(),
    }
}
