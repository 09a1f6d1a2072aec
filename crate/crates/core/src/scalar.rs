//! Scalar abstraction shared by the numerical core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the physics is written against (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion back to `f64`, for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

/// Pairwise summation in a fixed order, so the result does not depend on
/// how the terms were produced.
pub fn pairwise_sum<S>(terms: &[S]) -> S
where
    S: Copy + std::ops::Add<Output = S> + num_traits::Zero,
{
    match terms.len() {
        0 => S::zero(),
        1 => terms[0],
        2 => terms[0] + terms[1],
        n => {
            let (lo, hi) = terms.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
