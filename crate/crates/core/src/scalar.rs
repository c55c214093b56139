//! Scalar abstractions.
//!
//! Operator construction and application only need field arithmetic, so they
//! are generic over [`Scalar`], which is implemented for `f32`, `f64` and
//! exact rationals. The time-dependent solver additionally needs `sqrt`,
//! `exp`, trigonometry and finiteness checks, which [`Real`] provides.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Rational64;
use num_traits::{Float, FloatConst, NumAssign, Signed};

/// Field arithmetic plus exact construction from small integer ratios.
pub trait Scalar:
    NumAssign + Signed + Copy + PartialOrd + Debug + Send + Sync + 'static
{
    /// The value `num / den`. Exact for rational types.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// Lossy conversion used for reporting.
    fn to_f64(self) -> f64;
}

/// Floating point scalar used by the solver.
pub trait Real: Scalar + Float + FloatConst + Sum + Display {
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
}

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are reproducible.
pub fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        let mut acc = T::zero();
        for &v in values {
            acc += v;
        }
        acc
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}
