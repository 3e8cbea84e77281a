//! Scalar abstraction for volumes, rates and durations.
//!
//! All model arithmetic is generic over [`Scalar`] so the same code runs in
//! `f32` or `f64`. The crate root exports `f64` aliases, which is what the
//! command line tools use.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the simulator can run on.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn sc<S: Scalar>(v: f64) -> S {
    S::from_f64(v).expect("finite f64 constant")
}

/// Compensated (Neumaier) summation.
///
/// Keeps the rounding error of long series at a few ulps independent of
/// length, which the metrics contracts rely on.
pub fn neumaier_sum<S: Scalar, I: IntoIterator<Item = S>>(values: I) -> S {
    let mut sum = S::zero();
    let mut comp = S::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Running compensated accumulator for streaming totals.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator<S> {
    sum: S,
    comp: S,
}

impl<S: Scalar> Accumulator<S> {
    pub fn new() -> Self {
        Accumulator {
            sum: S::zero(),
            comp: S::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: S) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp = self.comp + ((self.sum - t) + v);
        } else {
            self.comp = self.comp + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> S {
        self.sum + self.comp
    }
}

impl<S: Scalar> Default for Accumulator<S> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_handles_cancellation() {
        // 1 + 1e100 - 1e100 loses the 1 under naive summation.
        let xs = [1.0f64, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(xs), 2.0);
    }

    #[test]
    fn accumulator_matches_batch_sum() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64) * 1e-3 + 0.1).collect();
        let mut acc = Accumulator::new();
        for &x in &xs {
            acc.add(x);
        }
        let batch = neumaier_sum(xs.iter().copied());
        assert!((acc.total() - batch).abs() < 1e-12);
    }

    #[test]
    fn sc_works_for_f32() {
        let v: f32 = sc(0.54);
        assert!((v - 0.54f32).abs() < 1e-6);
    }
}
