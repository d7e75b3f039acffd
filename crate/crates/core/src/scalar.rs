//! Scalar abstraction for probability tables and analytic formulas.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used for probabilities: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literal constants.
    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count.
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Tolerance for normalization checks: `1e-12` in double precision,
    /// scaled for narrower types.
    fn normalization_tolerance() -> Self {
        let eps = Self::epsilon();
        let tol = Self::from_f64_lossy(1e-12);
        if tol > eps * Self::from_f64_lossy(64.0) {
            tol
        } else {
            eps * Self::from_f64_lossy(4096.0)
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Integer power without going through `powf`, so that `0^0 = 1` and results
/// are reproducible across platforms.
pub fn powi<T: Real>(base: T, exp: usize) -> T {
    let mut acc = T::one();
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        e >>= 1;
    }
    acc
}

/// Binomial coefficient as a real number, computed multiplicatively.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_count(n - i) / T::from_count(i + 1);
    }
    acc.round()
}

/// Exact binomial coefficient; `None` on overflow.
pub fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_multiplication() {
        assert_eq!(powi(0.0f64, 0), 1.0);
        assert_eq!(powi(2.0f64, 10), 1024.0);
        assert!((powi(0.999f64, 3) - 0.999 * 0.999 * 0.999).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(13, 4), 715.0);
        assert_eq!(binomial::<f64>(26, 13), 10400600.0);
        assert_eq!(binomial_u128(26, 2), Some(325));
        assert_eq!(binomial_u128(3, 5), Some(0));
    }

    #[test]
    fn tolerance_scales_with_precision() {
        assert_eq!(f64::normalization_tolerance(), 1e-12);
        assert!(f32::normalization_tolerance() > 1e-5);
    }
}
