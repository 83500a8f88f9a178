//! Scalar abstractions.
//!
//! Geometry, lattices and tiling are computed over an [`ExactScalar`] (an
//! ordered field with exact arithmetic); the spectral side runs over a
//! floating-point [`Real`].

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed, ToPrimitive};

/// Exact ordered field used for every geometric and lattice computation.
///
/// Implemented for `BigRational` (the default, see [`crate::Rational`]) and for
/// machine-word rationals `Ratio<i64>`, which are faster but may overflow on
/// large instances.
pub trait ExactScalar:
    Clone + Debug + Display + FromStr + Ord + Hash + Num + Signed + ToPrimitive + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_fraction(numer: i64, denom: i64) -> Self {
        Self::from_i64(numer) / Self::from_i64(denom)
    }

    /// Largest integer not greater than `self`.
    fn floor_i64(&self) -> i64;

    /// Smallest integer not less than `self`.
    fn ceil_i64(&self) -> i64;

    /// Denominator in lowest terms, if it fits in a `u64`.
    fn denominator_u64(&self) -> Option<u64>;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_integer_valued(&self) -> bool {
        self.denominator_u64() == Some(1)
    }

    fn half() -> Self {
        Self::from_fraction(1, 2)
    }
}

impl ExactScalar for BigRational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("coordinate out of i64 range")
    }

    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer().to_i64().expect("coordinate out of i64 range")
    }

    fn denominator_u64(&self) -> Option<u64> {
        self.denom().to_u64()
    }
}

impl ExactScalar for Ratio<i64> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer()
    }

    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer()
    }

    fn denominator_u64(&self) -> Option<u64> {
        u64::try_from(*self.denom()).ok()
    }
}

/// Parse `"p/q"` or `"p"` into an exact scalar.
pub fn parse_exact<S: ExactScalar>(text: &str) -> Option<S> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return None;
    }
    match trimmed.split_once('/') {
        Some((n, d)) => {
            let n = S::from_str(n.trim()).ok()?;
            let d = S::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(n / d)
            }
        }
        None => S::from_str(trimmed).ok(),
    }
}

/// Least common multiple of the denominators of `values`.
pub fn lcm_of_denominators<'a, S: ExactScalar>(values: impl IntoIterator<Item = &'a S>) -> Option<u64> {
    let mut acc: u64 = 1;
    for v in values {
        let d = v.denominator_u64()?;
        acc = acc.lcm(&d);
    }
    Some(acc)
}

/// Floating-point scalar for profile matrices and the discrete transform.
pub trait Real: nalgebra::RealField + Copy + Into<f64> + Send + Sync {
    fn cast(v: f64) -> Self {
        nalgebra::convert(v)
    }

    fn from_exact<S: ExactScalar>(v: &S) -> Self {
        Self::cast(v.to_f64_lossy())
    }
}

impl<T> Real for T where T: nalgebra::RealField + Copy + Into<f64> + Send + Sync {}
