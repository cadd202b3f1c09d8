//! Scalar traits the generic containers are written against.
//!
//! Everything exact: [`Scalar`] covers rings of coefficients (integers,
//! rationals), [`IntegerScalar`] adds the Euclidean structure needed by the
//! normal-form routines.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};

/// Exact commutative coefficient ring.
pub trait Scalar:
    Num
    + Clone
    + Debug
    + Display
    + FromPrimitive
    + Signed
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Send
    + Sync
{
    fn from_int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("scalar must represent every i64")
    }

    /// Numerator/denominator strings used by the JSON term encoding.
    fn num_den(&self) -> (String, String);
}

/// Exact Euclidean integers.
pub trait IntegerScalar: Scalar + Integer + Ord + Hash {
    fn to_bigint(&self) -> BigInt;
}

impl Scalar for BigInt {
    fn num_den(&self) -> (String, String) {
        (self.to_string(), "1".to_string())
    }
}

impl IntegerScalar for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

impl Scalar for BigRational {
    fn num_den(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}

impl Scalar for i64 {
    fn num_den(&self) -> (String, String) {
        (self.to_string(), "1".to_string())
    }
}

impl IntegerScalar for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for i128 {
    fn num_den(&self) -> (String, String) {
        (self.to_string(), "1".to_string())
    }
}

impl IntegerScalar for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for num_rational::Rational64 {
    fn num_den(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}
