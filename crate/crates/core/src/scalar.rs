//! Scalar abstractions.
//!
//! Lattice code runs over an exact field ([`ExactScalar`]); the state-vector
//! simulator runs over a real floating type ([`RealScalar`]).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// An exact ordered field containing the integers.
///
/// All Gram-Schmidt, size-reduction and nearest-plane arithmetic is done in
/// one of these, so results never depend on floating-point drift.
pub trait ExactScalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync {
    fn from_integer(n: &BigInt) -> Self;

    /// Nearest integer with ties rounded away from zero.
    fn round_half_away(&self) -> BigInt;
}

impl ExactScalar for BigRational {
    fn from_integer(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn round_half_away(&self) -> BigInt {
        // `Ratio::round` already rounds half-way cases away from zero.
        self.round().to_integer()
    }
}

/// Fixed-width rationals. Faster than [`BigRational`] for small lattices but
/// panics on overflow, so only suitable when entries stay tiny.
impl ExactScalar for Ratio<i128> {
    fn from_integer(n: &BigInt) -> Self {
        let v = n.to_i128().expect("integer does not fit in i128");
        Ratio::from_integer(v)
    }

    fn round_half_away(&self) -> BigInt {
        BigInt::from(self.round().to_integer())
    }
}

/// Real floating-point scalar used for amplitudes and parameters.
pub trait RealScalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
}

impl<T> RealScalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
}
