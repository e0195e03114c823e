//! Scalar abstractions shared by the exact and the numeric halves of the crate.
//!
//! The exact modules are generic over an integer type implementing
//! [`ExactInt`]; arbitrary precision ([`num_bigint::BigInt`]) is the default
//! used by the crate-root aliases, while `i64`/`i128` are accepted for callers
//! that can bound their inputs. The numeric modules are generic over [`Real`]
//! (`f32` or `f64`).

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, Signed, ToPrimitive};

/// Integer types usable by the exact modules.
pub trait ExactInt:
    num_integer::Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Converts a machine integer; panics only if the type cannot hold it.
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("integer does not fit the chosen ExactInt type")
    }
}

impl<T> ExactInt for T where
    T: num_integer::Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// Floating point types usable by the numeric modules.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 constant representable")
    }

    /// Lossless-enough conversion to `f64`, used for reports.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for identities that hold exactly in real arithmetic.
    fn identity_tol() -> Self {
        let eps = Self::epsilon() * Self::of(64.0);
        if eps > Self::of(1e-12) {
            eps
        } else {
            Self::of(1e-12)
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn roundtrip<I: ExactInt>() -> I {
        I::from_i64_exact(-7) * I::from_i64_exact(3)
    }

    #[test]
    fn exact_ints_cover_machine_and_big() {
        assert_eq!(roundtrip::<i64>(), -21);
        assert_eq!(roundtrip::<i128>(), -21);
        assert_eq!(roundtrip::<BigInt>(), BigInt::from(-21));
    }

    #[test]
    fn identity_tol_scales_with_precision() {
        assert_eq!(f64::identity_tol(), 1e-12);
        assert!(f32::identity_tol() > 1e-6);
    }
}
