//! Scalar abstraction shared by every distance computation.
//!
//! Certification paths run on [`Rational`] (arbitrary-precision `p/q`), where
//! every sum and comparison is exact. The same code also runs on `f64` for
//! numeric spot checks that do not certify anything.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};

use crate::error::Error;

/// Number type a metric space can be built over.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + FromPrimitive + Send + Sync
{
    /// `self / 2^k`.
    fn halve_n(&self, k: u32) -> Self {
        let mut out = self.clone();
        let two = Self::one() + Self::one();
        for _ in 0..k {
            out = out / two.clone();
        }
        out
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + PartialOrd + Num + FromPrimitive + Send + Sync
{
}

/// Exact rational in canonical form (`gcd(p, q) = 1`, `q > 0`).
pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"` exactly. Whitespace around the text is ignored;
/// decimal and exponent notation are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let trimmed = text.trim();
    let bad = || Error::ParseScalar {
        text: text.to_string(),
    };
    let (num, den) = match trimmed.split_once('/') {
        Some((p, q)) => (p, q),
        None => (trimmed, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Serde adapter storing a [`Rational`] as its `"p/q"` string.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_rational`] for `Option<Rational>`.
pub mod serde_rational_opt {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&format_rational(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}
