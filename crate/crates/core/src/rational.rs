//! Exact rational scalars for measure arithmetic.
//!
//! Set endpoints, weights and measures are kept as `BigRational` so that the
//! dyadic endpoints of the Cantor construction and all `mu` values stay exact.
//! Conversion to `f64` happens once, at the boundary to the optimization code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

/// Exact rational scalar.
pub type Rat = BigRational;

/// `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "rational with zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer rational.
pub fn rat_int(p: i64) -> Rat {
    BigRational::from_integer(BigInt::from(p))
}

/// `2^-k` as an exact rational, `k >= 0`.
pub fn dyadic(k: u32) -> Rat {
    BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k))
}

/// Lossy conversion for the optimization layer.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Exact rational from a float (every finite `f64` is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Rat {
    BigRational::from_float(x).expect("finite float")
}

/// Exact rational from a small-denominator decimal-free `f64` is deliberately
/// not provided; tests build rationals from integers instead.
pub fn max_rat(a: Rat, b: Rat) -> Rat {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min_rat(a: Rat, b: Rat) -> Rat {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn abs_rat(a: &Rat) -> Rat {
    a.abs()
}

pub fn is_zero(a: &Rat) -> bool {
    a.is_zero()
}

/// Parses "p/q" or "p" into an exact rational. Used by the JSON schemas,
/// where rationals travel as strings.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator {p:?}: {e}"))?;
            let q =
                BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator {q:?}: {e}"))?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p = BigInt::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}"))?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// Renders a rational as "p/q" (or "p" when integral).
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Wrapper giving `Rat` the string-based serde encoding used by the CLI
/// config schemas (`"3/8"`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatStr(pub Rat);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map(RatStr).map_err(D::Error::custom)
    }
}
