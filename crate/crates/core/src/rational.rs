//! Arbitrary-precision rationals and the shared `"p/q"` literal format.

use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used everywhere in the engine.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn half() -> Q {
    q(1, 2)
}

/// Reduction into `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// `(x - base) mod 1`, the anticlockwise distance from `base` to `x`.
pub fn offset(base: &Q, x: &Q) -> Q {
    frac(&(x - base))
}

pub fn floor_int(x: &Q) -> BigInt {
    x.floor().to_integer()
}

/// Parses `"n"` or `"p/q"` (optional leading minus, no decimals).
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    if t.is_empty() || t.contains('.') || t.contains(char::is_whitespace) {
        return Err(bad());
    }
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() || d.is_negative() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Formats in lowest terms as `"n"` or `"p/q"`.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rounds down onto the grid `2^-bits`.
pub fn round_down(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = x * Q::from_integer(scale.clone());
    Q::new(scaled.floor().to_integer(), scale)
}

/// Rounds up onto the grid `2^-bits`.
pub fn round_up(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = x * Q::from_integer(scale.clone());
    Q::new(scaled.ceil().to_integer(), scale)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Size of the largest of numerator and denominator, in bits.
pub fn height_bits(x: &Q) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_q("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_q("0").unwrap(), qi(0));
        assert_eq!(fmt_q(&q(6, 8)), "3/4");
        assert_eq!(fmt_q(&qi(-2)), "-2");
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("1/-2").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn rounding_brackets_value() {
        let x = q(1, 3);
        let lo = round_down(&x, 16);
        let hi = round_up(&x, 16);
        assert!(lo <= x && x <= hi);
        assert!(&hi - &lo <= q(1, 1 << 16));
    }

    #[test]
    fn frac_and_offset() {
        assert_eq!(frac(&q(5, 4)), q(1, 4));
        assert_eq!(frac(&q(-1, 3)), q(2, 3));
        assert_eq!(offset(&q(3, 4), &q(1, 4)), half());
    }
}
