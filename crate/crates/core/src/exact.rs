//! Exact rational scalars and the circle helpers built on them.
//!
//! Every quantity in this crate that lives on the circle `[0, 1)` or on the
//! real line is an [`ExactScalar`], an arbitrary-precision rational kept in
//! lowest terms with a positive denominator. No operation here rounds.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational; the substrate for all exact computation.
pub type ExactScalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseScalarError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> ExactScalar {
    ExactScalar::from_integer(BigInt::from(n))
}

pub fn big(n: &BigInt) -> ExactScalar {
    ExactScalar::from_integer(n.clone())
}

/// `num/den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> ExactScalar {
    ExactScalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn half() -> ExactScalar {
    ratio(1, 2)
}

/// Fractional part `{x}` in `[0, 1)`.
pub fn frac(x: &ExactScalar) -> ExactScalar {
    x - x.floor()
}

/// Distance to the nearest integer, `min({x}, 1 - {x})`, in `[0, 1/2]`.
pub fn norm_dist(x: &ExactScalar) -> ExactScalar {
    let f = frac(x);
    let g = ExactScalar::one() - &f;
    if f <= g {
        f
    } else {
        g
    }
}

/// Representative of `x mod 1` in `[-1/2, 1/2)`.
pub fn fold(x: &ExactScalar) -> ExactScalar {
    let h = half();
    let shifted = frac(&(x + &h));
    shifted - h
}

/// Nearest integer `t` and sign `eps` with `x = t + eps * ||x||`.
///
/// When `x` is a half-integer the representation is not unique; the lower
/// integer is taken with `eps = +1`. When `||x|| = 0` the sign is `+1`.
pub fn nearest_split(x: &ExactScalar) -> (BigInt, i8) {
    let fl = x.floor();
    let f = x - &fl;
    let fl = fl.to_integer();
    if f <= half() {
        (fl, 1)
    } else {
        (fl + 1, -1)
    }
}

/// Least common multiple of the denominators of the given scalars.
pub fn common_denominator<'a, I>(xs: I) -> BigInt
where
    I: IntoIterator<Item = &'a ExactScalar>,
{
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Numerator of `x` over the (multiple) denominator `den`. Panics in debug
/// builds if `den` is not a multiple of the denominator of `x`.
pub fn scaled_numerator(x: &ExactScalar, den: &BigInt) -> BigInt {
    debug_assert!((den % x.denom()).is_zero());
    x.numer() * (den / x.denom())
}

pub fn is_integer(x: &ExactScalar) -> bool {
    x.denom().is_one()
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.125` exactly.
pub fn parse_scalar(s: &str) -> Result<ExactScalar, ParseScalarError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| ParseScalarError::Invalid(s.into()))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| ParseScalarError::Invalid(s.into()))?;
        if d.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(s.into()));
        }
        return Ok(ExactScalar::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let negative = ip.trim_start().starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit())
            || !ip_digits.chars().all(|c| c.is_ascii_digit())
            || (ip_digits.is_empty() && fp.is_empty())
        {
            return Err(ParseScalarError::Invalid(s.into()));
        }
        let digits = format!("{}{}", ip_digits, fp);
        let mag = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| ParseScalarError::Invalid(s.into()))?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = ExactScalar::new(mag, den);
        return Ok(if negative { -v } else { v });
    }
    BigInt::from_str(s)
        .map(ExactScalar::from_integer)
        .map_err(|_| ParseScalarError::Invalid(s.into()))
}

/// `p/q` rendering (integers render without a denominator).
pub fn to_fraction_string(x: &ExactScalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering. Terminating expansions of at most `max_exact_digits`
/// fractional digits are printed exactly; anything else is rounded half away
/// from zero to `round_digits` fractional digits.
pub fn to_decimal_string(x: &ExactScalar, max_exact_digits: usize, round_digits: usize) -> String {
    if let Some(d) = terminating_digits(x.denom()) {
        if d <= max_exact_digits {
            return decimal_with_digits(x, d);
        }
    }
    decimal_with_digits(x, round_digits)
}

/// Number of fractional decimal digits of `1/den`, if it terminates.
fn terminating_digits(den: &BigInt) -> Option<usize> {
    let mut d = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

fn decimal_with_digits(x: &ExactScalar, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x.abs() * ExactScalar::from_integer(scale.clone());
    let r = scaled.round().to_integer();
    let (ip, fp) = r.div_rem(&scale);
    let sign = if x.is_negative() && !r.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{ip}");
    }
    let fp = fp.to_string();
    let mut frac_digits = "0".repeat(digits - fp.len());
    frac_digits.push_str(&fp);
    let trimmed = frac_digits.trim_end_matches('0');
    if trimmed.is_empty() {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{trimmed}")
    }
}

/// Lossy conversion for display and plotting.
pub fn to_f64(x: &ExactScalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_scalar {
    //! Serialize an [`ExactScalar`](super::ExactScalar) as a `p/q` string.
    use super::{parse_scalar, to_fraction_string, ExactScalar};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ExactScalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactScalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_big {
    //! Serialize a `BigInt` as a decimal string.
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_big_vec {
    //! Serialize a `Vec<BigInt>` as decimal strings.
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| BigInt::from_str(x).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_big_opt {
    //! Serialize an `Option<BigInt>` as an optional decimal string.
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(|v| v.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|x| BigInt::from_str(&x).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_dist_examples() {
        assert_eq!(norm_dist(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(norm_dist(&ratio(7, 4)), ratio(1, 4));
        assert_eq!(norm_dist(&ratio(-1, 3)), ratio(1, 3));
        assert_eq!(norm_dist(&int(5)), int(0));
    }

    #[test]
    fn fold_is_half_open() {
        assert_eq!(fold(&ratio(1, 2)), ratio(-1, 2));
        assert_eq!(fold(&ratio(3, 4)), ratio(-1, 4));
        assert_eq!(fold(&ratio(-7, 5)), ratio(-2, 5));
    }

    #[test]
    fn nearest_split_reconstructs() {
        for (n, d) in [(7, 3), (-5, 4), (9, 2), (3, 1), (-1, 6)] {
            let x = ratio(n, d);
            let (t, e) = nearest_split(&x);
            assert_eq!(big(&t) + int(e as i64) * norm_dist(&x), x);
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_scalar(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("42").unwrap(), int(42));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal_string(&ratio(1, 8), 64, 10), "0.125");
        assert_eq!(to_decimal_string(&ratio(-3, 2), 64, 10), "-1.5");
        assert_eq!(to_decimal_string(&ratio(1, 3), 64, 5), "0.33333");
        assert_eq!(to_decimal_string(&ratio(2, 3), 64, 5), "0.66667");
        assert_eq!(to_decimal_string(&int(-4), 64, 5), "-4");
    }
}
