//! Named irrationals in `(0, 1)` with rigorous dyadic enclosures at any
//! requested precision.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{big, int, ExactScalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedConstant {
    /// `pi - 3 = [0; 7, 15, 1, 292, ...]`
    PiMinus3,
    /// `2 - sqrt(2) = [0; 1, 1, 2, 2, ...]`
    TwoMinusSqrt2,
    /// `sqrt(2) - 1 = [0; 2, 2, 2, ...]`
    Sqrt2Minus1,
    /// `(sqrt(5) - 1) / 2 = [0; 1, 1, 1, ...]`
    Golden,
    /// Fractional part of `sqrt(n)` for a non-square `n`.
    SqrtFrac(u32),
}

/// Closed interval `[lo, hi]` with rational endpoints known to contain a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: ExactScalar,
    pub hi: ExactScalar,
}

impl Enclosure {
    pub fn point(x: ExactScalar) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn midpoint(&self) -> ExactScalar {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn radius(&self) -> ExactScalar {
        (&self.hi - &self.lo) / int(2)
    }

    pub fn contains(&self, x: &ExactScalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown constant `{0}` (expected pi-3, 2-sqrt2, sqrt2-1, golden or sqrtN)")]
pub struct UnknownConstant(pub String);

impl FromStr for NamedConstant {
    type Err = UnknownConstant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "pi-3" => Ok(NamedConstant::PiMinus3),
            "2-sqrt2" => Ok(NamedConstant::TwoMinusSqrt2),
            "sqrt2-1" => Ok(NamedConstant::Sqrt2Minus1),
            "golden" | "phi" => Ok(NamedConstant::Golden),
            _ => {
                let n = t
                    .strip_prefix("sqrt")
                    .and_then(|r| r.parse::<u32>().ok())
                    .filter(|&n| n >= 2 && n.sqrt() * n.sqrt() != n)
                    .ok_or_else(|| UnknownConstant(s.to_string()))?;
                Ok(NamedConstant::SqrtFrac(n))
            }
        }
    }
}

impl fmt::Display for NamedConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedConstant::PiMinus3 => write!(f, "pi-3"),
            NamedConstant::TwoMinusSqrt2 => write!(f, "2-sqrt2"),
            NamedConstant::Sqrt2Minus1 => write!(f, "sqrt2-1"),
            NamedConstant::Golden => write!(f, "golden"),
            NamedConstant::SqrtFrac(n) => write!(f, "sqrt{n}"),
        }
    }
}

impl NamedConstant {
    /// Dyadic enclosure of width at most `2^(1 - bits)`.
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        let scale = BigInt::one() << bits;
        let scale_q = big(&scale);
        match *self {
            NamedConstant::PiMinus3 => {
                let (lo, hi) = pi_enclosure(bits + 32);
                let lo = (lo * &scale_q).floor() / &scale_q - int(3);
                let hi = (hi * &scale_q).ceil() / &scale_q - int(3);
                Enclosure { lo, hi }
            }
            NamedConstant::TwoMinusSqrt2 => {
                let s = isqrt_scaled(2, bits);
                Enclosure {
                    lo: int(2) - big(&(&s + 1u32)) / &scale_q,
                    hi: int(2) - big(&s) / &scale_q,
                }
            }
            NamedConstant::Sqrt2Minus1 => {
                let s = isqrt_scaled(2, bits);
                Enclosure {
                    lo: big(&s) / &scale_q - int(1),
                    hi: big(&(&s + 1u32)) / &scale_q - int(1),
                }
            }
            NamedConstant::Golden => {
                let s = isqrt_scaled(5, bits);
                let den = &scale_q * int(2);
                Enclosure {
                    lo: big(&(&s - &scale)) / &den,
                    hi: big(&(&s + 1u32 - &scale)) / &den,
                }
            }
            NamedConstant::SqrtFrac(n) => {
                let s = isqrt_scaled(n, bits);
                let whole = int(i64::from(n.sqrt()));
                Enclosure {
                    lo: big(&s) / &scale_q - &whole,
                    hi: big(&(&s + 1u32)) / &scale_q - whole,
                }
            }
        }
    }
}

/// `floor(sqrt(n) * 2^bits)`.
fn isqrt_scaled(n: u32, bits: u32) -> BigInt {
    (BigInt::from(n) << (2 * bits)).sqrt()
}

/// Sum of `(-1)^k / ((2k+1) x^(2k+1))` scaled by `scale`, with a bound on the
/// accumulated truncation error in units of `1/scale`.
fn arctan_inv(x: u32, scale: &BigInt) -> (BigInt, u64) {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = scale / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // two floors per term plus the neglected alternating tail
    (sum, 2 * k + 2)
}

/// Rational enclosure of pi via Machin's formula at `2^-bits` resolution.
pub fn pi_enclosure(bits: u32) -> (ExactScalar, ExactScalar) {
    let scale = BigInt::one() << bits;
    let (a5, e5) = arctan_inv(5, &scale);
    let (a239, e239) = arctan_inv(239, &scale);
    let v = a5 * 16 - a239 * 4;
    let err = BigInt::from(16 * e5 + 4 * e239);
    let s = big(&scale);
    (big(&(&v - &err)) / &s, big(&(&v + &err)) / &s)
}
