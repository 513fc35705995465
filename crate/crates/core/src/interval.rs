//! Outward-rounded `f64` intervals and rigorous sine enclosures at rational
//! multiples of pi.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::ExactScalar;

/// Closed interval `[lo, hi]`; inexact operations round outward by one ulp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

/// Rounding error of `a + b` (TwoSum).
fn sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

/// Directed result from a round-to-nearest value and the sign of its error.
fn directed(s: f64, err: f64, upward: bool) -> f64 {
    if !s.is_finite() || err.is_nan() {
        if upward {
            up(s)
        } else {
            down(s)
        }
    } else if upward && err > 0.0 {
        up(s)
    } else if !upward && err < 0.0 {
        down(s)
    } else {
        s
    }
}

fn add_dir(a: f64, b: f64, upward: bool) -> f64 {
    let s = a + b;
    directed(s, sum_err(a, b, s), upward)
}

fn mul_dir(a: f64, b: f64, upward: bool) -> f64 {
    let p = a * b;
    directed(p, a.mul_add(b, -p), upward)
}

fn div_dir(a: f64, b: f64, upward: bool) -> f64 {
    let r = a / b;
    // a - r b is exact, and the quotient error has its sign times sign(b)
    let rem = (-r).mul_add(b, a);
    directed(r, if b > 0.0 { rem } else { -rem }, upward)
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn pi() -> Self {
        // the nearest double lies below pi
        Interval::new(std::f64::consts::PI, up(std::f64::consts::PI))
    }

    /// Rigorous enclosure of `num/den` (`den > 0`, not necessarily reduced).
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        debug_assert!(den.is_positive());
        if num.is_zero() {
            return Interval::ZERO;
        }
        // scale so the quotient carries about 80 significant bits
        let shift = 80i64 - (num.bits() as i64 - den.bits() as i64);
        let (n, d) = if shift >= 0 {
            (num << shift as usize, den.clone())
        } else {
            (num.clone(), den << (-shift) as usize)
        };
        let q = n.div_floor(&d);
        let scale = 2f64.powi(-(shift as i32));
        let qlo = down(q.to_f64().expect("finite"));
        let qhi = up((&q + 1u32).to_f64().expect("finite"));
        Interval::new(down(qlo * scale), up(qhi * scale))
    }

    pub fn from_scalar(x: &ExactScalar) -> Self {
        Self::from_ratio(x.numer(), x.denom())
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval::new(mul_dir(a.lo, a.lo, false).max(0.0), mul_dir(a.hi, a.hi, true))
    }

    /// Quotient; panics when the divisor contains zero.
    pub fn div(&self, other: &Interval) -> Interval {
        assert!(other.lo > 0.0 || other.hi < 0.0, "division by an interval containing 0");
        let pairs = [
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        ];
        Interval::new(
            pairs.iter().map(|&(a, b)| div_dir(a, b, false)).fold(f64::INFINITY, f64::min),
            pairs.iter().map(|&(a, b)| div_dir(a, b, true)).fold(f64::NEG_INFINITY, f64::max),
        )
    }

    pub fn recip(&self) -> Interval {
        Interval::ONE.div(self)
    }

    pub fn scale(&self, c: f64) -> Interval {
        *self * Interval::point(c)
    }

    pub fn clamp(&self, lo: f64, hi: f64) -> Interval {
        Interval::new(self.lo.max(lo).min(hi), self.hi.min(hi).max(lo))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(add_dir(self.lo, o.lo, false), add_dir(self.hi, o.hi, true))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::new(add_dir(self.lo, -o.hi, false), add_dir(self.hi, -o.lo, true))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        Interval::new(
            pairs.iter().map(|&(a, b)| mul_dir(a, b, false)).fold(f64::INFINITY, f64::min),
            pairs.iter().map(|&(a, b)| mul_dir(a, b, true)).fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Enclosure of `sin(y)` at a single point `0 <= y <= 2` via a Taylor
/// polynomial with a Lagrange remainder.
fn sin_point(y: f64) -> Interval {
    const TERMS: i32 = 12;
    let yi = Interval::point(y);
    let y2 = yi.sqr();
    let mut term = yi;
    let mut sum = yi;
    for k in 1..TERMS {
        let denom = Interval::point(((2 * k) * (2 * k + 1)) as f64);
        term = (term * y2).div(&denom);
        sum = if k % 2 == 1 { sum - term } else { sum + term };
    }
    let rem = (term * y2).div(&Interval::point(((2 * TERMS) * (2 * TERMS + 1)) as f64)).abs();
    Interval::new(down(sum.lo - rem.hi), up(sum.hi + rem.hi))
}

/// Enclosure of `sin(pi * num / den)` for `den > 0`.
pub fn sin_pi_ratio(num: &BigInt, den: &BigInt) -> Interval {
    let two_den = den << 1u32;
    let mut r = num.mod_floor(&two_den);
    let mut sign = 1.0;
    if &r >= den {
        r -= den;
        sign = -1.0;
    }
    // r/den in [0, 1); fold to [0, 1/2]
    if (&r << 1u32) > *den {
        r = den - r;
    }
    if r.is_zero() {
        return Interval::ZERO;
    }
    if (&r << 1u32) == *den {
        return Interval::point(sign);
    }
    let y = Interval::from_ratio(&r, den) * Interval::pi();
    let lo = sin_point(y.lo.max(0.0)).lo.max(0.0);
    let hi = if y.hi >= std::f64::consts::FRAC_PI_2 {
        1.0
    } else {
        sin_point(y.hi).hi.min(1.0)
    };
    let s = Interval::new(lo.min(hi), hi);
    if sign < 0.0 {
        -s
    } else {
        s
    }
}

/// Enclosure of `sin(pi x)`.
pub fn sin_pi(x: &ExactScalar) -> Interval {
    sin_pi_ratio(x.numer(), x.denom())
}

/// Enclosure of `cos(pi x)`.
pub fn cos_pi(x: &ExactScalar) -> Interval {
    sin_pi(&(x + crate::exact::half()))
}
