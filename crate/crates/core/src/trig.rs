//! Real trigonometric polynomials with exact amplitudes and phases.
//!
//! A polynomial is a constant plus terms `amp * cos(2 pi (freq x + phase))`.
//! Each term is normalized to `freq >= 1` and `phase` in `[0, 1/2)`, flipping
//! the amplitude sign when the phase moves by a half turn. Rotations and
//! finite ergodic sums are therefore exact, and algebraic cancellations show
//! up as an empty term list.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{big, frac, half, int, ExactScalar};
use crate::interval::{cos_pi, sin_pi, sin_pi_ratio, Interval};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrigTerm {
    pub freq: BigInt,
    pub amp: ExactScalar,
    pub phase: ExactScalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrigPolynomial {
    constant: ExactScalar,
    /// Keyed by `(freq, phase)`.
    terms: BTreeMap<(BigInt, ExactScalar), ExactScalar>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactScalar) -> Self {
        TrigPolynomial {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    /// `amp * cos(2 pi (freq x + phase))`.
    pub fn cosine(freq: BigInt, amp: ExactScalar, phase: ExactScalar) -> Self {
        let mut p = Self::zero();
        p.push(freq, amp, phase);
        p
    }

    /// `amp * sin(2 pi freq x)`.
    pub fn sine(freq: BigInt, amp: ExactScalar) -> Self {
        // sin t = cos(t - pi/2) = -cos(t + pi/2)
        Self::cosine(freq, -amp, ExactScalar::new(BigInt::one(), BigInt::from(4)))
    }

    fn push(&mut self, freq: BigInt, amp: ExactScalar, phase: ExactScalar) {
        if amp.is_zero() {
            return;
        }
        let (freq, phase) = if freq.is_negative() {
            (-freq, -phase)
        } else {
            (freq, phase)
        };
        if freq.is_zero() {
            // cos(2 pi phase) is only rational at a few phases
            let c = frac(&phase);
            let v = if c.is_zero() {
                int(1)
            } else if c == half() {
                int(-1)
            } else if c == ExactScalar::new(BigInt::one(), BigInt::from(4))
                || c == ExactScalar::new(BigInt::from(3), BigInt::from(4))
            {
                int(0)
            } else {
                panic!("constant term with irrational cosine");
            };
            self.constant += amp * v;
            return;
        }
        let mut ph = frac(&phase);
        let mut amp = amp;
        if ph >= half() {
            ph -= half();
            amp = -amp;
        }
        let key = (freq, ph);
        let entry = self.terms.entry(key.clone()).or_insert_with(ExactScalar::zero);
        *entry += amp;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = TrigTerm> + '_ {
        self.terms.iter().map(|((f, p), a)| TrigTerm {
            freq: f.clone(),
            amp: a.clone(),
            phase: p.clone(),
        })
    }

    pub fn constant_term(&self) -> &ExactScalar {
        &self.constant
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True when no term survives and the constant is zero; this certifies
    /// the zero function.
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn max_freq(&self) -> Option<BigInt> {
        self.terms.keys().map(|(f, _)| f.clone()).max()
    }

    /// Distinct frequencies, ascending.
    pub fn frequencies(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self.terms.keys().map(|(f, _)| f.clone()).collect();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for ((f, p), a) in &other.terms {
            out.push(f.clone(), a.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::constant(&self.constant * c);
        for ((f, p), a) in &self.terms {
            out.push(f.clone(), a * c, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// `x -> p(x + gamma)`.
    pub fn rotate(&self, gamma: &ExactScalar) -> Self {
        let mut out = Self::constant(self.constant.clone());
        for ((f, p), a) in &self.terms {
            out.push(f.clone(), a.clone(), p + big(f) * gamma);
        }
        out
    }

    /// Exact ergodic sum `sum_{j < n} p(x + j alpha)` for `n >= 0`.
    pub fn ergodic_sum(&self, alpha: &ExactScalar, n: u64) -> Self {
        let mut out = Self::constant(&self.constant * int(n as i64));
        for ((f, p), a) in &self.terms {
            let step = frac(&(big(f) * alpha));
            let mut ph = frac(p);
            for _ in 0..n {
                out.push(f.clone(), a.clone(), ph.clone());
                ph += &step;
                if ph >= int(1) {
                    ph -= int(1);
                }
            }
        }
        out
    }

    /// Enclosure of `p(x)`.
    pub fn eval(&self, x: &ExactScalar) -> Interval {
        let mut acc = Interval::from_scalar(&self.constant);
        for ((f, p), a) in &self.terms {
            let arg = (big(f) * x + p) * int(2);
            acc = acc + Interval::from_scalar(a) * cos_pi(&arg);
        }
        acc
    }

    /// Complex Fourier coefficient at each positive frequency, enclosed
    /// componentwise: `c_r = sum amp/2 * e^(2 pi i phase)`.
    pub fn coefficients(&self) -> Vec<(BigInt, Interval, Interval)> {
        let mut out: Vec<(BigInt, Interval, Interval)> = Vec::new();
        for ((f, p), a) in &self.terms {
            let amp = Interval::from_scalar(&(a * half()));
            let re = amp * cos_pi(&(p * int(2)));
            let im = amp * sin_pi(&(p * int(2)));
            match out.last_mut() {
                Some(last) if &last.0 == f => {
                    last.1 = last.1 + re;
                    last.2 = last.2 + im;
                }
                _ => out.push((f.clone(), re, im)),
            }
        }
        out
    }

    /// Enclosure of the squared L2 norm.
    pub fn l2_norm_sq(&self) -> Interval {
        let mut acc = Interval::from_scalar(&self.constant).sqr();
        for (_, re, im) in self.coefficients() {
            acc = acc + (re.sqr() + im.sqr()).scale(2.0);
        }
        acc
    }

    /// Enclosure of `||p^(q)||_2^2` from the coefficients, without
    /// expanding the ergodic sum.
    pub fn ergodic_norm_sq(&self, alpha: &ExactScalar, q: u64) -> Interval {
        let c = Interval::from_scalar(&(&self.constant * int(q as i64))).sqr();
        let mut acc = c;
        for (f, re, im) in self.coefficients() {
            let k = dirichlet_sq(&(big(&f) * alpha), q);
            acc = acc + ((re.sqr() + im.sqr()) * k).scale(2.0);
        }
        acc
    }
}

/// Enclosure of `|sum_{j<q} e^(2 pi i j x)|^2 = (sin(pi q x) / sin(pi x))^2`.
pub fn dirichlet_sq(x: &ExactScalar, q: u64) -> Interval {
    let num = x.numer();
    let den = x.denom();
    dirichlet_sq_ratio(num, den, q)
}

/// As [`dirichlet_sq`] for `x = num/den`.
pub fn dirichlet_sq_ratio(num: &BigInt, den: &BigInt, q: u64) -> Interval {
    let s = sin_pi_ratio(num, den);
    let qq = (q as f64) * (q as f64);
    if s.lo <= 0.0 && s.hi >= 0.0 {
        // x within rounding of an integer: use the trivial bound
        let exact_int = (num % den).is_zero();
        return if exact_int {
            Interval::point(qq)
        } else {
            Interval::new(0.0, qq.next_up())
        };
    }
    let t = sin_pi_ratio(&(num * BigInt::from(q)), den);
    let r = t.sqr().div(&s.sqr());
    r.clamp(0.0, qq.next_up())
}
