//! Continued-fraction data for an irrational rotation number.
//!
//! An irrational `alpha` is represented by a rational approximant together
//! with the number of levels at which the approximant is known to share the
//! partial quotients of the true value. Every index-taking query refuses
//! indices beyond that validated depth.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{Enclosure, NamedConstant, UnknownConstant};
use crate::exact::{big, int, norm_dist, parse_scalar, ExactScalar, ParseScalarError};

/// Closest candidate found by an unsuccessful rigidity-time search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityMiss {
    pub lo: BigInt,
    pub hi: BigInt,
    pub eps: String,
    pub best: BigInt,
    pub best_dist: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error("rational alpha: expansion terminates after {terms} partial quotients, {needed} needed")]
    RationalAlpha { terms: usize, needed: usize },
    #[error("depth {requested} not validatable at {precision_bits} bits (max validatable depth {max_depth})")]
    DepthNotValidated {
        requested: usize,
        precision_bits: u32,
        max_depth: usize,
    },
    #[error("index {index} exceeds validated depth {validated}")]
    BeyondValidated { index: usize, validated: usize },
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    OutOfRange(String),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("invalid quotient list `{0}`")]
    BadQuotients(String),
    #[error(transparent)]
    Unknown(#[from] UnknownConstant),
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
    #[error("invalid search: {0}")]
    InvalidSearch(&'static str),
    #[error("no b in [{}, {}] with ||b alpha|| <= {}; best candidate {} at distance {}", .0.lo, .0.hi, .0.eps, .0.best, .0.best_dist)]
    RigidityNotFound(Box<RigidityMiss>),
}

/// How `alpha` is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaSpec {
    Named(NamedConstant),
    Exact(ExactScalar),
    /// `prefix` followed by `period` repeated forever. An empty period means
    /// the last prefix entry repeats.
    Quotients { prefix: Vec<u64>, period: Vec<u64> },
}

impl AlphaSpec {
    pub fn quotients(prefix: &[u64], period: &[u64]) -> Self {
        AlphaSpec::Quotients {
            prefix: prefix.to_vec(),
            period: period.to_vec(),
        }
    }

    /// The `i`-th partial quotient (1-based) of a quotient-list spec.
    fn quotient_at(prefix: &[u64], period: &[u64], i: usize) -> u64 {
        if i <= prefix.len() {
            return prefix[i - 1];
        }
        if period.is_empty() {
            return *prefix.last().expect("non-empty quotient list");
        }
        period[(i - prefix.len() - 1) % period.len()]
    }
}

impl FromStr for AlphaSpec {
    type Err = CfError;

    /// Accepts a constant name (`pi-3`, `golden`, ...), an exact number
    /// (`13/31`, `0.4142`), or a quotient list `cf:3,2,(2)` whose
    /// parenthesised tail is the period.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(body) = t
            .strip_prefix("cf:")
            .or_else(|| t.strip_prefix('[').and_then(|r| r.strip_suffix(']')))
        {
            return parse_quotients(body).ok_or_else(|| CfError::BadQuotients(s.to_string()));
        }
        match t.parse::<NamedConstant>() {
            Ok(c) => Ok(AlphaSpec::Named(c)),
            Err(unknown) => parse_scalar(t)
                .map(AlphaSpec::Exact)
                .map_err(|_| CfError::Unknown(unknown)),
        }
    }
}

fn parse_quotients(body: &str) -> Option<AlphaSpec> {
    let (head, period) = match body.find('(') {
        Some(i) => {
            let rest = body[i + 1..].trim().strip_suffix(')')?;
            (&body[..i], rest)
        }
        None => (body, ""),
    };
    let nums = |s: &str| -> Option<Vec<u64>> {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<u64>().ok().filter(|&v| v >= 1))
            .collect()
    };
    let prefix = nums(head)?;
    let period = nums(period)?;
    if prefix.is_empty() && period.is_empty() {
        return None;
    }
    Some(AlphaSpec::Quotients { prefix, period })
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Named(c) => write!(f, "{c}"),
            AlphaSpec::Exact(x) => write!(f, "{}", crate::exact::to_fraction_string(x)),
            AlphaSpec::Quotients { prefix, period } => {
                let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                write!(f, "cf:{}", join(prefix))?;
                if !period.is_empty() {
                    if !prefix.is_empty() {
                        write!(f, ",")?;
                    }
                    write!(f, "({})", join(period))?;
                }
                Ok(())
            }
        }
    }
}

/// Partial quotients `a_1, a_2, ...` of `x` in `(0, 1)`, computed exactly.
pub fn partial_quotients(x: &ExactScalar) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    // x = num/den in (0,1); a_1 = floor(den/num), ...
    while !num.is_zero() {
        let (a, r) = den.div_rem(&num);
        out.push(a);
        den = num;
        num = r;
    }
    out
}

/// Convergent pairs `(p_k, q_k)` for `k = 0..=a.len()`.
pub fn convergents(a: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::zero(), BigInt::one());
    out.push((p.clone(), q.clone()));
    for ak in a {
        let pn = ak * &p + &p_prev;
        let qn = ak * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Exact value of `[0; a_1, ..., a_m]`.
pub fn from_quotients(a: &[BigInt]) -> ExactScalar {
    let mut x = ExactScalar::zero();
    for ak in a.iter().rev() {
        x = (big(ak) + x).recip();
    }
    x
}

/// Validated continued-fraction data of an irrational in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFExpansion {
    #[serde(with = "crate::exact::serde_scalar")]
    pub approximant: ExactScalar,
    pub precision_bits: u32,
    /// `a_1..a_N`.
    #[serde(with = "crate::exact::serde_big_vec")]
    pub partial_quotients: Vec<BigInt>,
    /// `(p_k, q_k)` for `k = 0..=N`.
    pub convergents: Vec<(BigInt, BigInt)>,
    pub validated_depth: usize,
}

impl CFExpansion {
    /// Expansion of an exact rational approximant whose first
    /// `validated_depth + 1` partial quotients are trusted.
    fn from_approximant(approximant: ExactScalar, precision_bits: u32, validated_depth: usize) -> Self {
        let partial_quotients = partial_quotients(&approximant);
        let convergents = convergents(&partial_quotients);
        CFExpansion {
            approximant,
            precision_bits,
            partial_quotients,
            convergents,
            validated_depth,
        }
    }

    pub fn alpha(&self) -> &ExactScalar {
        &self.approximant
    }

    /// Number of stored partial quotients.
    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    /// Fails unless `n <= validated_depth`.
    pub fn check(&self, n: usize) -> Result<(), CfError> {
        if n > self.validated_depth {
            Err(CfError::BeyondValidated {
                index: n,
                validated: self.validated_depth,
            })
        } else {
            Ok(())
        }
    }

    /// Partial quotient `a_n` for `1 <= n <= len`.
    pub fn a(&self, n: usize) -> &BigInt {
        &self.partial_quotients[n - 1]
    }

    /// `a_n` as a machine integer, saturating at `u64::MAX`.
    pub fn a_u64(&self, n: usize) -> u64 {
        self.a(n).to_u64().unwrap_or(u64::MAX)
    }

    pub fn q(&self, n: usize) -> &BigInt {
        &self.convergents[n].1
    }

    pub fn p(&self, n: usize) -> &BigInt {
        &self.convergents[n].0
    }

    /// `q_n` as a machine integer; panics if it does not fit.
    pub fn q_u64(&self, n: usize) -> u64 {
        self.q(n).to_u64().expect("denominator exceeds u64")
    }

    /// Signed distance `theta_n = q_n alpha - p_n`.
    pub fn theta(&self, n: usize) -> ExactScalar {
        big(self.q(n)) * &self.approximant - big(self.p(n))
    }

    /// `||q_n alpha||`.
    pub fn norm_q_alpha(&self, n: usize) -> ExactScalar {
        self.theta(n).abs()
    }

    pub fn q_is_odd(&self, n: usize) -> bool {
        self.q(n).is_odd()
    }

    /// Largest index `n` with `q_n <= limit`, capped at the validated depth.
    pub fn last_index_with_q_at_most(&self, limit: &BigInt) -> Option<usize> {
        (0..=self.validated_depth.min(self.convergents.len() - 1))
            .take_while(|&n| self.q(n) <= limit)
            .last()
    }

    /// Exact checks of the recurrence, the determinant identity and the
    /// two-sided bounds on `||q_n alpha||` up to the validated depth.
    pub fn verify_invariants(&self) -> Result<(), String> {
        if self.q(0) != &BigInt::one() {
            return Err("q_0 != 1".into());
        }
        if self.validated_depth >= 1 && self.q(1) != self.a(1) {
            return Err("q_1 != a_1".into());
        }
        let mut prev_norm: Option<ExactScalar> = None;
        for n in 1..=self.validated_depth {
            let (p, q) = &self.convergents[n];
            let (pp, qp) = &self.convergents[n - 1];
            if n + 1 < self.convergents.len() {
                let q_next = self.a(n + 1) * q + qp;
                if &q_next != self.q(n + 1) {
                    return Err(format!("recurrence fails at {n}"));
                }
            }
            let det = p * qp - pp * q;
            let expected = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            if det != expected {
                return Err(format!("determinant identity fails at {n}"));
            }
            if n + 1 < self.convergents.len() {
                let norm = self.norm_q_alpha(n);
                let q_next = big(self.q(n + 1));
                if norm > q_next.recip() || norm < (q_next + big(q)).recip() {
                    return Err(format!("distance bounds fail at {n}"));
                }
                let sign_ok = if n % 2 == 0 {
                    self.theta(n).is_positive()
                } else {
                    self.theta(n).is_negative()
                };
                if !sign_ok {
                    return Err(format!("sign of theta fails at {n}"));
                }
                if let Some(prev) = &prev_norm {
                    if &norm >= prev {
                        return Err(format!("distances not decreasing at {n}"));
                    }
                }
                prev_norm = Some(norm);
            }
        }
        Ok(())
    }
}

/// Expands `alpha` and validates at least `depth` levels.
pub fn cf_expand(spec: &AlphaSpec, precision_bits: u32, depth: usize) -> Result<CFExpansion, CfError> {
    if depth == 0 {
        return Err(CfError::ZeroDepth);
    }
    match spec {
        AlphaSpec::Named(c) => {
            let enc = c.enclosure(precision_bits);
            let k = validated_prefix(&enc);
            if k < depth + 1 {
                return Err(CfError::DepthNotValidated {
                    requested: depth,
                    precision_bits,
                    max_depth: k.saturating_sub(1),
                });
            }
            Ok(CFExpansion::from_approximant(enc.midpoint(), precision_bits, k - 1))
        }
        AlphaSpec::Exact(x) => {
            if x <= &ExactScalar::zero() || x >= &ExactScalar::one() {
                return Err(CfError::OutOfRange(crate::exact::to_fraction_string(x)));
            }
            let terms = partial_quotients(x).len();
            if terms < depth + 2 {
                return Err(CfError::RationalAlpha {
                    terms,
                    needed: depth + 2,
                });
            }
            Ok(CFExpansion::from_approximant(x.clone(), precision_bits, terms - 2))
        }
        AlphaSpec::Quotients { prefix, period } => {
            // Two levels beyond the request; one more when the last would be
            // a trailing 1, which the canonical expansion would absorb.
            let mut m = depth + 2;
            if AlphaSpec::quotient_at(prefix, period, m) == 1 {
                m += 1;
            }
            let a: Vec<BigInt> = (1..=m)
                .map(|i| BigInt::from(AlphaSpec::quotient_at(prefix, period, i)))
                .collect();
            Ok(CFExpansion::from_approximant(from_quotients(&a), precision_bits, depth))
        }
    }
}

/// Number of leading partial quotients shared by every point of `enc`.
fn validated_prefix(enc: &Enclosure) -> usize {
    let lo = partial_quotients(&enc.lo);
    let hi = partial_quotients(&enc.hi);
    let common = lo.iter().zip(&hi).take_while(|(x, y)| x == y).count();
    // a cylinder boundary would terminate at `common`; require both to go on
    if lo.len() > common && hi.len() > common {
        common
    } else {
        common.saturating_sub(1)
    }
}

/// `c_n(beta) = ||q_n beta|| / (q_n ||q_n alpha||)`.
pub fn c_ratio(cf: &CFExpansion, beta: &ExactScalar, n: usize) -> Result<ExactScalar, CfError> {
    cf.check(n)?;
    let q = big(cf.q(n));
    Ok(norm_dist(&(&q * beta)) / (q * cf.norm_q_alpha(n)))
}

/// Range of `||x||` over an interval of reals.
pub fn norm_dist_range(lo: &ExactScalar, hi: &ExactScalar) -> Enclosure {
    let a = norm_dist(lo);
    let b = norm_dist(hi);
    let (mut min, mut max) = if a <= b { (a, b) } else { (b, a) };
    let h = crate::exact::half();
    if lo.ceil() <= *hi {
        min = ExactScalar::zero();
    }
    if (lo - &h).ceil() <= hi - &h {
        max = h;
    }
    Enclosure { lo: min, hi: max }
}

/// `c_n(beta)` for a `beta` that is only known to lie in `beta`.
pub fn c_ratio_enclosure(cf: &CFExpansion, beta: &Enclosure, n: usize) -> Result<Enclosure, CfError> {
    cf.check(n)?;
    let q = big(cf.q(n));
    let scale = &q * cf.norm_q_alpha(n);
    let r = norm_dist_range(&(&q * &beta.lo), &(&q * &beta.hi));
    Ok(Enclosure {
        lo: r.lo / &scale,
        hi: r.hi / scale,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlOutcome {
    pub holds_on_range: bool,
    pub first_violation: Option<usize>,
}

/// Checks `||q_n beta|| <= q_n ||q_n alpha|| / 4` for every `n` in `[n0, n1]`.
pub fn kl_test(cf: &CFExpansion, beta: &ExactScalar, n0: usize, n1: usize) -> Result<KlOutcome, CfError> {
    cf.check(n1)?;
    let quarter = ExactScalar::new(BigInt::one(), BigInt::from(4));
    let first_violation = (n0..=n1).find(|&n| {
        let q = big(cf.q(n));
        norm_dist(&(&q * beta)) > &quarter * &q * cf.norm_q_alpha(n)
    });
    Ok(KlOutcome {
        holds_on_range: first_violation.is_none(),
        first_violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityEntry {
    pub n: usize,
    pub parity: Parity,
    /// `a_{n+1}`, the quotient following `q_n`.
    #[serde(with = "crate::exact::serde_big")]
    pub next_quotient: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityProfile {
    pub per_index: Vec<ParityEntry>,
    /// Smallest `n0` such that `q_n` is odd for all `n0 <= n <= upto`.
    pub odd_tail_from: Option<usize>,
    /// Largest `a_{n+1}` over indices with `q_n` even.
    #[serde(with = "crate::exact::serde_big_opt")]
    pub even_q_quotient_sup: Option<BigInt>,
}

pub fn parity_profile(cf: &CFExpansion, upto: usize) -> Result<ParityProfile, CfError> {
    cf.check(upto)?;
    let per_index: Vec<ParityEntry> = (0..=upto)
        .map(|n| ParityEntry {
            n,
            parity: if cf.q_is_odd(n) { Parity::Odd } else { Parity::Even },
            next_quotient: cf.a(n + 1).clone(),
        })
        .collect();
    let odd_tail_from = per_index
        .iter()
        .rposition(|e| e.parity == Parity::Even)
        .map_or(Some(0), |i| (i < upto).then_some(i + 1));
    let even_q_quotient_sup = per_index
        .iter()
        .filter(|e| e.parity == Parity::Even)
        .map(|e| e.next_quotient.clone())
        .max();
    Ok(ParityProfile {
        per_index,
        odd_tail_from,
        even_q_quotient_sup,
    })
}

/// Work limits for [`find_rigidity_time`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RigidityBudget {
    /// Multiples `m q_k` tried per denominator.
    pub multiples_per_denominator: u64,
    /// Largest range scanned exhaustively.
    pub brute_force_limit: u64,
}

impl Default for RigidityBudget {
    fn default() -> Self {
        RigidityBudget {
            multiples_per_denominator: 64,
            brute_force_limit: 1_000_000,
        }
    }
}

/// Smallest found `b` in `[lambda L, 2 lambda L]` with `||b alpha|| <= eps`.
///
/// Candidates `m q_k` and `m q_k + e q_j` (|e| <= 2) are tried first; the
/// part of the range below the best candidate is then scanned directly when
/// it fits in the brute-force budget.
pub fn find_rigidity_time(
    cf: &CFExpansion,
    lambda: &ExactScalar,
    l: u64,
    eps: &ExactScalar,
    budget: RigidityBudget,
) -> Result<BigInt, CfError> {
    if !lambda.is_positive() {
        return Err(CfError::InvalidSearch("lambda must be positive"));
    }
    if !eps.is_positive() {
        return Err(CfError::InvalidSearch("eps must be positive"));
    }
    if l == 0 {
        return Err(CfError::InvalidSearch("L must be at least 1"));
    }
    let span = lambda * int(l as i64);
    let lo = span.ceil().to_integer();
    let hi = (span * int(2)).floor().to_integer();
    if lo > hi || !lo.is_positive() {
        return Err(CfError::InvalidSearch("empty search range"));
    }
    let alpha = cf.alpha();
    let dist = |b: &BigInt| norm_dist(&(big(b) * alpha));

    let mut best: Option<(BigInt, ExactScalar)> = None;
    let mut smallest_ok: Option<BigInt> = None;
    let mut consider = |b: BigInt| {
        if b < lo || b > hi {
            return;
        }
        let d = dist(&b);
        if &d <= eps && smallest_ok.as_ref().is_none_or(|s| &b < s) {
            smallest_ok = Some(b.clone());
        }
        if best.as_ref().is_none_or(|(_, bd)| &d < bd) {
            best = Some((b, d));
        }
    };

    let top = cf.convergents.len();
    for k in 1..top {
        let qk = cf.q(k);
        if qk > &hi {
            break;
        }
        let m_lo = Integer::div_ceil(&lo, qk).max(BigInt::one());
        let m_hi = (&hi / qk).min(&m_lo + BigInt::from(budget.multiples_per_denominator));
        let mut m = m_lo.clone();
        while m <= m_hi {
            let base = &m * qk;
            consider(base.clone());
            for j in 0..k {
                let qj = cf.q(j);
                for e in [-2i32, -1, 1, 2] {
                    consider(&base + BigInt::from(e) * qj);
                }
            }
            m += 1;
        }
    }

    let scan_hi = match &smallest_ok {
        Some(s) => s - 1,
        None => hi.clone(),
    };
    if scan_hi >= lo && (&scan_hi - &lo) < BigInt::from(budget.brute_force_limit) {
        if let Some(b) = scan(alpha, &lo, &scan_hi, eps) {
            return Ok(b);
        }
    }
    if let Some(b) = smallest_ok {
        return Ok(b);
    }
    let (best, best_dist) = best.unwrap_or_else(|| (lo.clone(), dist(&lo)));
    Err(CfError::RigidityNotFound(Box::new(RigidityMiss {
        lo,
        hi,
        eps: crate::exact::to_fraction_string(eps),
        best,
        best_dist: crate::exact::to_fraction_string(&best_dist),
    })))
}

/// First `b` in `[lo, hi]` with `||b alpha|| <= eps`, by integer stepping.
fn scan(alpha: &ExactScalar, lo: &BigInt, hi: &BigInt, eps: &ExactScalar) -> Option<BigInt> {
    let den = alpha.denom();
    let step = alpha.numer().mod_floor(den);
    // ||b alpha|| <= eps  <=>  min(r, den - r) * eps_den <= eps_num * den
    let bound = eps.numer() * den;
    let eps_den = eps.denom();
    let mut r = (lo * alpha.numer()).mod_floor(den);
    let mut b = lo.clone();
    while &b <= hi {
        let near = if (&r << 1u32) <= *den { r.clone() } else { den - &r };
        if near * eps_den <= bound {
            return Some(b);
        }
        r += &step;
        if &r >= den {
            r -= den;
        }
        b += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ratio, to_f64};

    fn qs(cf: &CFExpansion, upto: usize) -> Vec<u64> {
        (0..=upto).map(|n| cf.q_u64(n)).collect()
    }

    #[test]
    fn pi_minus_three_quotients() {
        let cf = cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 256, 6).unwrap();
        let a: Vec<u64> = (1..=5).map(|n| cf.a_u64(n)).collect();
        assert_eq!(a, vec![7, 15, 1, 292, 1]);
        assert_eq!(cf.q_u64(1), 7);
        assert!(cf.validated_depth >= 6);
        cf.verify_invariants().unwrap();
    }

    #[test]
    fn fibonacci_denominators() {
        let cf = cf_expand(&"cf:1,(1)".parse().unwrap(), 64, 6).unwrap();
        assert_eq!(qs(&cf, 6), vec![1, 1, 2, 3, 5, 8, 13]);
        assert_eq!(cf.validated_depth, 6);
    }

    #[test]
    fn all_odd_denominators() {
        let cf = cf_expand(&"cf:3,2,2,2,2".parse().unwrap(), 64, 5).unwrap();
        // independent recurrence
        let a = [3u64, 2, 2, 2, 2];
        let mut q = vec![1u64, a[0]];
        for i in 1..a.len() {
            q.push(a[i] * q[i] + q[i - 1]);
        }
        assert_eq!(qs(&cf, 5), q);
        assert_eq!(q, vec![1, 3, 7, 17, 41, 99]);
        assert!(q.iter().all(|v| v % 2 == 1));
    }

    #[test]
    fn trailing_one_does_not_corrupt_quotients() {
        let cf = cf_expand(&"cf:2,(1)".parse().unwrap(), 64, 3).unwrap();
        let a: Vec<u64> = (1..=4).map(|n| cf.a_u64(n)).collect();
        assert_eq!(a, vec![2, 1, 1, 1]);
    }

    #[test]
    fn rational_alpha_rejected() {
        let err = cf_expand(&AlphaSpec::Exact(ratio(3, 7)), 64, 4).unwrap_err();
        assert!(matches!(err, CfError::RationalAlpha { .. }));
    }

    #[test]
    fn depth_beyond_precision_reports_max() {
        let err = cf_expand(&AlphaSpec::Named(NamedConstant::Golden), 16, 100).unwrap_err();
        match err {
            CfError::DepthNotValidated { max_depth, .. } => assert!(max_depth > 5 && max_depth < 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn doubled_precision_agrees() {
        for c in [NamedConstant::PiMinus3, NamedConstant::TwoMinusSqrt2, NamedConstant::Golden] {
            let a = cf_expand(&AlphaSpec::Named(c), 128, 4).unwrap();
            let b = cf_expand(&AlphaSpec::Named(c), 256, 4).unwrap();
            assert!(b.validated_depth >= a.validated_depth);
            assert_eq!(
                a.partial_quotients[..=a.validated_depth],
                b.partial_quotients[..=a.validated_depth]
            );
        }
    }

    #[test]
    fn norm_of_seven_pi() {
        let cf = cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 256, 6).unwrap();
        let v = to_f64(&norm_dist(&(int(7) * cf.alpha())));
        // 7 pi - 22 computed independently in f64
        let oracle = 22.0 - 7.0 * std::f64::consts::PI;
        assert!((v - oracle.abs()).abs() < 1e-12);
        assert!(v > 0.0088 && v < 0.0089);
    }

    #[test]
    fn c_ratio_examples() {
        let cf = cf_expand(&"cf:3,(2)".parse().unwrap(), 64, 8).unwrap();
        for n in 1..=8 {
            let q = big(cf.q(n));
            assert_eq!(c_ratio(&cf, cf.alpha(), n).unwrap(), q.recip());
            assert_eq!(c_ratio(&cf, &int(0), n).unwrap(), int(0));
            let expect = crate::exact::half() / (&q * cf.norm_q_alpha(n));
            assert_eq!(c_ratio(&cf, &crate::exact::half(), n).unwrap(), expect);
        }
        assert!(c_ratio(&cf, &int(0), 9).is_err());
    }

    #[test]
    fn c_ratio_enclosure_contains_point_value() {
        let cf = cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 256, 6).unwrap();
        let beta = NamedConstant::TwoMinusSqrt2.enclosure(200);
        let enc = c_ratio_enclosure(&cf, &beta, 3).unwrap();
        let point = c_ratio(&cf, &beta.midpoint(), 3).unwrap();
        assert!(enc.contains(&point));
    }

    #[test]
    fn kl_examples() {
        let cf = cf_expand(&"cf:3,(2)".parse().unwrap(), 64, 10).unwrap();
        assert!(kl_test(&cf, cf.alpha(), 2, 10).unwrap().holds_on_range);
        assert!(!kl_test(&cf, cf.alpha(), 0, 10).unwrap().holds_on_range);
        assert!(kl_test(&cf, &int(0), 0, 10).unwrap().holds_on_range);
        // beta = 1/2: ||q_n/2|| = 1/2 > q_n||q_n alpha||/4 always here
        let out = kl_test(&cf, &crate::exact::half(), 1, 10).unwrap();
        assert_eq!(out.first_violation, Some(1));
    }

    #[test]
    fn parity_examples() {
        let cf = cf_expand(&"cf:3,(2)".parse().unwrap(), 64, 8).unwrap();
        let p = parity_profile(&cf, 8).unwrap();
        assert_eq!(p.odd_tail_from, Some(0));
        assert_eq!(p.even_q_quotient_sup, None);

        let g = cf_expand(&"cf:1,(1)".parse().unwrap(), 64, 9).unwrap();
        let p = parity_profile(&g, 8).unwrap();
        let pattern: Vec<Parity> = p.per_index.iter().map(|e| e.parity).collect();
        use Parity::*;
        assert_eq!(pattern, vec![Odd, Odd, Even, Odd, Odd, Even, Odd, Odd, Even]);
        assert_eq!(p.odd_tail_from, None);
        assert_eq!(p.even_q_quotient_sup, Some(BigInt::one()));
    }

    #[test]
    fn all_even_quotients_give_odd_or_alternating() {
        for spec in ["cf:2,(2)", "cf:1,4,(2)", "cf:4,6,(2,4)", "cf:3,(4)"] {
            let cf = cf_expand(&spec.parse().unwrap(), 64, 10).unwrap();
            let p = parity_profile(&cf, 10).unwrap();
            let tail: Vec<Parity> = p.per_index[3..].iter().map(|e| e.parity).collect();
            let all_odd = tail.iter().all(|&x| x == Parity::Odd);
            let alternating = tail.windows(2).all(|w| w[0] != w[1]);
            assert!(all_odd || alternating, "{spec}");
        }
    }

    #[test]
    fn rigidity_examples() {
        let cf = cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 256, 6).unwrap();
        let n = 3;
        let qn = cf.q(n).clone();
        let qn_u = cf.q_u64(n);
        let d = cf.norm_q_alpha(n);
        let b = find_rigidity_time(&cf, &int(1), qn_u, &d, RigidityBudget::default()).unwrap();
        assert_eq!(b, qn);
        let b = find_rigidity_time(&cf, &int(1), qn_u + 1, &(&d * int(2)), RigidityBudget::default()).unwrap();
        assert_eq!(b, &qn * 2);
        assert!(find_rigidity_time(&cf, &int(1), 10, &int(0), RigidityBudget::default()).is_err());
    }

    #[test]
    fn rigidity_scan_matches_exhaustive_search() {
        let cf = cf_expand(&"cf:1,3,(2)".parse().unwrap(), 64, 10).unwrap();
        let eps = ratio(1, 40);
        for l in [5u64, 17, 60, 123, 400] {
            let got = find_rigidity_time(&cf, &ratio(3, 2), l, &eps, RigidityBudget::default()).ok();
            let lo = (ratio(3, 2) * int(l as i64)).ceil().to_integer();
            let hi = (ratio(3, 1) * int(l as i64)).floor().to_integer();
            let mut oracle = None;
            let mut b = lo.clone();
            while b <= hi {
                if norm_dist(&(big(&b) * cf.alpha())) <= eps {
                    oracle = Some(b);
                    break;
                }
                b += 1;
            }
            assert_eq!(got, oracle, "L = {l}");
        }
    }

    #[test]
    fn spec_round_trip_display() {
        for s in ["cf:3,(2)", "cf:1,2,3", "pi-3", "golden", "13/31"] {
            let spec: AlphaSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }
}
