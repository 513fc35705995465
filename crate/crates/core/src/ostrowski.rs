//! Ostrowski numeration of a rotation parameter `beta` in the base
//! `(q_n alpha)`, plus the series checks built on the digits.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::continued_fractions::{CFExpansion, CfError};
use crate::exact::{big, fold, frac, int, norm_dist, ExactScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OstrowskiError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error("digit b_{index} = {digit} exceeds a_{{n+1}} = {bound}")]
    DigitTooLarge { index: usize, digit: BigInt, bound: BigInt },
    #[error("schedule rejected: {0}")]
    ScheduleRejected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Decreasing,
    Flat,
    Increasing,
}

impl Trend {
    /// Compares the mean of the last third of `terms` with the mean of the
    /// middle third; a factor of two either way counts as a trend.
    pub fn of(terms: &[ExactScalar]) -> Trend {
        let n = terms.len();
        if n < 3 {
            return Trend::Flat;
        }
        let third = n / 3;
        let mean = |s: &[ExactScalar]| {
            s.iter().fold(ExactScalar::zero(), |a, x| a + x) / int(s.len() as i64)
        };
        let middle = mean(&terms[third..n - third]);
        let last = mean(&terms[n - third..]);
        if last.is_zero() && middle.is_zero() {
            Trend::Flat
        } else if &last * int(2) <= middle {
            Trend::Decreasing
        } else if last >= middle * int(2) {
            Trend::Increasing
        } else {
            Trend::Flat
        }
    }

    /// As [`Trend::of`] for floating-point data.
    pub fn of_f64(terms: &[f64]) -> Trend {
        let n = terms.len();
        if n < 3 {
            return Trend::Flat;
        }
        let third = n / 3;
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        let middle = mean(&terms[third..n - third]);
        let last = mean(&terms[n - third..]);
        if last == 0.0 && middle == 0.0 {
            Trend::Flat
        } else if 2.0 * last <= middle {
            Trend::Decreasing
        } else if last >= 2.0 * middle {
            Trend::Increasing
        } else {
            Trend::Flat
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OstrowskiExpansion {
    /// `b_0..b_N`.
    #[serde(with = "crate::exact::serde_big_vec")]
    pub coefficients: Vec<BigInt>,
    /// `beta - sum b_n q_n alpha`, folded to `[-1/2, 1/2)`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub residual: ExactScalar,
    /// `0 <= b_n <= a_{n+1}`, `b_0 < a_1`, and `b_{n-1} = 0` whenever
    /// `b_n = a_{n+1}`.
    pub digit_bound_ok: bool,
}

impl OstrowskiExpansion {
    /// `sum b_n q_n`, the integer whose multiple of `alpha` the digits encode.
    pub fn integer_part(&self, cf: &CFExpansion) -> BigInt {
        self.coefficients
            .iter()
            .enumerate()
            .fold(BigInt::zero(), |acc, (n, b)| acc + b * cf.q(n))
    }
}

/// Greedy most-significant-first expansion of `beta` at depth `n_max`.
pub fn ostrowski_expand(cf: &CFExpansion, beta: &ExactScalar, n_max: usize) -> Result<OstrowskiExpansion, OstrowskiError> {
    cf.check(n_max)?;
    let alpha = cf.alpha();
    // representative in [-alpha, 1 - alpha)
    let mut r = frac(&(beta + alpha)) - alpha;
    let mut coefficients = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let theta = cf.theta(n);
        let width = theta.abs();
        let next = cf.theta(n + 1).abs();
        let y = if theta.is_negative() { -r.clone() } else { r.clone() };
        let d = ((&y - &next) / &width).ceil().to_integer().max(BigInt::zero());
        r -= big(&d) * &theta;
        coefficients.push(d);
    }
    let digit_bound_ok = digits_canonical(cf, &coefficients);
    let residual = fold(&(beta - synth_beta(cf, &coefficients)?));
    Ok(OstrowskiExpansion {
        coefficients,
        residual,
        digit_bound_ok,
    })
}

/// Whether `digits` satisfy the canonical Ostrowski digit conditions.
pub fn digits_canonical(cf: &CFExpansion, digits: &[BigInt]) -> bool {
    digits.iter().enumerate().all(|(n, b)| {
        let bound = cf.a(n + 1);
        if b.is_negative() || b > bound {
            return false;
        }
        if n == 0 && b == bound {
            return false;
        }
        !(b == bound && n > 0 && !digits[n - 1].is_zero())
    })
}

/// `sum b_n q_n alpha mod 1`, in `[0, 1)`. Digits may be any integers.
pub fn synth_beta(cf: &CFExpansion, coefficients: &[BigInt]) -> Result<ExactScalar, OstrowskiError> {
    if !coefficients.is_empty() {
        cf.check(coefficients.len() - 1)?;
    }
    let k = coefficients
        .iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (n, b)| acc + b * cf.q(n));
    Ok(frac(&(big(&k) * cf.alpha())))
}

/// Exponent of the `H_r` scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(u32),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HrPartial {
    pub exponent: Exponent,
    /// Partial sum for a finite exponent; tail supremum for `Infinity`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub value: ExactScalar,
    pub terms: Vec<String>,
    pub trend: Trend,
}

/// `sum_{n <= N} ||q_n beta||^r`, or for `r = Infinity` the supremum of
/// `||q_n beta||` over the last third of `0..=N`.
pub fn h_r_partial(cf: &CFExpansion, beta: &ExactScalar, r: Exponent, n_max: usize) -> Result<HrPartial, OstrowskiError> {
    cf.check(n_max)?;
    let dists: Vec<ExactScalar> = (0..=n_max).map(|n| norm_dist(&(big(cf.q(n)) * beta))).collect();
    let (value, terms) = match r {
        Exponent::Finite(p) => {
            let terms: Vec<ExactScalar> = dists.iter().map(|d| num_traits::pow(d.clone(), p as usize)).collect();
            let sum = terms.iter().fold(ExactScalar::zero(), |a, t| a + t);
            (sum, terms)
        }
        Exponent::Infinity => {
            let start = (n_max + 1) - (n_max + 1) / 3;
            let sup = dists[start.min(n_max)..].iter().max().cloned().unwrap_or_else(ExactScalar::zero);
            (sup, dists)
        }
    };
    Ok(HrPartial {
        exponent: r,
        value,
        trend: Trend::of(&terms),
        terms: terms.iter().map(crate::exact::to_fraction_string).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionChecks {
    /// `sum |b_n| / a_{n+1}`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub ostro_sum: ExactScalar,
    /// `sum (b_n / b_{n+1})^2` over pairs with `b_{n+1} != 0`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub lacunarity_sum: ExactScalar,
    /// `sum ||b_n s||^2`.
    pub s_sum: Option<String>,
    /// Indices `n` skipped because `b_{n+1} = 0`.
    pub skipped_gaps: Vec<usize>,
    pub ostro_trend: Trend,
    pub lacunarity_trend: Trend,
}

pub fn condition_checks(
    cf: &CFExpansion,
    coefficients: &[BigInt],
    s: Option<&ExactScalar>,
) -> Result<ConditionChecks, OstrowskiError> {
    if !coefficients.is_empty() {
        cf.check(coefficients.len() - 1)?;
    }
    let ostro_terms: Vec<ExactScalar> = coefficients
        .iter()
        .enumerate()
        .map(|(n, b)| ExactScalar::new(b.abs(), cf.a(n + 1).clone()))
        .collect();
    let mut lac_terms = Vec::new();
    let mut skipped_gaps = Vec::new();
    for n in 0..coefficients.len().saturating_sub(1) {
        if coefficients[n + 1].is_zero() {
            skipped_gaps.push(n);
        } else {
            let ratio = ExactScalar::new(coefficients[n].clone(), coefficients[n + 1].clone());
            lac_terms.push(&ratio * &ratio);
        }
    }
    let sum = |v: &[ExactScalar]| v.iter().fold(ExactScalar::zero(), |a, t| a + t);
    let s_sum = s.map(|s| {
        let total = coefficients
            .iter()
            .fold(ExactScalar::zero(), |a, b| {
                let d = norm_dist(&(big(b) * s));
                a + &d * &d
            });
        crate::exact::to_fraction_string(&total)
    });
    Ok(ConditionChecks {
        ostro_sum: sum(&ostro_terms),
        lacunarity_sum: sum(&lac_terms),
        s_sum,
        skipped_gaps,
        ostro_trend: Trend::of(&ostro_terms),
        lacunarity_trend: Trend::of(&lac_terms),
    })
}

/// How the digits of a non-regular candidate are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitSchedule {
    /// `b_n = floor(sqrt(a_{n+1}))` for `n` in `from..=to`, zero elsewhere.
    SqrtQuotient { from: usize, to: usize },
    /// Explicit `b_0..b_N`.
    Explicit(Vec<BigInt>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonregularCandidate {
    #[serde(with = "crate::exact::serde_scalar")]
    pub beta: ExactScalar,
    #[serde(with = "crate::exact::serde_big_vec")]
    pub coefficients: Vec<BigInt>,
    pub checks: ConditionChecks,
    /// All digits zero, so `beta = 0`.
    pub trivial: bool,
}

/// Builds `beta` from a digit schedule and verifies the two summability
/// hypotheses by their trends over the available range.
pub fn nonregular_candidate(cf: &CFExpansion, schedule: &DigitSchedule) -> Result<NonregularCandidate, OstrowskiError> {
    let coefficients: Vec<BigInt> = match schedule {
        DigitSchedule::Explicit(d) => d.clone(),
        DigitSchedule::SqrtQuotient { from, to } => {
            cf.check(*to)?;
            (0..=*to)
                .map(|n| if n < *from { BigInt::zero() } else { cf.a(n + 1).sqrt() })
                .collect()
        }
    };
    if !coefficients.is_empty() {
        cf.check(coefficients.len() - 1)?;
    }
    for (n, b) in coefficients.iter().enumerate() {
        if b.is_negative() || b > cf.a(n + 1) {
            return Err(OstrowskiError::DigitTooLarge {
                index: n,
                digit: b.clone(),
                bound: cf.a(n + 1).clone(),
            });
        }
    }
    let checks = condition_checks(cf, &coefficients, None)?;
    let beta = synth_beta(cf, &coefficients)?;
    let trivial = coefficients.iter().all(Zero::is_zero);
    if !trivial {
        let ostro_ok = checks.ostro_trend == Trend::Decreasing;
        let lac_ok = checks.lacunarity_trend == Trend::Decreasing;
        if !ostro_ok || !lac_ok {
            return Err(OstrowskiError::ScheduleRejected(format!(
                "ostro_sum trend {:?}, lacunarity_sum trend {:?}",
                checks.ostro_trend, checks.lacunarity_trend
            )));
        }
    }
    Ok(NonregularCandidate {
        beta,
        coefficients,
        checks,
        trivial,
    })
}

/// Exact membership test for `beta in Z alpha + Z` among the integers the
/// expansion can represent at depth `n_max`: returns `k` with
/// `beta - k alpha` an integer, trying both `beta` and `-beta`.
pub fn integer_multiple(cf: &CFExpansion, beta: &ExactScalar, n_max: usize) -> Result<Option<BigInt>, OstrowskiError> {
    for (sign, b) in [(1, beta.clone()), (-1, -beta.clone())] {
        let exp = ostrowski_expand(cf, &b, n_max)?;
        if exp.residual.is_zero() {
            let k = exp.integer_part(cf) * sign;
            debug_assert!((beta - big(&k) * cf.alpha()).is_integer());
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `a_{n+1}` as `u64`, saturating.
pub fn next_quotient(cf: &CFExpansion, n: usize) -> u64 {
    cf.a(n + 1).to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::constants::NamedConstant;
    use crate::continued_fractions::{cf_expand, AlphaSpec};
    use crate::exact::ratio;
    use proptest::prelude::*;

    fn pi_cf() -> CFExpansion {
        cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 512, 20).unwrap()
    }

    fn digits(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn single_digit_round_trip() {
        let cf = pi_cf();
        let beta = frac(&(big(cf.q(2)) * cf.alpha()));
        let e = ostrowski_expand(&cf, &beta, 8).unwrap();
        assert_eq!(e.coefficients, digits(&[0, 0, 1, 0, 0, 0, 0, 0, 0]));
        assert!(e.residual.is_zero());
        assert!(e.digit_bound_ok);
        let zero = ostrowski_expand(&cf, &int(0), 8).unwrap();
        assert!(zero.coefficients.iter().all(Zero::is_zero));
    }

    #[test]
    fn synth_examples() {
        let cf = pi_cf();
        let mut d = vec![BigInt::zero(); 6];
        d[3] = BigInt::one();
        assert_eq!(synth_beta(&cf, &d).unwrap(), frac(&(big(cf.q(3)) * cf.alpha())));
        assert!(synth_beta(&cf, &vec![BigInt::zero(); 6]).unwrap().is_zero());
        d[4] = BigInt::one();
        let direct = frac(&((big(cf.q(3)) + big(cf.q(4))) * cf.alpha()));
        assert_eq!(synth_beta(&cf, &d).unwrap(), direct);
    }

    #[test]
    fn integer_multiples_detected() {
        let cf = pi_cf();
        for k in -10i64..=10 {
            let beta = frac(&(int(k) * cf.alpha() + int(3)));
            let got = integer_multiple(&cf, &beta, 20).unwrap();
            assert_eq!(got, Some(BigInt::from(k)), "k = {k}");
        }
        assert_eq!(integer_multiple(&cf, &ratio(1, 3), 20).unwrap(), None);
    }

    #[test]
    fn h_r_examples() {
        let cf = cf_expand(&"cf:3,(2)".parse().unwrap(), 64, 20).unwrap();
        let h = h_r_partial(&cf, &crate::exact::half(), Exponent::Infinity, 20).unwrap();
        assert_eq!(h.value, crate::exact::half());
        let z = h_r_partial(&cf, &int(0), Exponent::Finite(1), 20).unwrap();
        assert!(z.value.is_zero());
        let a = h_r_partial(&cf, cf.alpha(), Exponent::Finite(1), 19).unwrap();
        let bound = (0..=19).fold(ExactScalar::zero(), |s, n| s + big(cf.q(n + 1)).recip());
        assert!(a.value <= bound);
    }

    #[test]
    fn h_r_monotone_in_depth() {
        let cf = pi_cf();
        let beta = ratio(5, 13);
        let mut prev = ExactScalar::zero();
        for n in 1..=20 {
            let v = h_r_partial(&cf, &beta, Exponent::Finite(2), n).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn finite_digit_beta_has_vanishing_tail() {
        let cf = cf_expand(&"cf:2,(3)".parse().unwrap(), 64, 30).unwrap();
        let d = digits(&[1, 2, 0, 1]);
        let beta = synth_beta(&cf, &d).unwrap();
        let early = h_r_partial(&cf, &beta, Exponent::Infinity, 9).unwrap().value;
        let late = h_r_partial(&cf, &beta, Exponent::Infinity, 30).unwrap().value;
        assert!(late < early);
        assert!(late < ratio(1, 1_000_000));
    }

    #[test]
    fn condition_check_examples() {
        // a_{n+1} = (n+1)^2 and b_n = 1: ostro terms 1/(n+1)^2
        let quotients: Vec<u64> = (1..=12).map(|n| n * n).collect();
        let cf = cf_expand(&AlphaSpec::quotients(&quotients, &[]), 64, 10).unwrap();
        let ones = vec![BigInt::one(); 11];
        let c = condition_checks(&cf, &ones, Some(&int(4))).unwrap();
        let oracle = (1..=11).fold(ExactScalar::zero(), |s, n| s + ratio(1, n * n));
        assert_eq!(c.ostro_sum, oracle);
        assert_eq!(c.s_sum.as_deref(), Some("0"));
        assert_eq!(c.ostro_trend, Trend::Decreasing);

        let d = digits(&[3, 5, 0, 7]);
        let c = condition_checks(&cf, &d, None).unwrap();
        assert_eq!(c.skipped_gaps, vec![1]);
        assert_eq!(c.lacunarity_sum, ratio(9, 25));
    }

    #[test]
    fn nonregular_schedules() {
        // a_{n+1} = 4^n with b_n = 2^n fails the ratio condition
        let q: Vec<u64> = (0..10).map(|n| 4u64.pow(n)).collect();
        let cf = cf_expand(&AlphaSpec::quotients(&q, &[]), 64, 8).unwrap();
        let b: Vec<BigInt> = (0..9).map(|n| BigInt::from(2u64.pow(n))).collect();
        assert!(matches!(
            nonregular_candidate(&cf, &DigitSchedule::Explicit(b)),
            Err(OstrowskiError::ScheduleRejected(_))
        ));

        // a_{n+1} = 2^(2^n), b_n = 2^(2^(n-1)) passes
        let q: Vec<u64> = (0..7).map(|n: u32| if n < 6 { 1u64 << (1u64 << n) } else { 3 }).collect();
        let q: Vec<u64> = q.into_iter().map(|x| x.max(1)).collect();
        let cf = cf_expand(&AlphaSpec::quotients(&q[..6], &[2]), 64, 5).unwrap();
        let b: Vec<BigInt> = (0..6u32)
            .map(|n| if n == 0 { BigInt::one() } else { BigInt::one() << (1u32 << (n - 1)) })
            .collect();
        let ok = nonregular_candidate(&cf, &DigitSchedule::Explicit(b)).unwrap();
        assert!(!ok.trivial);
        assert_eq!(ok.checks.lacunarity_trend, Trend::Decreasing);

        let zero = nonregular_candidate(&cf, &DigitSchedule::Explicit(vec![BigInt::zero(); 6])).unwrap();
        assert!(zero.trivial && zero.beta.is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn expansion_round_trip(num in 0u64..1_000_000_000, depth in 2usize..20) {
            let cf = pi_cf();
            let beta = ratio(num as i64, 1_000_000_007);
            let e = ostrowski_expand(&cf, &beta, depth).unwrap();
            prop_assert!(e.residual.abs() <= cf.norm_q_alpha(depth));
            let again = fold(&(synth_beta(&cf, &e.coefficients).unwrap() - &beta));
            prop_assert_eq!(again, -e.residual.clone());
            prop_assert!(e.coefficients.iter().enumerate().all(|(n, b)| !b.is_negative() && b <= cf.a(n + 1)));
        }

        #[test]
        fn canonical_digits_recovered(raw in prop::collection::vec(0u64..400, 12)) {
            let cf = pi_cf();
            // clamp into the canonical digit system
            let mut d: Vec<BigInt> = Vec::new();
            for (n, v) in raw.iter().enumerate() {
                let bound = cf.a(n + 1).clone();
                let mut b = BigInt::from(*v) % (&bound + 1u32);
                if n == 0 && b == bound { b -= 1u32; }
                if b == bound && n > 0 && !d[n - 1].is_zero() { b -= 1u32; }
                d.push(b);
            }
            prop_assume!(digits_canonical(&cf, &d));
            let beta = synth_beta(&cf, &d).unwrap();
            let e = ostrowski_expand(&cf, &beta, d.len() + 2).unwrap();
            prop_assert_eq!(&e.coefficients[..d.len()], &d[..]);
            prop_assert!(e.coefficients[d.len()..].iter().all(Zero::is_zero));
        }
    }
}
