//! Finite diagnostics for the cocycle `Phi_beta` over a rotation: ergodic-sum
//! value checks, orbit labels of discontinuities, separation and support
//! experiments, and a classifier that gathers evidence about whether
//! `Phi_beta` is a coboundary. Every verdict here is finite evidence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::continued_fractions::{
    c_ratio, find_rigidity_time, kl_test, parity_profile, CFExpansion, CfError, Parity, RigidityBudget,
};
use crate::exact::{big, frac, half, int, nearest_split, norm_dist, ratio, to_fraction_string, ExactScalar};
use crate::ostrowski::{integer_multiple, OstrowskiError};
use crate::step_circle::{DistributionTable, StepError, StepFunction, StepKind, DEFAULT_BREAKPOINT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Ostrowski(#[from] OstrowskiError),
    #[error("lemma inapplicable: q_n ||q_n alpha|| = {0} is not below 1/2")]
    LemmaInapplicable(String),
    #[error("q_{0} is even; an odd denominator is required")]
    EvenDenominator(usize),
    #[error("hypotheses require large a_{{n+1}}: floor(delta * {a}) = 0")]
    QuotientTooSmall { a: BigInt },
    #[error("delta must lie in (0, 1/2)")]
    BadDelta,
    #[error("b must be at least 1")]
    BadTime,
    #[error("time {0} does not fit in a machine integer")]
    TimeTooLarge(BigInt),
}

fn time_i64(t: &BigInt) -> Result<i64, DiagError> {
    t.to_i64().ok_or_else(|| DiagError::TimeTooLarge(t.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaHalfRecord {
    pub n: usize,
    #[serde(with = "crate::exact::serde_big")]
    pub q: BigInt,
    /// 1 for odd `q_n`, 2 for even.
    pub case: u8,
    pub value_set: Vec<String>,
    /// Case 1: measure where `F^(q_n)` is not `+-1`; case 2: measure where
    /// it is nonzero.
    #[serde(with = "crate::exact::serde_scalar")]
    pub exceptional_measure: ExactScalar,
    pub holds: bool,
}

/// Computes `F^(q_n)` exactly and checks its value structure.
pub fn verify_lemma_half(cf: &CFExpansion, n: usize) -> Result<LemmaHalfRecord, DiagError> {
    cf.check(n)?;
    let q = cf.q(n).clone();
    let size = big(&q) * cf.norm_q_alpha(n);
    if size >= half() {
        return Err(DiagError::LemmaInapplicable(to_fraction_string(&size)));
    }
    let f = StepFunction::make(&StepKind::F)?;
    let sum = f.ergodic_sum(cf.alpha(), time_i64(&q)?)?;
    let dist = sum.distribution();
    let values = sum.value_set();
    let (case, exceptional_measure, holds) = if q.is_odd() {
        let m = dist.measure_where(|v| v.abs() != int(1));
        let ok = values == vec![int(-1), int(1)];
        (1, m, ok)
    } else {
        let m = dist.measure_where(|v| !v.is_zero());
        let allowed = [int(-2), int(0), int(2)];
        let ok = values.iter().all(|v| allowed.contains(v))
            && m <= big(cf.a(n + 1)).recip()
            && dist.measure_of(&int(2)) == dist.measure_of(&int(-2));
        (2, m, ok)
    };
    Ok(LemmaHalfRecord {
        n,
        q,
        case,
        value_set: values.iter().map(to_fraction_string).collect(),
        exceptional_measure,
        holds,
    })
}

/// Position of the `k`-th orbit point of `gamma` at scale `q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscontinuityLabel {
    #[serde(with = "crate::exact::serde_scalar")]
    pub gamma: ExactScalar,
    pub n: usize,
    #[serde(with = "crate::exact::serde_big")]
    pub k: BigInt,
    /// Nearest integer to `q_n gamma`.
    #[serde(with = "crate::exact::serde_big")]
    pub t_gamma_n: BigInt,
    pub epsilon: i8,
    /// Orbit index: the point is `gamma - u alpha mod 1`.
    #[serde(with = "crate::exact::serde_big")]
    pub u: BigInt,
    /// `epsilon ||q_n gamma||`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub a_term: ExactScalar,
    /// `(-1)^(n-1) u ||q_n alpha||`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub b_term: ExactScalar,
    /// `k/q_n + (a_term + b_term)/q_n`, not reduced mod 1.
    #[serde(with = "crate::exact::serde_scalar")]
    pub location: ExactScalar,
}

impl DiscontinuityLabel {
    pub fn location_mod1(&self) -> ExactScalar {
        frac(&self.location)
    }
}

/// `(-1)^(n-1) q_{n-1} (t - k) mod q_n`.
pub fn orbit_index(cf: &CFExpansion, n: usize, t: &BigInt, k: &BigInt) -> BigInt {
    let q = cf.q(n);
    let prev = if n == 0 { BigInt::zero() } else { cf.q(n - 1).clone() };
    let raw = prev * (t - k);
    let signed = if n % 2 == 1 { raw } else { -raw };
    signed.mod_floor(q)
}

/// Labels of the `q_n` points `gamma - l alpha`, `0 <= l < q_n`, for each
/// `gamma`, in order of increasing `k`.
///
/// At a half-integer `q_n gamma` the lower integer is used; the locations do
/// not depend on that choice.
pub fn label_discontinuities(cf: &CFExpansion, n: usize, gammas: &[ExactScalar]) -> Result<Vec<DiscontinuityLabel>, DiagError> {
    cf.check(n)?;
    let q = cf.q(n).clone();
    let qs = big(&q);
    let nqa = cf.norm_q_alpha(n);
    let sign = if n % 2 == 1 { int(1) } else { int(-1) };
    let count = time_i64(&q)?;
    let mut out = Vec::with_capacity(gammas.len() * count as usize);
    for gamma in gammas {
        let qg = &qs * gamma;
        let (t, eps) = nearest_split(&qg);
        let a_term = &qg - big(&t);
        debug_assert_eq!(a_term.abs(), norm_dist(&qg));
        debug_assert!(eps == 1 || a_term.is_negative());
        for k in 0..count {
            let k = BigInt::from(k);
            let u = orbit_index(cf, n, &t, &k);
            let b_term = &sign * big(&u) * &nqa;
            let location = (big(&k) + &a_term + &b_term) / &qs;
            out.push(DiscontinuityLabel {
                gamma: gamma.clone(),
                n,
                k,
                t_gamma_n: t.clone(),
                epsilon: eps,
                u,
                a_term: a_term.clone(),
                b_term,
                location,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationRecord {
    #[serde(with = "crate::exact::serde_big")]
    pub b: BigInt,
    #[serde(with = "crate::exact::serde_scalar")]
    pub min_gap_times_b: ExactScalar,
    /// `None` unless a `(n, delta)` pair meeting the hypotheses was given.
    pub bound_ok: Option<bool>,
}

/// `b * min ||t - j alpha||` over `|j| < b` and `t` in `{beta, 1/2}`.
///
/// With `scale = Some((n, delta))` the result is compared against
/// `delta^2 / 8`, provided `||q_n t|| >= delta` for both targets and
/// `delta q_n / 4 <= b <= delta q_n / 2`.
pub fn separation_test(
    cf: &CFExpansion,
    beta: &ExactScalar,
    b: &BigInt,
    scale: Option<(usize, &ExactScalar)>,
) -> Result<SeparationRecord, DiagError> {
    if !b.is_positive() {
        return Err(DiagError::BadTime);
    }
    let bound = time_i64(b)?;
    let alpha = cf.alpha();
    let mut min: Option<ExactScalar> = None;
    for target in [beta.clone(), half()] {
        let mut pos = target.clone();
        let mut neg = target.clone();
        for j in 0..bound {
            let d = norm_dist(&pos).min(norm_dist(&neg));
            if min.as_ref().is_none_or(|m| &d < m) {
                min = Some(d);
            }
            if j + 1 < bound {
                pos -= alpha;
                neg += alpha;
            }
        }
    }
    let min_gap_times_b = min.expect("b >= 1") * big(b);
    let bound_ok = match scale {
        None => None,
        Some((n, delta)) => {
            cf.check(n)?;
            let q = big(cf.q(n));
            let targets_far = [beta.clone(), half()]
                .iter()
                .all(|t| &norm_dist(&(&q * t)) >= delta);
            let bb = big(b);
            let in_window = &q * delta / int(4) <= bb && bb <= &q * delta / int(2);
            (targets_far && in_window).then(|| min_gap_times_b >= delta * delta / int(8))
        }
    };
    Ok(SeparationRecord {
        b: b.clone(),
        min_gap_times_b,
        bound_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRecord {
    pub n: usize,
    pub l: u64,
    /// Measure of `|Phi_beta^(L q_n)| >= 1`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub measure_ge_1: ExactScalar,
    /// `delta / 2`.
    #[serde(with = "crate::exact::serde_scalar")]
    pub lower_bound: ExactScalar,
    #[serde(with = "crate::exact::serde_scalar")]
    pub c_n: ExactScalar,
    /// The finite conditions under which the bound is guaranteed.
    pub hypotheses_met: bool,
    pub bound_met: bool,
}

/// Support of a long ergodic sum of `Phi_beta` at the scale `L q_n`,
/// `L = floor(delta a_{n+1})`.
///
/// The bound `delta/2` is guaranteed when `c_n >= 2`,
/// `||q_n beta|| + (L + 1) q_n ||q_n alpha|| < 1/2` (clusters at `k/q_n`
/// and `k/q_n + 1/(2 q_n)` stay apart through all `L` translates) and
/// `delta a_{n+1} >= 2 + 2 delta` (the floor in `L` costs at most half).
pub fn support_experiment(cf: &CFExpansion, beta: &ExactScalar, n: usize, delta: &ExactScalar) -> Result<SupportRecord, DiagError> {
    support_experiment_with_budget(cf, beta, n, delta, DEFAULT_BREAKPOINT_BUDGET)
}

pub fn support_experiment_with_budget(
    cf: &CFExpansion,
    beta: &ExactScalar,
    n: usize,
    delta: &ExactScalar,
    budget: u64,
) -> Result<SupportRecord, DiagError> {
    if !delta.is_positive() || delta >= &half() {
        return Err(DiagError::BadDelta);
    }
    cf.check(n)?;
    if !cf.q_is_odd(n) {
        return Err(DiagError::EvenDenominator(n));
    }
    let a = big(cf.a(n + 1));
    let l = (delta * &a).floor().to_integer();
    if l.is_zero() {
        return Err(DiagError::QuotientTooSmall { a: cf.a(n + 1).clone() });
    }
    let time = &l * cf.q(n);
    let phi = StepFunction::make(&StepKind::PhiBeta(beta.clone()))?;
    let sum = phi.ergodic_sum_with_budget(cf.alpha(), time_i64(&time)?, budget)?;
    let measure_ge_1 = sum.distribution().measure_where(|v| v.abs() >= int(1));
    let c_n = c_ratio(cf, beta, n)?;
    let q = big(cf.q(n));
    let spread = norm_dist(&(&q * beta)) + (big(&l) + int(1)) * &q * cf.norm_q_alpha(n);
    let hypotheses_met = c_n >= int(2) && spread < half() && delta * &a >= int(2) + delta * int(2);
    let lower_bound = delta / int(2);
    let bound_met = measure_ge_1 >= lower_bound;
    Ok(SupportRecord {
        n,
        l: l.to_u64().expect("L fits"),
        measure_ge_1,
        lower_bound,
        c_n,
        hypotheses_met,
        bound_met,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialScan {
    pub tables: Vec<DistributionTable>,
    /// Values carrying mass at least `delta` in every table.
    pub candidates: Vec<ExactScalar>,
}

/// Exact distributions of `f^(r)` for each time `r`.
pub fn essential_value_scan(
    f: &StepFunction,
    cf: &CFExpansion,
    times: &[BigInt],
    delta: &ExactScalar,
) -> Result<EssentialScan, DiagError> {
    let mut tables = Vec::with_capacity(times.len());
    for t in times {
        let sum = f.ergodic_sum(cf.alpha(), time_i64(t)?)?;
        tables.push(sum.distribution());
    }
    let candidates = match tables.first() {
        None => Vec::new(),
        Some(first) => first
            .values()
            .filter(|v| tables.iter().all(|t| &t.measure_of(v) >= delta))
            .cloned()
            .collect(),
    };
    Ok(EssentialScan { tables, candidates })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    TrivialCoboundary,
    EvidenceNotCoboundary(String),
    EvidenceErgodic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub criterion: String,
    pub n: usize,
    #[serde(with = "crate::exact::serde_big")]
    pub q_n: BigInt,
    pub parity: Parity,
    #[serde(with = "crate::exact::serde_scalar")]
    pub norm_q_beta: ExactScalar,
    #[serde(with = "crate::exact::serde_scalar")]
    pub c_n: ExactScalar,
    pub numbers: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetUsed {
    pub depth: usize,
    pub ergodic_sums: u64,
    pub breakpoints: u64,
    /// Some step was skipped for lack of budget.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosisReport {
    pub verdict: Verdict,
    pub evidence: Vec<EvidenceRecord>,
    /// Criteria tried and why each did not decide.
    pub trail: Vec<String>,
    pub budget_used: BudgetUsed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyBudget {
    /// Deepest index examined (capped by the validated depth).
    pub max_depth: usize,
    /// Breakpoint cap for any single ergodic sum.
    pub breakpoints: u64,
    /// Largest time for which ergodic sums are materialized.
    pub max_time: u64,
    /// Quotients at most this large count as bounded.
    pub quotient_cap: u64,
    /// Largest denominator `s` tried when testing `s beta in Z alpha + Z`.
    pub rational_s_max: u64,
    /// Threshold for `||q_n beta||` in the well-separated branch.
    pub separation_delta: ExactScalar,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        ClassifyBudget {
            max_depth: 60,
            breakpoints: 2_000_000,
            max_time: 200_000,
            quotient_cap: 10,
            rational_s_max: 12,
            separation_delta: ratio(1, 100),
        }
    }
}

struct Classifier<'a> {
    cf: &'a CFExpansion,
    budget: &'a ClassifyBudget,
    depth: usize,
    used: BudgetUsed,
    trail: Vec<String>,
    evidence: Vec<EvidenceRecord>,
}

impl<'a> Classifier<'a> {
    fn record(&self, criterion: &str, beta: &ExactScalar, n: usize, numbers: &[(&str, String)]) -> EvidenceRecord {
        let q = big(self.cf.q(n));
        EvidenceRecord {
            criterion: criterion.to_string(),
            n,
            q_n: self.cf.q(n).clone(),
            parity: if self.cf.q_is_odd(n) { Parity::Odd } else { Parity::Even },
            norm_q_beta: norm_dist(&(&q * beta)),
            c_n: c_ratio(self.cf, beta, n).expect("index checked"),
            numbers: numbers.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }

    fn sum(&mut self, f: &StepFunction, t: &BigInt) -> Option<StepFunction> {
        let t = t.to_u64().filter(|&t| t <= self.budget.max_time)?;
        match f.ergodic_sum_with_budget(self.cf.alpha(), t as i64, self.budget.breakpoints) {
            Ok(s) => {
                self.used.ergodic_sums += 1;
                self.used.breakpoints += s.arc_count() as u64;
                Some(s)
            }
            Err(_) => {
                self.used.exhausted = true;
                self.trail.push(format!("ergodic sum at time {t} exceeds the breakpoint budget"));
                None
            }
        }
    }

    fn finish(mut self, verdict: Verdict) -> DiagnosisReport {
        self.used.depth = self.depth;
        DiagnosisReport {
            verdict,
            evidence: self.evidence,
            trail: self.trail,
            budget_used: self.used,
        }
    }

    fn tail(&self) -> std::ops::RangeInclusive<usize> {
        (self.depth / 2)..=self.depth
    }

    /// `k` with `x - k alpha` an integer, provided `|k| <= q_{N/2}`. Larger
    /// `k` only reflect that the stored `alpha` is a rational approximant.
    fn small_multiple(&mut self, x: &ExactScalar) -> Result<Option<BigInt>, DiagError> {
        let Some(k) = integer_multiple(self.cf, x, self.depth)? else {
            return Ok(None);
        };
        let limit = self.cf.q(self.depth / 2);
        if k.abs() <= *limit {
            Ok(Some(k))
        } else {
            self.trail
                .push(format!("integer combination with |k| above q_{} = {limit} ignored", self.depth / 2));
            Ok(None)
        }
    }

    fn trivial_screen(&mut self, beta: &ExactScalar) -> Result<Option<Verdict>, DiagError> {
        if let Some(k) = self.small_multiple(beta)? {
            let m = beta - big(&k) * self.cf.alpha();
            let ev = self.record("integer_combination", beta, self.depth, &[("k", k.to_string()), ("m", to_fraction_string(&m))]);
            self.evidence.push(ev);
            return Ok(Some(Verdict::TrivialCoboundary));
        }
        let tail = self.tail();
        let kl = kl_test(self.cf, beta, *tail.start(), *tail.end())?;
        if kl.holds_on_range {
            let ev = self.record("kl_tail", beta, self.depth, &[("from", tail.start().to_string())]);
            self.evidence.push(ev);
            return Ok(Some(Verdict::TrivialCoboundary));
        }
        self.trail.push(format!(
            "trivial screen: no integer combination at depth {}, kl bound fails at n = {}",
            self.depth,
            kl.first_violation.expect("violation")
        ));
        Ok(None)
    }

    fn half_branch(&mut self, beta: &ExactScalar) -> Result<Option<Verdict>, DiagError> {
        if frac(beta) != half() {
            return Ok(None);
        }
        let profile = parity_profile(self.cf, self.depth)?;
        let Some(from) = profile.odd_tail_from.filter(|&f| f <= self.depth / 2) else {
            self.trail.push("beta = 1/2 but the denominators have no odd tail".into());
            return Ok(None);
        };
        // Phi_{1/2} = -F, and F^(q_n) = +-1 along the odd tail
        let mut checked = 0;
        for n in from..=self.depth {
            if self.cf.q(n) > &BigInt::from(self.budget.max_time) || checked == 3 {
                break;
            }
            if let Ok(rec) = verify_lemma_half(self.cf, n) {
                let ev = self.record(
                    "half_is_minus_f",
                    beta,
                    n,
                    &[("value_set", rec.value_set.join(" ")), ("holds", rec.holds.to_string())],
                );
                self.evidence.push(ev);
                self.used.ergodic_sums += 1;
                checked += 1;
            }
        }
        if checked == 0 {
            let ev = self.record("half_is_minus_f", beta, from, &[("odd_tail_from", from.to_string())]);
            self.evidence.push(ev);
        }
        Ok(Some(Verdict::EvidenceNotCoboundary("half_is_minus_f".into())))
    }

    fn bounded_branch(&mut self, beta: &ExactScalar) -> Option<Verdict> {
        let max = (1..=self.depth + 1).map(|n| self.cf.a(n).clone()).max().expect("nonempty");
        if max <= BigInt::from(self.budget.quotient_cap) {
            for n in self.tail().step_by(((self.depth / 2) / 4).max(1)) {
                let ev = self.record("bounded_quotients", beta, n, &[("max_quotient", max.to_string())]);
                self.evidence.push(ev);
            }
            return Some(Verdict::EvidenceErgodic);
        }
        self.trail.push(format!("quotients reach {max}, above the bounded-type cap {}", self.budget.quotient_cap));
        None
    }

    fn separated_branch(&mut self, beta: &ExactScalar) -> Result<Option<Verdict>, DiagError> {
        let delta = self.budget.separation_delta.clone();
        let hits: Vec<usize> = self
            .tail()
            .filter(|&n| self.cf.q_is_odd(n) && norm_dist(&(big(self.cf.q(n)) * beta)) >= delta)
            .collect();
        if hits.len() < 3 {
            self.trail.push(format!(
                "well-separated branch: {} odd indices with ||q_n beta|| >= {} in the tail",
                hits.len(),
                to_fraction_string(&delta)
            ));
            return Ok(None);
        }
        for &n in &hits {
            let mut numbers = vec![("delta", to_fraction_string(&delta))];
            let q = self.cf.q(n).clone();
            let window_lo = (big(&q) * &delta / int(4)).ceil().to_integer();
            if window_lo.is_positive() && q <= BigInt::from(self.budget.max_time) {
                let lambda = &delta / int(4);
                let eps = big(&q).recip();
                let b = find_rigidity_time(self.cf, &lambda, q.to_u64().expect("bounded"), &eps, RigidityBudget::default())
                    .unwrap_or(window_lo);
                let sep = separation_test(self.cf, beta, &b, Some((n, &delta)))?;
                numbers.push(("b", b.to_string()));
                numbers.push(("min_gap_times_b", to_fraction_string(&sep.min_gap_times_b)));
                if let Some(ok) = sep.bound_ok {
                    numbers.push(("separation_bound_ok", ok.to_string()));
                }
                let phi = StepFunction::make(&StepKind::PhiBeta(beta.clone()))?;
                if let Some(s) = self.sum(&phi, &b) {
                    let m = s.distribution().measure_where(|v| v.abs() >= int(1));
                    numbers.push(("measure_ge_1", to_fraction_string(&m)));
                }
            }
            let ev = self.record("regularprop", beta, n, &numbers);
            self.evidence.push(ev);
        }
        Ok(Some(Verdict::EvidenceNotCoboundary("regularprop".into())))
    }

    fn rational_branch(&mut self, beta: &ExactScalar) -> Result<Option<Verdict>, DiagError> {
        for s in 2..=self.budget.rational_s_max {
            if let Some(k) = self.small_multiple(&(beta * int(s as i64)))? {
                let small = self
                    .tail()
                    .map(|n| self.cf.a(n + 1).clone())
                    .min()
                    .expect("nonempty");
                if small > BigInt::from(self.budget.quotient_cap) {
                    self.trail.push(format!("s beta trivial for s = {s}, but tail quotients all exceed the cap"));
                    return Ok(None);
                }
                let ev = self.record(
                    "rational1",
                    beta,
                    self.depth,
                    &[("s", s.to_string()), ("k", k.to_string()), ("min_tail_quotient", small.to_string())],
                );
                self.evidence.push(ev);
                return Ok(Some(Verdict::EvidenceNotCoboundary("rational1".into())));
            }
        }
        self.trail.push(format!("no s <= {} with s beta in Z alpha + Z", self.budget.rational_s_max));
        Ok(None)
    }

    /// Case B evidence for `beta` along odd denominators.
    fn case_b(&mut self, beta: &ExactScalar, label: &str) -> Result<Option<Verdict>, DiagError> {
        let third = self.depth - self.depth / 3;
        let small = (third..=self.depth).all(|n| {
            !self.cf.q_is_odd(n) || norm_dist(&(big(self.cf.q(n)) * beta)) * int(n.max(1) as i64) < int(1)
        });
        if !small {
            self.trail.push(format!("{label}: ||q_n beta|| is not small along the odd tail"));
            return Ok(None);
        }
        let delta = ratio(1, 4);
        for n in (1..=self.depth).rev() {
            if !self.cf.q_is_odd(n) || self.cf.a(n + 1) < &BigInt::from(16u32) {
                continue;
            }
            let c = c_ratio(self.cf, beta, n)?;
            let target = if c >= int(2) {
                beta.clone()
            } else if c > ratio(1, 4) {
                beta * int(8)
            } else {
                continue;
            };
            let l = (&delta * big(self.cf.a(n + 1))).floor().to_integer();
            if &l * self.cf.q(n) > BigInt::from(self.budget.max_time) {
                continue;
            }
            let rec = match support_experiment_with_budget(self.cf, &target, n, &delta, self.budget.breakpoints) {
                Ok(r) => r,
                Err(DiagError::Step(StepError::BudgetExceeded { .. })) => {
                    self.used.exhausted = true;
                    self.trail.push(format!("{label}: support sum at n = {n} exceeds the breakpoint budget"));
                    continue;
                }
                Err(e) => return Err(e),
            };
            self.used.ergodic_sums += 1;
            if rec.hypotheses_met && rec.bound_met {
                let ev = self.record(
                    "case_b_support",
                    &target,
                    n,
                    &[
                        ("L", rec.l.to_string()),
                        ("measure_ge_1", to_fraction_string(&rec.measure_ge_1)),
                        ("lower_bound", to_fraction_string(&rec.lower_bound)),
                        ("multiplier", if &target == beta { "1".into() } else { "8".into() }),
                    ],
                );
                self.evidence.push(ev);
                return Ok(Some(Verdict::EvidenceNotCoboundary("case_b_support".into())));
            }
        }
        self.trail.push(format!("{label}: no index with a large quotient met the support hypotheses"));
        Ok(None)
    }

    fn even_branch(&mut self, beta: &ExactScalar) -> Result<Option<Verdict>, DiagError> {
        let profile = parity_profile(self.cf, self.depth)?;
        if profile.odd_tail_from.is_some_and(|f| f <= self.depth / 2) {
            return self.case_b(beta, "odd tail");
        }
        let values: std::collections::BTreeSet<BigInt> = profile
            .per_index
            .iter()
            .filter(|e| e.parity == Parity::Even)
            .map(|e| e.next_quotient.clone())
            .collect();
        let cap = BigInt::from(self.budget.quotient_cap);
        if values.iter().any(|v| v > &cap) {
            self.trail.push("even denominators carry unbounded quotients".into());
            return Ok(None);
        }
        let r: BigInt = values.iter().product();
        let scaled = beta * big(&r);
        if integer_multiple(self.cf, &scaled, self.depth)?.is_some() {
            self.trail.push(format!("R beta is trivial for R = {r}"));
            return Ok(None);
        }
        self.case_b(&scaled, "R beta reduction")
    }
}

/// Runs the decision tree and returns the verdict with its evidence.
pub fn classify_coboundary(cf: &CFExpansion, beta: &ExactScalar, budget: &ClassifyBudget) -> Result<DiagnosisReport, DiagError> {
    let depth = budget.max_depth.min(cf.validated_depth);
    let mut c = Classifier {
        cf,
        budget,
        depth,
        used: BudgetUsed::default(),
        trail: Vec::new(),
        evidence: Vec::new(),
    };
    if depth < 3 {
        let ev = c.record("depth", beta, depth, &[]);
        c.evidence.push(ev);
        c.trail.push("validated depth too small".into());
        return Ok(c.finish(Verdict::Inconclusive));
    }
    if let Some(v) = c.trivial_screen(beta)? {
        return Ok(c.finish(v));
    }
    if let Some(v) = c.half_branch(beta)? {
        return Ok(c.finish(v));
    }
    if let Some(v) = c.bounded_branch(beta) {
        return Ok(c.finish(v));
    }
    if let Some(v) = c.separated_branch(beta)? {
        return Ok(c.finish(v));
    }
    if let Some(v) = c.rational_branch(beta)? {
        return Ok(c.finish(v));
    }
    if let Some(v) = c.even_branch(beta)? {
        return Ok(c.finish(v));
    }
    let ev = c.record("inconclusive", beta, depth, &[]);
    c.evidence.push(ev);
    Ok(c.finish(Verdict::Inconclusive))
}
