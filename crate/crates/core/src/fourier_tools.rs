//! Fourier-side estimates: L2 norms of ergodic sums from coefficients, the
//! lacunary Hölder roof, and finite transfer series.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::continued_fractions::{CFExpansion, CfError};
use crate::exact::{big, frac, half, int, norm_dist, ratio, ExactScalar};
use crate::interval::{sin_pi, sin_pi_ratio, Interval};
use crate::ostrowski::Trend;
use crate::step_circle::{StepError, StepFunction};
use crate::trig::{dirichlet_sq_ratio, TrigPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FourierError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("denominators are not lacunary within the cap: a_{index} = {quotient} exceeds {cap} (bounded partial quotients required)")]
    NotLacunary { index: usize, quotient: BigInt, cap: u64 },
    #[error("invalid schedule: {0}")]
    BadSchedule(&'static str),
    #[error("truncation {truncation} is below the largest frequency {max_freq}")]
    TruncationTooSmall { truncation: u64, max_freq: BigInt },
    #[error("at least 10 samples are required")]
    TooFewSamples,
    #[error("||n alpha|| vanishes at n = {0}; alpha is resonant at this range")]
    ResonantAlpha(u64),
    #[error("telescoping identity failed at K = {0}")]
    IdentityFailed(usize),
    #[error("q must be at least 1")]
    BadTime,
}

/// Truncated `F_s + delta F_1` with its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LacunarySpec {
    /// Denominator indices `m_1 < m_2 < ...` carrying the `F_s` terms.
    pub schedule: Vec<usize>,
    pub delta: ExactScalar,
    pub terms: usize,
    /// `sum_{k <= K} sin(2 pi q_{m_k} x) / q_{m_k}`.
    pub sparse: TrigPolynomial,
    /// `sum_{k <= K} sin(2 pi q_k x) / q_k`.
    pub full: TrigPolynomial,
    /// `sparse + delta * full`.
    pub poly: TrigPolynomial,
}

impl LacunarySpec {
    pub fn eval(&self, x: &ExactScalar) -> Interval {
        self.poly.eval(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FourierSeriesSpec {
    Trig(TrigPolynomial),
    Step(StepFunction),
    Lacunary(Box<LacunarySpec>),
}

impl FourierSeriesSpec {
    pub fn poly(&self) -> Option<&TrigPolynomial> {
        match self {
            FourierSeriesSpec::Trig(p) => Some(p),
            FourierSeriesSpec::Lacunary(l) => Some(&l.poly),
            FourierSeriesSpec::Step(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesNorm {
    /// Encloses `||phi^(q)||_2^2`.
    pub norm_sq: Interval,
    /// Encloses the sum over `|r| <= truncation`.
    pub truncated: Interval,
    /// Upper bound on the omitted part.
    pub tail_bound: f64,
}

fn pi_sq() -> Interval {
    Interval::pi().sqr()
}

/// Incrementally tracks `r * num mod den` for `r = 1, 2, ...`.
struct Residue {
    step: BigInt,
    den: BigInt,
    cur: BigInt,
}

impl Residue {
    fn new(x: &ExactScalar) -> Self {
        let den = x.denom().clone();
        Residue {
            step: x.numer().mod_floor(&den),
            cur: BigInt::zero(),
            den,
        }
    }

    fn advance(&mut self) -> &BigInt {
        self.cur += &self.step;
        if self.cur >= self.den {
            self.cur -= &self.den;
        }
        &self.cur
    }

    /// Enclosure of `||r x||` at the current `r`.
    fn dist(&self) -> Interval {
        let other = &self.den - &self.cur;
        let d = if self.cur <= other { &self.cur } else { &other };
        Interval::from_ratio(d, &self.den)
    }
}

/// Upper bound for `sum_{m=1}^{q-1} (q - m) / ||m alpha||`.
fn resonance_weight(alpha: &ExactScalar, q: u64) -> Result<f64, FourierError> {
    let mut res = Residue::new(alpha);
    let mut acc = Interval::ZERO;
    for m in 1..q {
        res.advance();
        let d = res.dist();
        if d.lo <= 0.0 {
            return Err(FourierError::ResonantAlpha(m));
        }
        acc = acc + Interval::point((q - m) as f64).div(&d);
    }
    Ok(acc.hi)
}

/// Largest `q` for which the resonance weight is summed directly.
const RESONANCE_LIMIT: u64 = 2_000_000;

/// `||phi^(q)||_2^2` from the Fourier coefficients of `phi`.
///
/// Step functions are summed over `1 <= |r| <= truncation` using
/// `|c_r| <= Var / (2 pi |r|)` for the tail, with the block sums of the
/// squared Dirichlet kernel bounded through `||m alpha||`.
pub fn series_norm(spec: &FourierSeriesSpec, cf: &CFExpansion, q: u64, truncation: u64) -> Result<SeriesNorm, FourierError> {
    if q == 0 {
        return Err(FourierError::BadTime);
    }
    let alpha = cf.alpha();
    if let Some(p) = spec.poly() {
        if let Some(max) = p.max_freq() {
            if max > BigInt::from(truncation) {
                return Err(FourierError::TruncationTooSmall {
                    truncation,
                    max_freq: max,
                });
            }
        }
        let v = p.ergodic_norm_sq(alpha, q);
        return Ok(SeriesNorm {
            norm_sq: v,
            truncated: v,
            tail_bound: 0.0,
        });
    }
    let FourierSeriesSpec::Step(f) = spec else { unreachable!() };
    let jumps: Vec<(Residue, Interval)> = f
        .discontinuities()
        .into_iter()
        .filter(|(_, d)| !d.is_zero())
        .map(|(t, d)| (Residue::new(&t), Interval::from_scalar(&d)))
        .collect();
    let mut jumps = jumps;
    let mut ra = Residue::new(alpha);
    let mut acc = Interval::ZERO;
    for r in 1..=truncation {
        let mut re = Interval::ZERO;
        let mut im = Interval::ZERO;
        for (res, d) in jumps.iter_mut() {
            let cur = res.advance().clone();
            // 2 pi r t = pi * (2 cur / den)
            let two = &cur << 1u32;
            let s = sin_pi_ratio(&two, &res.den);
            let c = sin_pi_ratio(&((&cur << 2u32) + &res.den), &(&res.den << 1u32));
            re = re + *d * c;
            im = im + *d * s;
        }
        let a = ra.advance().clone();
        let dq = dirichlet_sq_ratio(&a, &ra.den, q);
        let rr = Interval::point(r as f64).sqr();
        acc = acc + (re.sqr() + im.sqr()) * dq.div(&rr);
    }
    // two signs of r, |c_r|^2 = |S_r|^2 / (4 pi^2 r^2)
    let scale = pi_sq().scale(2.0).recip();
    let mean = Interval::from_scalar(&(f.integral() * int(q as i64))).sqr();
    let truncated = mean + acc * scale;

    let var = Interval::from_scalar(&f.variation());
    let qf = q as f64;
    let tf = truncation.max(1) as f64;
    let trivial = Interval::point(qf).sqr().div(&Interval::point(tf));
    let kernel = if q <= RESONANCE_LIMIT {
        let k = resonance_weight(alpha, q)?;
        let refined = Interval::point(qf).div(&Interval::point(tf))
            + Interval::point(k).div(&Interval::point(tf + 1.0).sqr());
        if refined.hi < trivial.hi {
            refined
        } else {
            trivial
        }
    } else {
        trivial
    };
    let tail = (var.sqr() * scale * kernel).hi;
    Ok(SeriesNorm {
        norm_sq: Interval::new(truncated.lo, (truncated + Interval::new(0.0, tail)).hi),
        truncated,
        tail_bound: tail,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaCoeff {
    /// `pi |gamma_q|` when every `|sin(pi q beta_j)|` is rational.
    pub pi_scaled_exact: Option<ExactScalar>,
    /// Encloses `pi |gamma_q|`.
    pub pi_scaled: Interval,
    /// Encloses `|gamma_q|`.
    pub value: Interval,
}

/// `|sin(pi x)|` when it is rational.
fn rational_abs_sin_pi(x: &ExactScalar) -> Option<ExactScalar> {
    let f = frac(x);
    if f.is_zero() {
        Some(int(0))
    } else if f == half() {
        Some(int(1))
    } else if f == ratio(1, 6) || f == ratio(5, 6) {
        Some(half())
    } else {
        None
    }
}

/// `|gamma_q|` of `prod_j (R_{-beta_j} - I) G`, `G(x) = {x} - 1/2`:
/// `2^(v-1) / pi * prod_j |sin(pi q beta_j)|`.
pub fn gamma_coeff(betas: &[ExactScalar], q: &BigInt) -> GammaCoeff {
    let qs = big(q);
    let args: Vec<ExactScalar> = betas.iter().map(|b| &qs * b).collect();
    let power = if betas.is_empty() {
        ratio(1, 2)
    } else {
        num_traits::pow(int(2), betas.len() - 1)
    };
    let exact = args
        .iter()
        .map(rational_abs_sin_pi)
        .try_fold(power.clone(), |acc, s| s.map(|s| acc * s));
    let mut enc = Interval::from_scalar(&power);
    for a in &args {
        enc = enc * sin_pi(a).abs();
    }
    let pi_scaled = match &exact {
        Some(e) => Interval::from_scalar(e),
        None => enc,
    };
    GammaCoeff {
        pi_scaled_exact: exact,
        pi_scaled,
        value: pi_scaled.div(&Interval::pi()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourmethIndex {
    pub n: usize,
    pub gamma: Interval,
    pub ok: bool,
    /// Lower bound on `||phi^(q)||_2^2` the coefficient gives at this index.
    pub norm_lower: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourmethRecord {
    pub condgamma_ok: bool,
    pub condak_ok: bool,
    /// Supremum of `a_n` over indices with `a_{n+1} = 1`.
    pub m: Option<BigInt>,
    pub per_index: Vec<FourmethIndex>,
    pub conclusion: Option<String>,
}

/// Checks `|gamma_{q_n}| >= delta` along `indices` and that `a_n` stays
/// within `quotient_cap` wherever `a_{n+1} = 1`.
pub fn fourmeth_check(
    cf: &CFExpansion,
    betas: &[ExactScalar],
    delta: &ExactScalar,
    indices: &[usize],
    quotient_cap: u64,
) -> Result<FourmethRecord, FourierError> {
    for &n in indices {
        cf.check(n)?;
    }
    let d = Interval::from_scalar(delta);
    let m = indices
        .iter()
        .filter(|&&n| n >= 1 && cf.a(n + 1).is_one())
        .map(|&n| cf.a(n).clone())
        .max();
    let condak_ok = m.as_ref().is_none_or(|m| m <= &BigInt::from(quotient_cap));
    let four_over_pi_sq = Interval::point(4.0).div(&pi_sq());
    let mut per_index = Vec::with_capacity(indices.len());
    for &n in indices {
        let g = gamma_coeff(betas, cf.q(n)).value;
        let ok = g.lo >= d.hi;
        let norm_lower = ok.then(|| {
            let c = if cf.a(n + 1) >= &BigInt::from(2) {
                four_over_pi_sq
            } else {
                let mm = Interval::point(m.as_ref().and_then(|m| m.to_f64()).unwrap_or(f64::INFINITY) + 1.0);
                four_over_pi_sq.div(&mm.sqr())
            };
            (d.sqr() * c).lo
        });
        per_index.push(FourmethIndex {
            n,
            gamma: g,
            ok,
            norm_lower,
        });
    }
    let condgamma_ok = !per_index.is_empty() && per_index.iter().all(|i| i.ok);
    let conclusion = (condgamma_ok && condak_ok)
        .then(|| "nonzero finite essential value: the cocycle is regular and not a coboundary".to_string());
    Ok(FourmethRecord {
        condgamma_ok,
        condak_ok,
        m,
        per_index,
        conclusion,
    })
}

/// Default quotient cap for the lacunarity check.
pub const DEFAULT_QUOTIENT_CAP: u64 = 1000;

/// Builds `F = F_s + delta F_1` truncated to `terms` summands each.
/// Without a schedule, `m_k = 2k`.
pub fn hoelder_build(
    cf: &CFExpansion,
    schedule: Option<&[usize]>,
    delta: &ExactScalar,
    terms: usize,
    quotient_cap: u64,
) -> Result<LacunarySpec, FourierError> {
    if terms == 0 {
        return Err(FourierError::BadSchedule("at least one term is required"));
    }
    let schedule: Vec<usize> = match schedule {
        Some(s) => s.iter().take(terms).copied().collect(),
        None => (1..=terms).map(|k| 2 * k).collect(),
    };
    if schedule.len() < terms {
        return Err(FourierError::BadSchedule("schedule shorter than the term count"));
    }
    if schedule.first() == Some(&0) || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FourierError::BadSchedule("indices must be positive and strictly increasing"));
    }
    let top = schedule.last().copied().unwrap_or(0).max(terms);
    cf.check(top)?;
    check_lacunary(cf, top, quotient_cap)?;
    let sine = |n: usize| TrigPolynomial::sine(cf.q(n).clone(), big(cf.q(n)).recip());
    let sparse = schedule.iter().fold(TrigPolynomial::zero(), |acc, &m| acc.add(&sine(m)));
    let full = (1..=terms).fold(TrigPolynomial::zero(), |acc, k| acc.add(&sine(k)));
    let poly = sparse.add(&full.scale(delta));
    Ok(LacunarySpec {
        schedule,
        delta: delta.clone(),
        terms,
        sparse,
        full,
        poly,
    })
}

/// `q_n >= (1 + 1/(A + 1)) q_{n-1}` for `3 <= n <= upto`, `A` the largest
/// quotient seen, which must not exceed `cap`.
pub fn check_lacunary(cf: &CFExpansion, upto: usize, cap: u64) -> Result<(), FourierError> {
    cf.check(upto)?;
    let cap_big = BigInt::from(cap);
    let (idx, a_max) = (1..=upto)
        .map(|n| (n, cf.a(n).clone()))
        .max_by(|x, y| x.1.cmp(&y.1))
        .unwrap_or((1, BigInt::one()));
    if a_max > cap_big {
        return Err(FourierError::NotLacunary {
            index: idx,
            quotient: a_max,
            cap,
        });
    }
    let ratio_min = int(1) + (big(&a_max) + int(1)).recip();
    for n in 3..=upto {
        if big(cf.q(n)) < &ratio_min * big(cf.q(n - 1)) {
            return Err(FourierError::NotLacunary {
                index: n,
                quotient: cf.a(n).clone(),
                cap,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoelderModulus {
    /// Upper enclosure of `max |F(x+h) - F(x)| / (h ln(1/h))`.
    pub empirical_c: f64,
    pub worst_x: ExactScalar,
    pub worst_h: ExactScalar,
    pub evaluations: usize,
}

/// Enclosure of `p(x + h) - p(x)` computed termwise as
/// `-2 amp sin(pi(2 f x + f h + 2 phase)) sin(pi f h)`.
pub fn increment(p: &TrigPolynomial, x: &ExactScalar, h: &ExactScalar) -> Interval {
    let mut acc = Interval::ZERO;
    for t in p.terms() {
        let f = big(&t.freq);
        let a = sin_pi(&(&f * x * int(2) + &f * h + &t.phase * int(2)));
        let b = sin_pi(&(&f * h));
        acc = acc + (Interval::from_scalar(&t.amp) * a * b).scale(-2.0);
    }
    acc
}

/// Samples `h = 2^-j` and `x = i / samples`; the number of scales grows with
/// `samples` so doubling it also refines `h`.
pub fn hoelder_modulus(p: &TrigPolynomial, samples: usize) -> Result<HoelderModulus, FourierError> {
    if samples < 10 {
        return Err(FourierError::TooFewSamples);
    }
    let scales = (2 + 2 * (usize::BITS - samples.leading_zeros()) as usize).min(48);
    let ln2 = Interval::new(0.693_147_180_559_945_2, 0.693_147_180_559_945_4);
    let mut best = (0.0f64, int(0), int(0));
    let mut evaluations = 0;
    for j in 1..=scales {
        let h = ExactScalar::new(BigInt::one(), BigInt::one() << j);
        let denom = Interval::from_scalar(&h) * ln2.scale(j as f64);
        for i in 0..samples {
            let x = ExactScalar::new(BigInt::from(i), BigInt::from(samples));
            let r = increment(p, &x, &h).abs().div(&denom);
            evaluations += 1;
            if r.hi > best.0 {
                best = (r.hi, x, h.clone());
            }
        }
    }
    Ok(HoelderModulus {
        empirical_c: best.0,
        worst_x: best.1,
        worst_h: best.2,
        evaluations,
    })
}

/// `q_1 + ... + q_n <= 2 q_{n+1}`.
pub fn sum_bound_holds(cf: &CFExpansion, n: usize) -> Result<bool, FourierError> {
    cf.check(n + 1)?;
    let s: BigInt = (1..=n).map(|k| cf.q(k)).sum();
    Ok(s <= cf.q(n + 1) * 2)
}

/// `q_{n+1} * sum_{k=1}^{terms} 1/q_{n+k} <= 5 + 2 sqrt 5`, decided exactly.
pub fn reciprocal_bound_holds(cf: &CFExpansion, n: usize, terms: usize) -> Result<bool, FourierError> {
    cf.check(n + terms)?;
    let s = (1..=terms).fold(ExactScalar::zero(), |acc, k| acc + big(cf.q(n + k)).recip()) * big(cf.q(n + 1));
    let excess = s - int(5);
    Ok(!excess.is_positive() || &excess * &excess <= int(20))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LacunaryBounds {
    /// Sup-norm enclosures of the three parts of `F_s^(q_{m_n})`.
    pub a: Interval,
    pub b: Interval,
    pub c: Interval,
    /// `(2/pi) min(1, (1 - x)/x)` with `x = q ||q alpha||`, `q = q_{m_n}`.
    pub b_lower: f64,
    pub b_lower_ok: bool,
    pub b_dominates: bool,
    pub maj1_ok: bool,
    pub maj2_ok: bool,
}

/// Splits the ergodic sum of the sparse series at time `q_{m_n}` into the
/// terms before, at and after position `n` (1-based in `schedule`).
pub fn lacunary_bounds(cf: &CFExpansion, schedule: &[usize], n: usize) -> Result<LacunaryBounds, FourierError> {
    if n == 0 || n > schedule.len() {
        return Err(FourierError::BadSchedule("position outside the schedule"));
    }
    let top = *schedule.iter().max().expect("nonempty");
    cf.check(top)?;
    let alpha = cf.alpha();
    let t = cf.q(schedule[n - 1]).clone();
    let coef = |m: usize| {
        let v = big(cf.q(m));
        let num = sin_pi(&(&v * big(&t) * alpha)).abs();
        let den = sin_pi(&(&v * alpha)).abs();
        num.div(&den).div(&Interval::from_scalar(&v))
    };
    let sum = |range: &[usize]| range.iter().fold(Interval::ZERO, |acc, &m| acc + coef(m));
    let a = sum(&schedule[..n - 1]);
    let b = coef(schedule[n - 1]);
    let c = sum(&schedule[n..]);
    let x = Interval::from_scalar(&(big(&t) * cf.norm_q_alpha(schedule[n - 1])));
    let ratio_term = (Interval::ONE - x).div(&x);
    let two_over_pi = Interval::point(2.0).div(&Interval::pi());
    let b_lower = if ratio_term.lo >= 1.0 {
        two_over_pi.lo
    } else {
        (two_over_pi * ratio_term).lo
    };
    let m = schedule[n - 1];
    let maj2_terms = cf.validated_depth.saturating_sub(m).min(30);
    Ok(LacunaryBounds {
        a,
        b,
        c,
        b_lower,
        b_lower_ok: b.lo >= b_lower,
        b_dominates: b.lo > (a + c).hi,
        maj1_ok: sum_bound_holds(cf, m)?,
        maj2_ok: maj2_terms == 0 || reciprocal_bound_holds(cf, m, maj2_terms)?,
    })
}

/// A roof function for the transfer series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Roof {
    Step(StepFunction),
    Trig(TrigPolynomial),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSq {
    Exact(f64),
    Enclosure(Interval),
}

impl NormSq {
    pub fn upper(&self) -> f64 {
        match self {
            NormSq::Exact(v) => *v,
            NormSq::Enclosure(i) => i.hi,
        }
    }
}

impl Roof {
    fn centered(&self) -> Roof {
        match self {
            Roof::Step(f) => Roof::Step(f.sub(&StepFunction::constant(f.integral()))),
            Roof::Trig(p) => Roof::Trig(p.sub(&TrigPolynomial::constant(p.constant_term().clone()))),
        }
    }

    fn ergodic_sum(&self, alpha: &ExactScalar, q: u64) -> Result<Roof, FourierError> {
        Ok(match self {
            Roof::Step(f) => Roof::Step(f.ergodic_sum(alpha, q as i64)?),
            Roof::Trig(p) => Roof::Trig(p.ergodic_sum(alpha, q)),
        })
    }

    fn rotate(&self, gamma: &ExactScalar) -> Roof {
        match self {
            Roof::Step(f) => Roof::Step(f.rotate(gamma)),
            Roof::Trig(p) => Roof::Trig(p.rotate(gamma)),
        }
    }

    fn combine(&self, other: &Roof, subtract: bool) -> Roof {
        match (self, other) {
            (Roof::Step(a), Roof::Step(b)) => Roof::Step(if subtract { a.sub(b) } else { a.add(b) }),
            (Roof::Trig(a), Roof::Trig(b)) => Roof::Trig(if subtract { a.sub(b) } else { a.add(b) }),
            _ => panic!("mixed roof kinds"),
        }
    }

    fn zero_like(&self) -> Roof {
        match self {
            Roof::Step(_) => Roof::Step(StepFunction::zero()),
            Roof::Trig(_) => Roof::Trig(TrigPolynomial::zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Roof::Step(f) => f.is_constant() && f.values()[0].is_zero(),
            Roof::Trig(p) => p.is_zero(),
        }
    }

    pub fn norm_sq(&self) -> NormSq {
        match self {
            Roof::Step(f) => NormSq::Exact(crate::exact::to_f64(&f.l2_norm_sq())),
            Roof::Trig(p) => NormSq::Enclosure(p.l2_norm_sq()),
        }
    }

    /// Exact squared norm for step roofs.
    pub fn exact_norm_sq(&self) -> Option<ExactScalar> {
        match self {
            Roof::Step(f) => Some(f.l2_norm_sq()),
            Roof::Trig(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferIncrement {
    pub n: usize,
    pub q: BigInt,
    pub norm_sq: NormSq,
    pub exact_norm_sq: Option<ExactScalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferSeries {
    /// `sum_{k <= K} q_{n_k} alpha mod 1`.
    pub beta_k: ExactScalar,
    pub g_k: Roof,
    /// Always true on return; a failure is reported as an error.
    pub residual_zero: bool,
    pub increments: Vec<TransferIncrement>,
    pub warnings: Vec<String>,
}

/// `g_K = sum_{k <= K} f_0^(q_{n_k})(. + beta_{k-1})` with `f_0` the
/// centered roof, checked against `f(. + beta_K) - f = g_K o R - g_K`.
pub fn transfer_series(roof: &Roof, cf: &CFExpansion, subsequence: &[usize], k: usize) -> Result<TransferSeries, FourierError> {
    if subsequence.len() < k {
        return Err(FourierError::BadSchedule("subsequence shorter than K"));
    }
    let used = &subsequence[..k];
    if used.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FourierError::BadSchedule("indices must be strictly increasing"));
    }
    if let Some(&last) = used.last() {
        cf.check(last)?;
    }
    let alpha = cf.alpha();
    let f0 = roof.centered();
    let mut beta = ExactScalar::zero();
    let mut g = roof.zero_like();
    let mut increments = Vec::with_capacity(k);
    for &n in used {
        let q = cf.q(n).to_u64().ok_or(FourierError::BadTime)?;
        let inc = f0.ergodic_sum(alpha, q)?;
        increments.push(TransferIncrement {
            n,
            q: cf.q(n).clone(),
            norm_sq: inc.norm_sq(),
            exact_norm_sq: inc.exact_norm_sq(),
        });
        g = g.combine(&inc.rotate(&beta), false);
        beta = frac(&(beta + big(cf.q(n)) * alpha));
    }
    let lhs = roof.rotate(&beta).combine(roof, true);
    let rhs = g.rotate(alpha).combine(&g, true);
    if !lhs.combine(&rhs, true).is_zero() {
        return Err(FourierError::IdentityFailed(k));
    }
    let mut warnings = Vec::new();
    for w in increments.windows(2) {
        if w[1].norm_sq.upper() > w[0].norm_sq.upper() {
            warnings.push(format!("increment norm grows from n = {} to n = {}", w[0].n, w[1].n));
        }
    }
    Ok(TransferSeries {
        beta_k: beta,
        g_k: g,
        residual_zero: true,
        increments,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2CobSum {
    /// Encloses `sum_{0 < |n| <= N} ||n beta||^2 ||n gamma||^2 / (n^2 ||n alpha||^2)`.
    pub partial: Interval,
    /// Encloses the same sum with `|sin(pi .)|` in place of `||.||`.
    pub sine_enclosure: Interval,
    /// `(N_j, partial sum up to N_j)` at `N_j = 2^j`.
    pub checkpoints: Vec<(u64, Interval)>,
    /// Trend of the increments between checkpoints.
    pub trend: Trend,
}

pub fn l2_cob_sum(cf: &CFExpansion, beta: &ExactScalar, gamma: &ExactScalar, n_max: u64) -> Result<L2CobSum, FourierError> {
    if n_max == 0 {
        return Err(FourierError::BadSchedule("N must be at least 1"));
    }
    let mut rb = Residue::new(beta);
    let mut rg = Residue::new(gamma);
    let mut ra = Residue::new(cf.alpha());
    let mut acc = Interval::ZERO;
    let mut checkpoints = Vec::new();
    for n in 1..=n_max {
        rb.advance();
        rg.advance();
        ra.advance();
        let db = rb.dist();
        let dg = rg.dist();
        if db.hi == 0.0 || dg.hi == 0.0 {
            // zero term
        } else {
            let da = ra.dist();
            if da.lo <= 0.0 {
                return Err(FourierError::ResonantAlpha(n));
            }
            let nn = Interval::point(n as f64).sqr();
            acc = acc + (db.sqr() * dg.sqr()).div(&(da.sqr() * nn));
        }
        if n.is_power_of_two() || n == n_max {
            checkpoints.push((n, acc.scale(2.0)));
        }
    }
    let partial = acc.scale(2.0);
    let lo = Interval::point(16.0).div(&pi_sq());
    let hi = pi_sq().sqr().div(&Interval::point(4.0));
    let sine_enclosure = Interval::new((partial * lo).lo, (partial * hi).hi);
    let incs: Vec<f64> = checkpoints.windows(2).map(|w| w[1].1.mid() - w[0].1.mid()).collect();
    Ok(L2CobSum {
        partial,
        sine_enclosure,
        checkpoints,
        trend: Trend::of_f64(&incs),
    })
}

/// `||x||` as an interval, for reports.
pub fn norm_dist_enclosure(x: &ExactScalar) -> Interval {
    Interval::from_scalar(&norm_dist(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::NamedConstant;
    use crate::continued_fractions::{cf_expand, AlphaSpec};
    use crate::step_circle::StepKind;
    use proptest::prelude::*;

    fn pi_cf() -> CFExpansion {
        cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 256, 24).unwrap()
    }

    fn golden_cf() -> CFExpansion {
        cf_expand(&AlphaSpec::Named(NamedConstant::Golden), 256, 60).unwrap()
    }

    fn f_step() -> StepFunction {
        StepFunction::make(&StepKind::F).unwrap()
    }

    #[test]
    fn series_norm_at_time_one() {
        let cf = pi_cf();
        let spec = FourierSeriesSpec::Step(f_step());
        let r = series_norm(&spec, &cf, 1, 20_000).unwrap();
        assert!(r.norm_sq.contains(1.0), "{}", r.norm_sq);
        assert!(r.tail_bound < 1e-3);
    }

    #[test]
    fn series_norm_matches_exact_for_f() {
        let cf = pi_cf();
        let spec = FourierSeriesSpec::Step(f_step());
        let r = series_norm(&spec, &cf, 7, 20_000).unwrap();
        assert!(r.norm_sq.contains(1.0), "{}", r.norm_sq);
        let phi = StepFunction::make(&StepKind::PhiBeta(ratio(2, 7))).unwrap();
        let exact = crate::exact::to_f64(&phi.ergodic_sum(cf.alpha(), 5).unwrap().l2_norm_sq());
        let r = series_norm(&FourierSeriesSpec::Step(phi), &cf, 5, 20_000).unwrap();
        assert!(r.norm_sq.lo <= exact + 1e-12 && exact <= r.norm_sq.hi + 1e-12);
    }

    #[test]
    fn series_norm_trig_is_exact() {
        let cf = golden_cf();
        let p = TrigPolynomial::sine(BigInt::from(3), int(1));
        let spec = FourierSeriesSpec::Trig(p.clone());
        let r = series_norm(&spec, &cf, 1, 10).unwrap();
        assert!(r.norm_sq.contains(0.5));
        assert_eq!(r.tail_bound, 0.0);
        assert!(matches!(
            series_norm(&spec, &cf, 1, 2),
            Err(FourierError::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn single_coefficient_lower_bound() {
        // r = q_n alone contributes at least 4 delta^2 / pi^2 when a_{n+1} >= 2
        let cf = pi_cf();
        for n in [1usize, 3] {
            assert!(cf.a(n + 1) >= &BigInt::from(2));
            let q = cf.q(n);
            let d = dirichlet_sq_ratio(
                &(big(q) * cf.alpha()).numer().clone(),
                (big(q) * cf.alpha()).denom(),
                q.to_u64().unwrap(),
            );
            let term = d.div(&Interval::from_scalar(&big(q)).sqr());
            assert!(term.lo >= (Interval::point(4.0).div(&pi_sq())).hi);
        }
    }

    #[test]
    fn gamma_examples() {
        let q = BigInt::from(7);
        let g = gamma_coeff(&[half()], &q);
        assert_eq!(g.pi_scaled_exact, Some(int(1)));
        assert!(g.value.contains(1.0 / std::f64::consts::PI));
        assert_eq!(gamma_coeff(&[half(), int(3)], &q).pi_scaled_exact, Some(int(0)));
        let beta = ratio(2, 9);
        let g = gamma_coeff(&[half(), beta.clone()], &q);
        let direct = 2.0 * (std::f64::consts::PI * 7.0 * 2.0 / 9.0).sin().abs();
        assert!(g.pi_scaled_exact.is_none());
        assert!((g.pi_scaled.mid() - direct).abs() < 1e-12);
        let g = gamma_coeff(&[half(), ratio(1, 6)], &BigInt::from(5));
        assert_eq!(g.pi_scaled_exact, Some(int(1)));
    }

    #[test]
    fn fourmeth_examples() {
        let cf = cf_expand(&"cf:3,(2)".parse().unwrap(), 64, 20).unwrap();
        let beta = ratio(1, 3);
        let idx: Vec<usize> = (5..=15).filter(|&n| !(cf.q(n) % 3u32).is_zero()).collect();
        let r = fourmeth_check(&cf, &[half(), beta], &ratio(1, 4), &idx, 10).unwrap();
        assert!(r.condgamma_ok && r.condak_ok);
        assert!(r.m.is_none());
        assert!(r.conclusion.is_some());

        let near = frac(&(big(cf.q(4)) * cf.alpha()));
        let r = fourmeth_check(&cf, &[half(), near], &ratio(1, 4), &[10, 12, 14], 10).unwrap();
        assert!(!r.condgamma_ok);
    }

    #[test]
    fn hoelder_basics() {
        let cf = pi_cf();
        let spec = hoelder_build(&cf, None, &ratio(1, 10), 10, DEFAULT_QUOTIENT_CAP).unwrap();
        assert_eq!(spec.eval(&int(0)), Interval::ZERO);
        for x in [ratio(1, 7), ratio(3, 11)] {
            let a = spec.eval(&x);
            let b = spec.eval(&-x.clone());
            assert!((a.mid() + b.mid()).abs() < 1e-12);
        }
        for n in 1..=6 {
            let v = spec.full.ergodic_norm_sq(cf.alpha(), cf.q_u64(n));
            assert!(v.hi <= (pi_sq().scale(4.0)).lo);
        }
        let strict = hoelder_build(&cf, None, &ratio(1, 10), 10, 100);
        assert!(matches!(strict, Err(FourierError::NotLacunary { .. })));
        assert!(hoelder_build(&cf, Some(&[3, 2]), &ratio(1, 10), 2, 1000).is_err());
    }

    #[test]
    fn hoelder_modulus_examples() {
        let c = hoelder_modulus(&TrigPolynomial::constant(int(3)), 16).unwrap();
        assert_eq!(c.empirical_c, 0.0);
        let single = TrigPolynomial::sine(BigInt::from(5), ratio(1, 5));
        let r = hoelder_modulus(&single, 32).unwrap();
        // |sin' | <= 2 pi, so the ratio is at most 2 pi / ln(1/h) <= 2 pi / ln 2
        assert!(r.empirical_c <= 2.0 * std::f64::consts::PI / std::f64::consts::LN_2 + 1e-9);
        assert!(hoelder_modulus(&single, 5).is_err());

        let cf = golden_cf();
        let spec = hoelder_build(&cf, None, &ratio(1, 10), 12, DEFAULT_QUOTIENT_CAP).unwrap();
        let a = hoelder_modulus(&spec.poly, 32).unwrap().empirical_c;
        let b = hoelder_modulus(&spec.poly, 64).unwrap().empirical_c;
        assert!(a.is_finite() && b.is_finite());
        assert!(b <= 2.0 * a + 1.0);
    }

    #[test]
    fn lacunary_examples() {
        let fib = golden_cf();
        assert_eq!(fib.q(5), &BigInt::from(8));
        // 1 + 2 + 3 + 5 = 11 <= 16 (q_1 = 1)
        assert!(sum_bound_holds(&fib, 4).unwrap());
        for n in 1..=20 {
            assert!(sum_bound_holds(&fib, n).unwrap());
            assert!(reciprocal_bound_holds(&fib, n, 30).unwrap());
        }
        let schedule: Vec<usize> = (1..=8).map(|k| 2 * k).collect();
        for n in 1..=8 {
            let b = lacunary_bounds(&fib, &schedule, n).unwrap();
            assert!(b.maj1_ok && b.maj2_ok);
            assert!(b.b_lower_ok, "n = {n}: {} vs {}", b.b, b.b_lower);
            let q = fib.q(schedule[n - 1]);
            let direct = {
                let t = big(q) * big(q) * fib.alpha();
                sin_pi(&t).abs().div(&sin_pi(&(big(q) * fib.alpha())).abs()).div(&Interval::from_scalar(&big(q)))
            };
            assert!(b.b.overlaps(&direct));
        }
    }

    #[test]
    fn transfer_trig_roof() {
        let cf = golden_cf();
        let roof = Roof::Trig(TrigPolynomial::cosine(BigInt::one(), int(1), int(0)).add(&TrigPolynomial::constant(int(2))));
        let t = transfer_series(&roof, &cf, &[3], 1).unwrap();
        assert!(t.residual_zero);
        assert_eq!(t.beta_k, frac(&(big(cf.q(3)) * cf.alpha())));
    }

    #[test]
    fn transfer_step_roof_even_schedule() {
        let cf = cf_expand(&"cf:1,4,1,6,1,8,1,10,1,12,1,14,(2)".parse().unwrap(), 64, 14).unwrap();
        let even: Vec<usize> = (1..=12).filter(|&n| !cf.q_is_odd(n)).collect();
        assert!(even.len() >= 3);
        let roof = Roof::Step(f_step());
        let t = transfer_series(&roof, &cf, &even, 3).unwrap();
        for inc in &t.increments {
            let bound = ExactScalar::new(BigInt::from(4), cf.a(inc.n + 1).clone());
            assert!(inc.exact_norm_sq.clone().unwrap() <= bound);
        }
    }

    #[test]
    fn transfer_all_odd_no_decay() {
        let cf = cf_expand(&"cf:3,(2)".parse().unwrap(), 64, 12).unwrap();
        let t = transfer_series(&Roof::Step(f_step()), &cf, &[2, 3, 4, 5], 4).unwrap();
        assert!(t.increments.iter().all(|i| i.exact_norm_sq == Some(int(1))));
    }

    #[test]
    fn l2_cob_examples() {
        let cf = golden_cf();
        let z = l2_cob_sum(&cf, &ratio(1, 3), &int(0), 200).unwrap();
        assert_eq!(z.partial, Interval::ZERO);
        let r = l2_cob_sum(&cf, &ratio(1, 3), &ratio(2, 5), 512).unwrap();
        assert!(r.checkpoints.windows(2).all(|w| w[0].1.lo <= w[1].1.hi));
        assert!(r.sine_enclosure.lo <= r.partial.hi * 10.0);

        let beta = frac(&(big(cf.q(5)) * cf.alpha()));
        let gamma = frac(&(big(cf.q(7)) * cf.alpha()));
        let t = l2_cob_sum(&cf, &beta, &gamma, 1 << 12).unwrap();
        assert_eq!(t.trend, Trend::Decreasing);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn series_norm_encloses_exact(num in 1i64..50, q in 1u64..40) {
            let cf = golden_cf();
            let beta = ratio(num, 53);
            let phi = StepFunction::make(&StepKind::PhiBeta(beta)).unwrap();
            let exact = crate::exact::to_f64(&phi.ergodic_sum(cf.alpha(), q as i64).unwrap().l2_norm_sq());
            let r = series_norm(&FourierSeriesSpec::Step(phi), &cf, q, 4000).unwrap();
            prop_assert!(r.norm_sq.lo <= exact + 1e-9 && exact <= r.norm_sq.hi + 1e-9,
                "{} not in {}", exact, r.norm_sq);
        }

        #[test]
        fn transfer_identity_is_exact(k in 1usize..5, shift in 0usize..3) {
            let cf = golden_cf();
            let idx: Vec<usize> = (0..k).map(|i| 2 + shift + 2 * i).collect();
            let roof = Roof::Step(StepFunction::make(&StepKind::PhiBeta(ratio(2, 7))).unwrap());
            let t = transfer_series(&roof, &cf, &idx, k).unwrap();
            prop_assert!(t.residual_zero);
        }
    }
}
