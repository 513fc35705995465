//! Piecewise-constant functions on the circle `[0, 1)` with exact rational
//! breakpoints, and their ergodic sums over a rotation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{big, common_denominator, frac, half, int, scaled_numerator, ExactScalar};

/// Default cap on the number of breakpoints an ergodic sum may create.
pub const DEFAULT_BREAKPOINT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("breakpoint budget {budget} exceeded ({required} required)")]
    BudgetExceeded { budget: u64, required: u64 },
    #[error("breakpoints must be strictly increasing in [0, 1)")]
    BadBreakpoints,
    #[error("breakpoints and values differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("a step function needs at least one arc")]
    Empty,
    #[error("roof values must be positive")]
    NonPositiveRoof,
    #[error("indicator interval must satisfy lo <= hi")]
    BadInterval,
}

/// Right-continuous step function: `values[i]` holds on
/// `[breakpoints[i], breakpoints[i + 1])`, the last arc wrapping through 1.
///
/// The representation is canonical, so structural equality is functional
/// equality. A constant function is stored as a single arc starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breakpoints: Vec<ExactScalar>,
    values: Vec<ExactScalar>,
}

/// Constructors for the standard cocycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    /// `+1` on `[0, 1/2)`, `-1` on `[1/2, 1)`.
    F,
    /// `x -> F(x - beta)/2 - F(x)/2`.
    PhiBeta(ExactScalar),
    /// `1_[0, beta) - beta`.
    Zeta(ExactScalar),
    /// `a` on `[0, 1/2)`, `b` on `[1/2, 1)`.
    FAb(ExactScalar, ExactScalar),
    /// Indicator of the arc `[lo, hi)` taken mod 1.
    Indicator(ExactScalar, ExactScalar),
    Constant(ExactScalar),
}

/// Exact level-set measures; the measures sum to 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DistributionTable {
    pub entries: BTreeMap<ExactScalar, ExactScalar>,
}

impl DistributionTable {
    pub fn measure_of(&self, v: &ExactScalar) -> ExactScalar {
        self.entries.get(v).cloned().unwrap_or_else(ExactScalar::zero)
    }

    /// Total mass carried by values satisfying `pred`.
    pub fn measure_where(&self, mut pred: impl FnMut(&ExactScalar) -> bool) -> ExactScalar {
        self.entries
            .iter()
            .filter(|(v, _)| pred(v))
            .fold(ExactScalar::zero(), |acc, (_, m)| acc + m)
    }

    pub fn total(&self) -> ExactScalar {
        self.measure_where(|_| true)
    }

    pub fn values(&self) -> impl Iterator<Item = &ExactScalar> {
        self.entries.keys()
    }

    /// Total-variation distance `sum |mu(v) - nu(v)| / 2`.
    pub fn tv_distance(&self, other: &DistributionTable) -> ExactScalar {
        let mut keys: Vec<&ExactScalar> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        let sum = keys
            .into_iter()
            .fold(ExactScalar::zero(), |acc, k| acc + (self.measure_of(k) - other.measure_of(k)).abs());
        sum / int(2)
    }

    /// Pushforward under `v -> c v`.
    pub fn scaled(&self, c: &ExactScalar) -> DistributionTable {
        let mut entries = BTreeMap::new();
        for (v, m) in &self.entries {
            *entries.entry(v * c).or_insert_with(ExactScalar::zero) += m;
        }
        DistributionTable { entries }
    }
}

impl StepFunction {
    pub fn constant(c: ExactScalar) -> Self {
        StepFunction {
            breakpoints: vec![ExactScalar::zero()],
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(ExactScalar::zero())
    }

    /// Builds from explicit arcs, validating order and canonicalizing.
    pub fn from_arcs(breakpoints: Vec<ExactScalar>, values: Vec<ExactScalar>) -> Result<Self, StepError> {
        if breakpoints.len() != values.len() {
            return Err(StepError::LengthMismatch(breakpoints.len(), values.len()));
        }
        if breakpoints.is_empty() {
            return Err(StepError::Empty);
        }
        let in_range = breakpoints
            .iter()
            .all(|b| !b.is_negative() && b < &ExactScalar::one());
        let increasing = breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !in_range || !increasing {
            return Err(StepError::BadBreakpoints);
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Builds from `(start, value)` pairs in any order; starts are reduced
    /// mod 1 and must be distinct afterwards.
    fn from_unsorted(mut arcs: Vec<(ExactScalar, ExactScalar)>) -> Self {
        for a in arcs.iter_mut() {
            a.0 = frac(&a.0);
        }
        arcs.sort_by(|x, y| x.0.cmp(&y.0));
        let (b, v) = arcs.into_iter().unzip();
        Self::canonical(b, v)
    }

    fn canonical(breakpoints: Vec<ExactScalar>, values: Vec<ExactScalar>) -> Self {
        let n = values.len();
        let keep: Vec<usize> = (0..n).filter(|&i| values[i] != values[(i + n - 1) % n]).collect();
        if keep.is_empty() {
            return Self::constant(values[0].clone());
        }
        StepFunction {
            breakpoints: keep.iter().map(|&i| breakpoints[i].clone()).collect(),
            values: keep.iter().map(|&i| values[i].clone()).collect(),
        }
    }

    pub fn make(kind: &StepKind) -> Result<Self, StepError> {
        Ok(match kind {
            StepKind::F => StepFunction {
                breakpoints: vec![ExactScalar::zero(), half()],
                values: vec![int(1), int(-1)],
            },
            StepKind::PhiBeta(beta) => {
                let f = Self::make(&StepKind::F)?;
                f.rotate(&-beta).scale(&half()).sub(&f.scale(&half()))
            }
            StepKind::Zeta(beta) => {
                let b = frac(beta);
                if b.is_zero() {
                    Self::zero()
                } else {
                    Self::canonical(
                        vec![ExactScalar::zero(), b.clone()],
                        vec![int(1) - &b, -b],
                    )
                }
            }
            StepKind::FAb(a, b) => {
                if !a.is_positive() || !b.is_positive() {
                    return Err(StepError::NonPositiveRoof);
                }
                Self::canonical(vec![ExactScalar::zero(), half()], vec![a.clone(), b.clone()])
            }
            StepKind::Indicator(lo, hi) => {
                if lo > hi {
                    return Err(StepError::BadInterval);
                }
                let len = hi - lo;
                if len >= ExactScalar::one() {
                    Self::constant(int(1))
                } else if len.is_zero() {
                    Self::zero()
                } else {
                    let base = Self::canonical(
                        vec![ExactScalar::zero(), len],
                        vec![int(1), int(0)],
                    );
                    base.rotate(&-lo)
                }
            }
            StepKind::Constant(c) => Self::constant(c.clone()),
        })
    }

    pub fn breakpoints(&self) -> &[ExactScalar] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[ExactScalar] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    /// Number of arcs in the canonical form.
    pub fn arc_count(&self) -> usize {
        self.values.len()
    }

    /// `(start, length, value)` for every arc.
    pub fn arcs(&self) -> impl Iterator<Item = (&ExactScalar, ExactScalar, &ExactScalar)> + '_ {
        let n = self.breakpoints.len();
        (0..n).map(move |i| {
            let start = &self.breakpoints[i];
            let len = if n == 1 {
                ExactScalar::one()
            } else if i + 1 < n {
                &self.breakpoints[i + 1] - start
            } else {
                ExactScalar::one() - start + &self.breakpoints[0]
            };
            (start, len, &self.values[i])
        })
    }

    /// Value at `x` (taken mod 1), right-continuous.
    pub fn eval(&self, x: &ExactScalar) -> &ExactScalar {
        let x = frac(x);
        let idx = self.breakpoints.partition_point(|b| b <= &x);
        if idx == 0 {
            self.values.last().expect("non-empty")
        } else {
            &self.values[idx - 1]
        }
    }

    /// `x -> f(x + gamma)`.
    pub fn rotate(&self, gamma: &ExactScalar) -> Self {
        if self.is_constant() {
            return self.clone();
        }
        let arcs = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(b, v)| (b - gamma, v.clone()))
            .collect();
        Self::from_unsorted(arcs)
    }

    /// Pointwise `op(f, g)` over the merged breakpoint set.
    pub fn zip_with(&self, other: &Self, op: impl Fn(&ExactScalar, &ExactScalar) -> ExactScalar) -> Self {
        let mut pts: Vec<&ExactScalar> = self.breakpoints.iter().chain(&other.breakpoints).collect();
        pts.sort();
        pts.dedup();
        let values = pts.iter().map(|x| op(self.eval(x), other.eval(x))).collect();
        Self::canonical(pts.into_iter().cloned().collect(), values)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        self.map(|v| v * c)
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    pub fn map(&self, op: impl Fn(&ExactScalar) -> ExactScalar) -> Self {
        let values = self.values.iter().map(op).collect();
        Self::canonical(self.breakpoints.clone(), values)
    }

    /// Birkhoff sum `f + f o R + ... + f o R^(n-1)` for `R x = x + alpha`;
    /// negative `n` uses `f^(-m) = -f^(m) o R^(-m)`.
    pub fn ergodic_sum(&self, alpha: &ExactScalar, n: i64) -> Result<Self, StepError> {
        self.ergodic_sum_with_budget(alpha, n, DEFAULT_BREAKPOINT_BUDGET)
    }

    pub fn ergodic_sum_with_budget(&self, alpha: &ExactScalar, n: i64, budget: u64) -> Result<Self, StepError> {
        if n < 0 {
            let m = n.unsigned_abs() as i64;
            let pos = self.ergodic_sum_with_budget(alpha, m, budget)?;
            return Ok(pos.rotate(&-(alpha * int(m))).neg());
        }
        let n = n as u64;
        if n == 0 {
            return Ok(Self::zero());
        }
        if self.is_constant() {
            return Ok(Self::constant(&self.values[0] * int(n as i64)));
        }
        let k = self.breakpoints.len() as u64;
        let required = n.saturating_mul(k);
        if required > budget {
            return Err(StepError::BudgetExceeded { budget, required });
        }

        // Integer coordinates over a common denominator.
        let den = common_denominator(self.breakpoints.iter().chain(std::iter::once(alpha)));
        let step = scaled_numerator(&frac(alpha), &den);
        let starts: Vec<BigInt> = self.breakpoints.iter().map(|b| scaled_numerator(b, &den)).collect();
        let jumps: Vec<ExactScalar> = (0..self.values.len())
            .map(|i| &self.values[i] - &self.values[(i + self.values.len() - 1) % self.values.len()])
            .collect();

        // Value at 0 is the sum of f along the orbit of 0.
        let mut v0 = ExactScalar::zero();
        let mut pos = BigInt::zero();
        for _ in 0..n {
            let idx = starts.partition_point(|b| b <= &pos);
            v0 += if idx == 0 { self.values.last().unwrap() } else { &self.values[idx - 1] };
            pos += &step;
            if pos >= den {
                pos -= &den;
            }
        }

        // Jumps of f(x + j alpha) sit at b_i - j alpha.
        let mut events: Vec<(BigInt, usize)> = Vec::with_capacity(required as usize);
        for (i, b) in starts.iter().enumerate() {
            let mut p = b.clone();
            for _ in 0..n {
                events.push((p.clone(), i));
                p -= &step;
                if p.is_negative() {
                    p += &den;
                }
            }
        }
        events.sort_unstable_by(|x, y| x.0.cmp(&y.0));

        let den_q = big(&den);
        let mut breakpoints = vec![ExactScalar::zero()];
        let mut values = vec![v0.clone()];
        let mut current = v0;
        let mut idx = 0;
        while idx < events.len() {
            let at = &events[idx].0;
            let mut jump = ExactScalar::zero();
            let mut end = idx;
            while end < events.len() && &events[end].0 == at {
                jump += &jumps[events[end].1];
                end += 1;
            }
            if !at.is_zero() && !jump.is_zero() {
                current += jump;
                breakpoints.push(big(at) / &den_q);
                values.push(current.clone());
            }
            idx = end;
        }
        Ok(Self::canonical(breakpoints, values))
    }

    pub fn distribution(&self) -> DistributionTable {
        let mut entries = BTreeMap::new();
        for (_, len, v) in self.arcs() {
            *entries.entry(v.clone()).or_insert_with(ExactScalar::zero) += len;
        }
        DistributionTable { entries }
    }

    pub fn integral(&self) -> ExactScalar {
        self.arcs().fold(ExactScalar::zero(), |acc, (_, len, v)| acc + len * v)
    }

    pub fn l1_norm(&self) -> ExactScalar {
        self.arcs().fold(ExactScalar::zero(), |acc, (_, len, v)| acc + len * v.abs())
    }

    /// Squared L2 norm.
    pub fn l2_norm_sq(&self) -> ExactScalar {
        self.arcs().fold(ExactScalar::zero(), |acc, (_, len, v)| acc + len * v * v)
    }

    pub fn sup_norm(&self) -> ExactScalar {
        self.values.iter().map(|v| v.abs()).max().expect("non-empty")
    }

    /// Sum of absolute jumps around the circle.
    pub fn variation(&self) -> ExactScalar {
        self.discontinuities()
            .iter()
            .fold(ExactScalar::zero(), |acc, (_, j)| acc + j.abs())
    }

    /// `(location, value after - value before)` for every jump, sorted.
    pub fn discontinuities(&self) -> Vec<(ExactScalar, ExactScalar)> {
        if self.is_constant() {
            return Vec::new();
        }
        let n = self.values.len();
        (0..n)
            .map(|i| {
                (
                    self.breakpoints[i].clone(),
                    &self.values[i] - &self.values[(i + n - 1) % n],
                )
            })
            .collect()
    }

    pub fn is_integer_valued(&self) -> bool {
        self.values.iter().all(|v| v.is_integer())
    }

    /// Sorted distinct values.
    pub fn value_set(&self) -> Vec<ExactScalar> {
        let mut v = self.values.clone();
        v.sort();
        v.dedup();
        v
    }
}

/// Least common multiple of the breakpoint denominators.
pub fn breakpoint_denominator(f: &StepFunction) -> BigInt {
    f.breakpoints.iter().fold(BigInt::one(), |acc, b| acc.lcm(b.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use proptest::prelude::*;

    fn f() -> StepFunction {
        StepFunction::make(&StepKind::F).unwrap()
    }

    /// Naive ergodic sum by repeated rotation and addition.
    fn naive_sum(g: &StepFunction, alpha: &ExactScalar, n: u32) -> StepFunction {
        (0..n).fold(StepFunction::zero(), |acc, j| acc.add(&g.rotate(&(alpha * int(j as i64)))))
    }

    #[test]
    fn phi_beta_explicit_form() {
        for beta in [ratio(1, 5), ratio(1, 3), ratio(1, 2), ratio(3, 7)] {
            let phi = StepFunction::make(&StepKind::PhiBeta(beta.clone())).unwrap();
            let expected = StepFunction::make(&StepKind::Indicator(int(0), beta.clone()))
                .unwrap()
                .neg()
                .add(&StepFunction::make(&StepKind::Indicator(half(), &beta + half())).unwrap());
            assert_eq!(phi, expected);
        }
        assert_eq!(StepFunction::make(&StepKind::PhiBeta(ratio(1, 2))).unwrap(), f().neg());
        assert_eq!(StepFunction::make(&StepKind::PhiBeta(int(0))).unwrap(), StepFunction::zero());
    }

    #[test]
    fn f_ab_integral() {
        let g = StepFunction::make(&StepKind::FAb(int(3), int(1))).unwrap();
        assert_eq!(g.integral(), int(2));
        assert_eq!(g.eval(&ratio(1, 4)), &int(3));
        assert_eq!(g.eval(&ratio(1, 2)), &int(1));
        assert!(StepFunction::make(&StepKind::FAb(int(0), int(1))).is_err());
    }

    #[test]
    fn rotation_examples() {
        let g = f();
        assert_eq!(g.rotate(&int(0)), g);
        assert_eq!(g.rotate(&half()), g.neg());
        let gamma = ratio(2, 9);
        assert_eq!(g.rotate(&gamma).rotate(&-gamma.clone()), g);
    }

    #[test]
    fn phi_beta_distribution_and_jumps() {
        let beta = ratio(2, 7);
        let phi = StepFunction::make(&StepKind::PhiBeta(beta.clone())).unwrap();
        let d = phi.distribution();
        assert_eq!(d.measure_of(&int(-1)), beta);
        assert_eq!(d.measure_of(&int(1)), beta);
        assert_eq!(d.measure_of(&int(0)), int(1) - &beta * int(2));
        let jumps = phi.discontinuities();
        let expected = vec![
            (int(0), int(-1)),
            (beta.clone(), int(1)),
            (half(), int(1)),
            (&beta + half(), int(-1)),
        ];
        assert_eq!(jumps, expected);
        assert_eq!(f().variation(), int(4));
        assert!(StepFunction::zero().discontinuities().is_empty());
    }

    #[test]
    fn ergodic_sum_small_cases() {
        let g = f();
        let alpha = ratio(13, 41);
        assert_eq!(g.ergodic_sum(&alpha, 0).unwrap(), StepFunction::zero());
        assert_eq!(g.ergodic_sum(&alpha, 1).unwrap(), g);
        let (m, n) = (3i64, 5i64);
        let lhs = g.ergodic_sum(&alpha, m + n).unwrap();
        let rhs = g
            .ergodic_sum(&alpha, n)
            .unwrap()
            .add(&g.ergodic_sum(&alpha, m).unwrap().rotate(&(&alpha * int(n))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn negative_times_invert() {
        let g = StepFunction::make(&StepKind::FAb(int(3), int(1))).unwrap();
        let alpha = ratio(5, 17);
        for m in 1..6 {
            let fwd = g.ergodic_sum(&alpha, m).unwrap();
            let back = g.ergodic_sum(&alpha, -m).unwrap();
            // f^(-m) o R^m = -f^(m)
            assert_eq!(back.rotate(&(&alpha * int(m))), fwd.neg());
        }
    }

    #[test]
    fn budget_enforced() {
        let err = f().ergodic_sum_with_budget(&ratio(1, 3), 10, 5).unwrap_err();
        assert_eq!(err, StepError::BudgetExceeded { budget: 5, required: 20 });
    }

    #[test]
    fn distribution_of_constant() {
        let d = StepFunction::zero().distribution();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.measure_of(&int(0)), int(1));
    }

    fn small_rational() -> impl Strategy<Value = ExactScalar> {
        (0i64..997, 1i64..997).prop_map(|(n, d)| ratio(n % d, d))
    }

    fn step_function() -> impl Strategy<Value = StepFunction> {
        prop::collection::vec((small_rational(), -5i64..6), 1..6).prop_map(|arcs| {
            StepFunction::from_unsorted(
                dedup_starts(arcs.into_iter().map(|(b, v)| (b, int(v))).collect()),
            )
        })
    }

    fn dedup_starts(mut arcs: Vec<(ExactScalar, ExactScalar)>) -> Vec<(ExactScalar, ExactScalar)> {
        arcs.sort_by(|a, b| a.0.cmp(&b.0));
        arcs.dedup_by(|a, b| a.0 == b.0);
        arcs
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ergodic_sum_matches_repeated_addition(g in step_function(), alpha in small_rational(), n in 0u32..50) {
            let fast = g.ergodic_sum(&alpha, n as i64).unwrap();
            prop_assert_eq!(fast.clone(), naive_sum(&g, &alpha, n));
            prop_assert_eq!(fast.integral(), g.integral() * int(n as i64));
            prop_assert!(fast.breakpoints().len() as u64 <= (n as u64 * g.breakpoints().len() as u64).max(1));
        }

        #[test]
        fn distribution_sums_to_one(g in step_function()) {
            prop_assert_eq!(g.distribution().total(), int(1));
        }

        #[test]
        fn canonical_form_idempotent(g in step_function()) {
            let again = StepFunction::from_arcs(g.breakpoints().to_vec(), g.values().to_vec()).unwrap();
            prop_assert_eq!(again, g.clone());
            prop_assert_eq!(g.add(&StepFunction::zero()), g);
        }

        #[test]
        fn rotation_inverts(g in step_function(), gamma in small_rational()) {
            prop_assert_eq!(g.rotate(&gamma).rotate(&-gamma.clone()), g);
        }
    }
}
