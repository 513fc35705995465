//! Exact rigidity experiments for the two-valued roof `f_{a,b}`.
//!
//! The roof is centred to `F = f_{a,b} - (a + b)/2`, which takes the values
//! `+-h` with `h = (a - b)/2`. For each requested time `r` the report holds
//! `||r alpha||`, the exact law of `F^(r)` and its squared L2 norm.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use cocycle_core::continued_fractions::{CFExpansion, Parity};
use cocycle_core::exact::{big, half, int, norm_dist, to_f64, to_fraction_string, ExactScalar};
use cocycle_core::step_circle::{DistributionTable, StepError, StepFunction};

use crate::config::{Budgets, RigidityTask};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawEntry {
    pub value: String,
    pub measure: String,
}

fn law(d: &DistributionTable) -> Vec<LawEntry> {
    d.entries
        .iter()
        .map(|(v, m)| LawEntry {
            value: to_fraction_string(v),
            measure: to_fraction_string(m),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeRecord {
    pub time: String,
    /// `n` when the time is the denominator `q_n`.
    pub index: Option<usize>,
    pub parity: Option<Parity>,
    pub norm_time_alpha: Option<String>,
    pub law: Vec<LawEntry>,
    pub norm_sq: Option<String>,
    pub norm: Option<f64>,
    /// Odd denominators: the law is `h` and `-h` with mass 1/2 each.
    pub two_point_law: Option<bool>,
    /// Even denominators: `||F^(q_n)||^2 <= 4 h^2 / a_{n+1}`.
    pub even_bound: Option<String>,
    pub even_bound_holds: Option<bool>,
    pub skipped: Option<String>,
}

/// Smallest `||F^(s)||_2` over a range of times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeMinimum {
    pub from: u64,
    pub to: u64,
    pub argmin: u64,
    pub min_norm_sq: String,
    pub min_norm: f64,
    /// Every denominator up to the validated depth is odd.
    pub all_odd_denominators: bool,
}

/// Law of `F^(m q_n)` against the law of `m F^(q_n)`.
///
/// Rotating `F^(q)` by `i q alpha` moves at most `D ||i q alpha||` of mass,
/// `D` being its number of jumps, so the total-variation distance is at
/// most `D ||q alpha|| m (m - 1) / 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultipleComparison {
    pub index: usize,
    pub q: String,
    pub m: u64,
    pub tv_distance: String,
    pub mass_bound: String,
    /// `m^2 q ||q alpha|| Var(F) / 2`, which bounds `||F^(mq) - m F_q||_1`
    /// for the periodization `F_q(x) = sum_{i<q} F(x + i/q)`.
    pub l1_bound: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub roof_a: String,
    pub roof_b: String,
    pub unit_jump_roof: bool,
    pub times: Vec<TimeRecord>,
    pub range_minimum: Option<RangeMinimum>,
    pub multiples: Vec<MultipleComparison>,
    pub budget_exhausted: bool,
    pub notes: Vec<String>,
}

impl RigidityReport {
    /// All asserted laws and bounds hold (skipped items are ignored).
    pub fn all_checks_hold(&self) -> bool {
        self.times
            .iter()
            .all(|t| t.two_point_law != Some(false) && t.even_bound_holds != Some(false))
            && self.multiples.iter().all(|m| m.holds)
    }
}

/// `f_{a,b} - (a + b)/2`.
pub fn centred_roof(a: &ExactScalar, b: &ExactScalar) -> StepFunction {
    let h = (a - b) * half();
    StepFunction::from_arcs(vec![ExactScalar::zero(), half()], vec![h.clone(), -h]).expect("two arcs")
}

pub fn rigidity_experiment(
    cf: &CFExpansion,
    a: &ExactScalar,
    b: &ExactScalar,
    task: &RigidityTask,
    budgets: &Budgets,
) -> RigidityReport {
    let f = centred_roof(a, b);
    let h = (a - b) * half();
    let alpha = cf.alpha();
    let mut exhausted = false;
    let mut notes = Vec::new();

    let mut times = Vec::new();
    for (t, index) in task.times.resolve(cf) {
        let (rec, ran_out) = time_record(&f, &h, cf, &t, index, budgets);
        exhausted |= ran_out;
        times.push(rec);
    }

    let range_minimum = match task.range {
        Some((lo, hi)) if hi > budgets.max_time => {
            exhausted = true;
            notes.push(format!("range {lo}..{hi} exceeds max_time {}", budgets.max_time));
            None
        }
        Some((lo, hi)) => match range_minimum(&f, alpha, lo, hi, budgets.breakpoints) {
            Ok(mut r) => {
                r.all_odd_denominators = (0..=cf.validated_depth).all(|n| cf.q_is_odd(n));
                Some(r)
            }
            Err(e) => {
                exhausted = true;
                notes.push(format!("range minimum: {e}"));
                None
            }
        },
        None => None,
    };

    let mut multiples = Vec::new();
    if task.multiples >= 2 {
        for rec in &times {
            let Some(n) = rec.index else { continue };
            if rec.skipped.is_some() {
                continue;
            }
            for m in 2..=task.multiples {
                match compare_multiple(&f, cf, n, m, budgets) {
                    Ok(Some(c)) => multiples.push(c),
                    Ok(None) => {
                        exhausted = true;
                        notes.push(format!("m = {m} at q_{n} exceeds max_time"));
                    }
                    Err(e) => {
                        exhausted = true;
                        notes.push(format!("m = {m} at q_{n}: {e}"));
                    }
                }
            }
        }
        notes.push(
            "multiples compare laws of F^(m q) and m F^(q); convergence of the associated Markov operators is not \
             finitely checkable and is not claimed"
                .into(),
        );
    }

    RigidityReport {
        roof_a: to_fraction_string(a),
        roof_b: to_fraction_string(b),
        unit_jump_roof: a - b == int(2),
        times,
        range_minimum,
        multiples,
        budget_exhausted: exhausted,
        notes,
    }
}

fn time_record(
    f: &StepFunction,
    h: &ExactScalar,
    cf: &CFExpansion,
    t: &BigInt,
    index: Option<usize>,
    budgets: &Budgets,
) -> (TimeRecord, bool) {
    let mut rec = TimeRecord {
        time: t.to_string(),
        index,
        parity: index.map(|n| if cf.q_is_odd(n) { Parity::Odd } else { Parity::Even }),
        norm_time_alpha: None,
        law: Vec::new(),
        norm_sq: None,
        norm: None,
        two_point_law: None,
        even_bound: None,
        even_bound_holds: None,
        skipped: None,
    };
    if let Some(n) = index {
        if n > cf.validated_depth {
            rec.skipped = Some(format!("index {n} beyond validated depth {}", cf.validated_depth));
            return (rec, false);
        }
    }
    rec.norm_time_alpha = Some(to_fraction_string(&norm_dist(&(big(t) * cf.alpha()))));
    let steps = match t.to_u64().filter(|&s| s <= budgets.max_time) {
        Some(s) => s as i64,
        None => {
            rec.skipped = Some(format!("time exceeds max_time {}", budgets.max_time));
            return (rec, true);
        }
    };
    let g = match f.ergodic_sum_with_budget(cf.alpha(), steps, budgets.breakpoints) {
        Ok(g) => g,
        Err(e) => {
            rec.skipped = Some(e.to_string());
            return (rec, true);
        }
    };
    let d = g.distribution();
    let nsq = g.l2_norm_sq();
    rec.law = law(&d);
    rec.norm = Some(to_f64(&nsq).sqrt());
    rec.norm_sq = Some(to_fraction_string(&nsq));
    if let Some(n) = index {
        if cf.q_is_odd(n) {
            let expected = if h.is_zero() {
                d.entries.len() == 1 && d.measure_of(&int(0)) == int(1)
            } else {
                d.entries.len() == 2 && d.measure_of(h) == half() && d.measure_of(&-h) == half()
            };
            rec.two_point_law = Some(expected);
        } else {
            let bound = h * h * int(4) / big(cf.a(n + 1));
            rec.even_bound_holds = Some(nsq <= bound);
            rec.even_bound = Some(to_fraction_string(&bound));
        }
    }
    (rec, false)
}

/// Exact `min ||F^(s)||_2^2` for `lo <= s <= hi`, growing the sum one
/// rotate at a time.
pub fn range_minimum(f: &StepFunction, alpha: &ExactScalar, lo: u64, hi: u64, breakpoints: u64) -> Result<RangeMinimum, StepError> {
    assert!(1 <= lo && lo <= hi, "need 1 <= lo <= hi");
    let mut g = f.clone();
    let mut best: Option<(u64, ExactScalar)> = None;
    for s in 1..=hi {
        if s > 1 {
            g = g.add(&f.rotate(&(alpha * int(s as i64 - 1))));
            let size = g.breakpoints().len() as u64;
            if size > breakpoints {
                return Err(StepError::BudgetExceeded {
                    budget: breakpoints,
                    required: size,
                });
            }
        }
        if s >= lo {
            let v = g.l2_norm_sq();
            if best.as_ref().is_none_or(|(_, b)| &v < b) {
                best = Some((s, v));
            }
        }
    }
    let (argmin, v) = best.expect("non-empty range");
    Ok(RangeMinimum {
        from: lo,
        to: hi,
        argmin,
        min_norm: to_f64(&v).sqrt(),
        min_norm_sq: to_fraction_string(&v),
        all_odd_denominators: false,
    })
}

/// Compares the law of `F^(m q_n)` with that of `m F^(q_n)`; `None` when
/// `m q_n` exceeds the time budget.
pub fn compare_multiple(
    f: &StepFunction,
    cf: &CFExpansion,
    n: usize,
    m: u64,
    budgets: &Budgets,
) -> Result<Option<MultipleComparison>, StepError> {
    let q = cf.q_u64(n);
    let Some(mq) = q.checked_mul(m).filter(|&t| t <= budgets.max_time) else {
        return Ok(None);
    };
    let alpha = cf.alpha();
    let gq = f.ergodic_sum_with_budget(alpha, q as i64, budgets.breakpoints)?;
    let gmq = f.ergodic_sum_with_budget(alpha, mq as i64, budgets.breakpoints)?;
    let mm = int(m as i64);
    let tv = gmq.distribution().tv_distance(&gq.distribution().scaled(&mm));
    let norm_q = cf.norm_q_alpha(n);
    let jumps = int(gq.discontinuities().len() as i64);
    let mass_bound = &jumps * &norm_q * &mm * int(m as i64 - 1) / int(2);
    let l1_bound = &mm * &mm * int(q as i64) * &norm_q * f.variation() / int(2);
    Ok(Some(MultipleComparison {
        index: n,
        q: q.to_string(),
        m,
        holds: tv <= mass_bound,
        tv_distance: to_fraction_string(&tv),
        mass_bound: to_fraction_string(&mass_bound),
        l1_bound: to_fraction_string(&l1_bound),
    }))
}
