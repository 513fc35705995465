//! Points of the special flow under a step roof, and the skew product.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use cocycle_core::exact::{big, frac, ExactScalar};
use cocycle_core::step_circle::StepFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("roof must be strictly positive")]
    NonPositiveRoof,
    #[error("point ({x}, {s}) is not below the roof")]
    OffSpace { x: String, s: String },
}

/// A point `(x, s)` with `x` in `[0, 1)` and `0 <= s < roof(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FlowPoint {
    #[serde(with = "cocycle_core::exact::serde_scalar")]
    pub x: ExactScalar,
    #[serde(with = "cocycle_core::exact::serde_scalar")]
    pub s: ExactScalar,
}

impl FlowPoint {
    pub fn new(roof: &StepFunction, x: ExactScalar, s: ExactScalar) -> Result<Self, FlowError> {
        let x = frac(&x);
        if s.is_negative() || &s >= roof.eval(&x) {
            return Err(FlowError::OffSpace {
                x: x.to_string(),
                s: s.to_string(),
            });
        }
        Ok(FlowPoint { x, s })
    }
}

fn check_roof(roof: &StepFunction) -> Result<(), FlowError> {
    if roof.values().iter().all(|v| v.is_positive()) {
        Ok(())
    } else {
        Err(FlowError::NonPositiveRoof)
    }
}

/// Flows `p` for time `t` (of either sign).
///
/// Walks the base orbit one fibre at a time. Each step costs one roof
/// evaluation, the same order as evaluating a single Birkhoff sum at the end
/// point, so no search over `n` is needed.
pub fn flow_step(roof: &StepFunction, alpha: &ExactScalar, p: &FlowPoint, t: &ExactScalar) -> Result<FlowPoint, FlowError> {
    walk(roof, alpha, p, t).map(|(q, _)| q)
}

/// Number of base steps taken by [`flow_step`]: the unique `n` with
/// `f^(n)(x) <= s + t < f^(n+1)(x)`.
pub fn return_count(roof: &StepFunction, alpha: &ExactScalar, p: &FlowPoint, t: &ExactScalar) -> Result<i64, FlowError> {
    walk(roof, alpha, p, t).map(|(_, n)| n)
}

fn walk(roof: &StepFunction, alpha: &ExactScalar, p: &FlowPoint, t: &ExactScalar) -> Result<(FlowPoint, i64), FlowError> {
    check_roof(roof)?;
    let mut x = p.x.clone();
    let mut u = &p.s + t;
    let mut n = 0i64;
    if u.is_negative() {
        while u.is_negative() {
            x = frac(&(&x - alpha));
            u += roof.eval(&x);
            n -= 1;
        }
    } else {
        loop {
            let h = roof.eval(&x);
            if &u < h {
                break;
            }
            u -= h;
            x = frac(&(&x + alpha));
            n += 1;
        }
    }
    Ok((FlowPoint { x, s: u }, n))
}

/// `f^(n)(x)` at a single point, for any integer `n`.
pub fn point_sum(f: &StepFunction, alpha: &ExactScalar, x: &ExactScalar, n: &BigInt) -> ExactScalar {
    let steps = n.abs().to_u64().expect("time fits in u64");
    let mut acc = ExactScalar::zero();
    if n.is_negative() {
        // f^(-m)(x) = -f^(m)(x - m alpha)
        let mut y = frac(&(x - big(n).abs() * alpha));
        for _ in 0..steps {
            acc -= f.eval(&y);
            y = frac(&(&y + alpha));
        }
    } else {
        let mut y = frac(x);
        for _ in 0..steps {
            acc += f.eval(&y);
            y = frac(&(&y + alpha));
        }
    }
    acc
}

/// `n`-fold skew product `(x, r) -> (x + n alpha, r + f^(n)(x))`.
pub fn skew_step(f: &StepFunction, alpha: &ExactScalar, point: &(ExactScalar, ExactScalar), n: &BigInt) -> (ExactScalar, ExactScalar) {
    let (x, r) = point;
    let y = frac(&(x + big(n) * alpha));
    (y, r + point_sum(f, alpha, x, n))
}
