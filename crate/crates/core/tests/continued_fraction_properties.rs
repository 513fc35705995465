use cocycle_core::constants::NamedConstant;
use cocycle_core::continued_fractions::{cf_expand, AlphaSpec, CFExpansion};
use cocycle_core::exact::{big, int, norm_dist};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

fn expansions() -> Vec<CFExpansion> {
    vec![
        cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 512, 25).unwrap(),
        cf_expand(&AlphaSpec::Named(NamedConstant::Golden), 512, 40).unwrap(),
        cf_expand(&AlphaSpec::Named(NamedConstant::TwoMinusSqrt2), 512, 30).unwrap(),
        cf_expand(&AlphaSpec::quotients(&[3], &[2]), 64, 30).unwrap(),
        cf_expand(&AlphaSpec::quotients(&[2, 100], &[2, 100]), 64, 12).unwrap(),
        cf_expand(&AlphaSpec::quotients(&[1, 4], &[1, 6, 1, 8]), 64, 16).unwrap(),
    ]
}

#[test]
fn recurrence_and_determinant() {
    for cf in expansions() {
        for n in 1..=cf.validated_depth {
            let a = cf.a(n);
            assert_eq!(cf.q(n), &(a * cf.q(n - 1) + if n >= 2 { cf.q(n - 2).clone() } else { BigInt::from(0) }));
            let det = cf.p(n) * cf.q(n - 1) - cf.p(n - 1) * cf.q(n);
            let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            // p_n q_{n-1} - p_{n-1} q_n = (-1)^(n-1) with p_0/q_0 = 0/1
            assert_eq!(det, -sign);
        }
        cf.verify_invariants().unwrap();
    }
}

#[test]
fn two_sided_bound_on_best_approximations() {
    for cf in expansions() {
        for n in 0..cf.validated_depth {
            let a = big(cf.a(n + 1));
            let v = big(cf.q(n)) * cf.norm_q_alpha(n);
            assert!(v >= (&a + int(2)).recip(), "lower bound at n = {n}");
            assert!(v < a.recip(), "upper bound at n = {n}");
        }
    }
}

#[test]
fn distances_strictly_decrease() {
    for cf in expansions() {
        for n in 1..=cf.validated_depth {
            assert!(cf.norm_q_alpha(n) < cf.norm_q_alpha(n - 1));
        }
    }
}

#[test]
fn best_approximation_below_each_denominator() {
    let limit = BigInt::from(10_000);
    for cf in expansions() {
        let alpha = cf.alpha().clone();
        let top = cf.last_index_with_q_at_most(&limit).unwrap().min(cf.validated_depth);
        let q_top = cf.q_u64(top);
        let mut n = 1;
        for k in 1..q_top {
            while n <= top && cf.q_u64(n) <= k {
                n += 1;
            }
            if n > top {
                break;
            }
            // here q_{n-1} <= k < q_n
            let d = norm_dist(&(int(k as i64) * &alpha));
            let prev = cf.norm_q_alpha(n - 1);
            assert!(d >= prev, "k = {k}, n = {n}");
            assert!(prev * big(cf.q(n)) * int(2) >= int(1));
        }
    }
}

#[test]
fn doubled_precision_agrees() {
    for name in [NamedConstant::PiMinus3, NamedConstant::Golden, NamedConstant::TwoMinusSqrt2] {
        let lo = cf_expand(&AlphaSpec::Named(name), 256, 10).unwrap();
        let hi = cf_expand(&AlphaSpec::Named(name), 512, 10).unwrap();
        for n in 1..=lo.validated_depth {
            assert_eq!(lo.a(n), hi.a(n), "{name} a_{n}");
        }
        assert!(hi.validated_depth > lo.validated_depth);
    }
}

#[test]
fn pi_denominators() {
    let cf = cf_expand(&AlphaSpec::Named(NamedConstant::PiMinus3), 256, 8).unwrap();
    let q: Vec<u64> = (0..=5).map(|n| cf.q(n).to_u64().unwrap()).collect();
    assert_eq!(q, vec![1, 7, 106, 113, 33102, 33215]);
    assert!(cf.theta(1).is_positive() != cf.theta(2).is_positive());
}
