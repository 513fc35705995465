use cocycle_core::exact::{int, ratio, ExactScalar};
use cocycle_core::step_circle::{StepFunction, StepKind};
use flowlab::flow::{flow_step, point_sum, return_count, skew_step, FlowPoint};
use num_bigint::BigInt;
use proptest::prelude::*;

fn roof_and_point() -> impl Strategy<Value = (StepFunction, ExactScalar, FlowPoint)> {
    (1i64..40, 1i64..40, 1i64..8, 1i64..999, 0i64..1000, 0i64..1000).prop_map(|(a, b, den, alpha_num, x_num, s_frac)| {
        let roof = StepFunction::make(&StepKind::FAb(ratio(a, den), ratio(b, den))).unwrap();
        let alpha = ratio(alpha_num, 1009);
        let x = ratio(x_num, 1000);
        let h = roof.eval(&x).clone();
        let s = h * ratio(s_frac, 1000);
        let p = FlowPoint::new(&roof, x, s).unwrap();
        (roof, alpha, p)
    })
}

fn time() -> impl Strategy<Value = ExactScalar> {
    (-4000i64..4000, 1i64..100).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn group_law((roof, alpha, p) in roof_and_point(), t1 in time(), t2 in time()) {
        let a = flow_step(&roof, &alpha, &p, &t1).unwrap();
        let b = flow_step(&roof, &alpha, &a, &t2).unwrap();
        let c = flow_step(&roof, &alpha, &p, &(&t1 + &t2)).unwrap();
        prop_assert_eq!(b, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_lands_in_the_fibre_given_by_the_birkhoff_sum((roof, alpha, p) in roof_and_point(), t in time()) {
        let q = flow_step(&roof, &alpha, &p, &t).unwrap();
        let n = return_count(&roof, &alpha, &p, &t).unwrap();
        let sum = point_sum(&roof, &alpha, &p.x, &BigInt::from(n));
        prop_assert_eq!(&q.s, &(&p.s + &t - &sum));
        prop_assert!(q.s >= int(0) && &q.s < roof.eval(&q.x));
        let (x, _) = skew_step(&roof, &alpha, &(p.x.clone(), int(0)), &BigInt::from(n));
        prop_assert_eq!(x, q.x);
    }

    #[test]
    fn skew_cocycle_identity(num in 1i64..500, x in 0i64..97, m in -60i64..60, k in -60i64..60) {
        let f = StepFunction::make(&StepKind::PhiBeta(ratio(num, 503))).unwrap();
        let alpha = ratio(233, 577);
        let start = (ratio(x, 97), int(0));
        let once = skew_step(&f, &alpha, &start, &BigInt::from(m + k));
        let twice = skew_step(&f, &alpha, &skew_step(&f, &alpha, &start, &BigInt::from(m)), &BigInt::from(k));
        prop_assert_eq!(once, twice);
    }
}
