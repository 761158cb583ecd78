mod common;

use common::checks::{containment_failures, random_f64, random_interval};
use common::{contains, rat, rng};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use shhex_core::rigor::{imatvec, IntervalMatrix};
use shhex_core::Interval;

#[test]
fn hundred_thousand_random_operations_are_contained() {
    assert_eq!(containment_failures(100_000, 11), 0);
}

#[test]
fn decimal_sum_is_tight() {
    let s = Interval::from_decimal("0.1").unwrap() + Interval::from_decimal("0.2").unwrap();
    let exact = BigRational::new(3.into(), 10.into());
    assert!(contains(s, &exact));
    let p = Interval::point(0.1) + Interval::point(0.2);
    assert!(p.hi().to_bits() - p.lo().to_bits() <= 4);
    assert!(contains(p, &(rat(0.1) + rat(0.2))));
}

#[test]
fn decimal_literals_are_enclosed() {
    for (s, num, den) in [("9.64e-6", 964i64, 100_000_000i64), ("0.175", 175, 1000), ("25886.81", 2_588_681, 100)] {
        let exact = BigRational::new(num.into(), den.into());
        assert!(contains(Interval::from_decimal(s).unwrap(), &exact), "{s}");
    }
}

#[test]
fn matvec_against_rational_oracle() {
    let mut r = rng(3);
    for _ in 0..50 {
        let m: Vec<f64> = (0..9).map(|_| random_f64(&mut r)).collect();
        let v: Vec<f64> = (0..3).map(|_| random_f64(&mut r)).collect();
        let mi = IntervalMatrix::from_fn(3, 3, |i, j| Interval::point(m[3 * i + j]));
        let vi: Vec<Interval> = v.iter().map(|&x| Interval::point(x)).collect();
        let out = imatvec(&mi, &vi).unwrap();
        for i in 0..3 {
            let mut exact = BigRational::zero();
            for j in 0..3 {
                exact += rat(m[3 * i + j]) * rat(v[j]);
            }
            assert!(contains(out[i], &exact));
        }
    }
    let id = IntervalMatrix::identity(3);
    let v = vec![Interval::point(0.3), Interval::new(-1.0, 2.0), Interval::point(-7.5)];
    assert_eq!(imatvec(&id, &v).unwrap(), v);
    let z = IntervalMatrix::zeros(2, 3);
    assert!(imatvec(&z, &v).unwrap().iter().all(|x| *x == Interval::ZERO));
    assert!(imatvec(&z, &v[..2]).is_err());
}

#[test]
fn concurrent_results_are_identical() {
    use rayon::prelude::*;
    let mut r = rng(5);
    let pairs: Vec<(Interval, Interval)> = (0..2000).map(|_| (random_interval(&mut r), random_interval(&mut r))).collect();
    let serial: Vec<Interval> = pairs.iter().map(|&(a, b)| a * b + a - b).collect();
    let parallel: Vec<Interval> = pairs.par_iter().map(|&(a, b)| a * b + a - b).collect();
    assert_eq!(serial, parallel);
}

fn arb_interval() -> impl Strategy<Value = Interval> {
    (-1e6f64..1e6, 0f64..1e3).prop_map(|(a, w)| Interval::new(a, a + w))
}

proptest! {
    #[test]
    fn inclusion_monotone(a in arb_interval(), b in arb_interval(), ga in 0f64..10.0, gb in 0f64..10.0) {
        let wa = Interval::new(a.lo() - ga, a.hi() + ga);
        let wb = Interval::new(b.lo() - gb, b.hi() + gb);
        prop_assert!((a + b).subset_of(wa + wb));
        prop_assert!((a - b).subset_of(wa - wb));
        prop_assert!((a * b).subset_of(wa * wb));
        prop_assert!(a.sqr().subset_of(wa.sqr()));
        if let (Ok(q), Ok(wq)) = (a.try_div(b), wa.try_div(wb)) {
            prop_assert!(q.subset_of(wq));
        }
    }
}
