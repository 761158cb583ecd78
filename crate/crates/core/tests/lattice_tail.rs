mod common;

use common::checks::{group_checks, tail_oracle};
use shhex_core::shmodel::{complement_qmin, tail_bound_ln};
use shhex_core::Interval;

#[test]
fn groups_satisfy_the_presentation() {
    group_checks().unwrap();
}

#[test]
fn tail_bound_matches_brute_force() {
    for (n, d, mu) in [(5, 5.0, 0.01), (12, 5.0, -0.2), (20, 10.0, 0.3)] {
        tail_oracle(n, d, mu).unwrap();
    }
}

#[test]
fn qmin_closed_form_to_forty() {
    for n in 0..=40u32 {
        let want = (3 * (n as i64 + 1).pow(2) + 3) / 4;
        assert_eq!(complement_qmin(n), want, "N = {n}");
    }
}

#[test]
fn tail_bound_refuses_small_truncations() {
    assert!(tail_bound_ln(1, 10.0, Interval::point(0.01)).is_err());
    assert!(tail_bound_ln(12, 5.0, Interval::point(0.01)).unwrap().lo() > 0.0);
}
