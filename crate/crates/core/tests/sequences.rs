mod common;

use common::checks::{banach_checks, convolution_oracle};
use common::{random_seq, rng, table};
use proptest::prelude::*;
use shhex_core::geom::{hexagon_translations, physical_group};
use shhex_core::seqspace::{FullGrid, Seq};
use shhex_core::Complex64;

#[test]
fn convolution_matches_dense_oracle() {
    let worst = convolution_oracle(100, 1).unwrap();
    assert!(worst < 1e-12, "float relative error {worst:e}");
}

#[test]
fn banach_algebra_and_operator_norm() {
    banach_checks(200, 2).unwrap();
}

#[test]
fn norm_worked_example() {
    let t = table(6, 1);
    let u = Seq::new(t, 5.0, vec![Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap();
    // 2 + 6·|−1|·ν
    assert!(u.norm(1.5).contains(11.0));
}

fn small_seed() -> impl Strategy<Value = (u32, u32, u64)> {
    (prop_oneof![Just(3u32), Just(6u32)], 1u32..5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_stay_real_and_symmetric((j, n, seed) in small_seed()) {
        let t = table(j, n);
        let mut r = rng(seed);
        let (u, v) = (random_seq(&t, &mut r), random_seq(&t, &mut r));
        let c = u.convolve(&v).unwrap();
        prop_assert!(c.realness_defect() < 1e-12);
        let d = v.convolve(&u).unwrap();
        for (a, b) in c.coeffs().iter().zip(d.coeffs()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fold_of_unfold_is_identity((j, n, seed) in small_seed(), pad in 0u32..3) {
        let t = table(j, n);
        let u = random_seq(&t, &mut rng(seed));
        let grid: FullGrid<Complex64> = u.unfold(n + pad);
        let back = Seq::fold(&grid, t.clone(), u.d()).unwrap();
        prop_assert_eq!(back.coeffs(), u.coeffs());
        // every orbit member carries the same value
        for p in 0..t.len() {
            for &k in t.orbit(p) {
                prop_assert_eq!(grid.get(k), u.coeffs()[p]);
            }
        }
    }

    #[test]
    fn fields_are_invariant_and_periodic((j, n, seed) in small_seed(), x1 in -20.0f64..20.0, x2 in -20.0f64..20.0, d in 1.0f64..10.0) {
        let t = table(j, n);
        let u0 = random_seq(&t, &mut rng(seed));
        let u = Seq::new(t, d, u0.coeffs().to_vec()).unwrap();
        let scale = u.norm_f64(1.0);
        let x = [x1, x2];
        let ux = u.evaluate(x);
        for g in physical_group(j).unwrap() {
            let y = [g[0][0] * x1 + g[0][1] * x2, g[1][0] * x1 + g[1][1] * x2];
            prop_assert!((u.evaluate(y) - ux).abs() <= 1e-11 * scale);
        }
        for tr in hexagon_translations(d) {
            prop_assert!((u.evaluate([x1 + tr[0], x2 + tr[1]]) - ux).abs() <= 1e-11 * scale);
        }
    }
}
