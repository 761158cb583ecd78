//! Checks shared by the topical tests and the acceptance run.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use shhex_core::lattice::{build_group, mat_apply, mat_mul, shell, IDENTITY};
use shhex_core::shmodel::{symbol_interval, tail_bound_ln};
use shhex_core::rigor::Mat;
use shhex_core::seqspace::{conv_operator, ReducedOperator, Seq};
use shhex_core::{Complex64, Interval};

use super::{contains, dense_convolve, random_q, random_seq, rat, rng, table};

pub fn random_f64(r: &mut ChaCha8Rng) -> f64 {
    let m: f64 = r.random_range(-1.0..1.0);
    let e: i32 = r.random_range(-40..40);
    m * 2f64.powi(e)
}

pub fn random_interval(r: &mut ChaCha8Rng) -> Interval {
    let a = random_f64(r);
    let b = if r.random_bool(0.3) {
        a
    } else {
        a + random_f64(r).abs() * 2f64.powi(r.random_range(-20..2))
    };
    Interval::new(a.min(b), a.max(b))
}

/// Members of an interval to test: both endpoints and an interior rational.
pub fn members(i: Interval) -> [BigRational; 3] {
    let (lo, hi) = (rat(i.lo()), rat(i.hi()));
    let mid = (&lo * BigRational::new(1.into(), 3.into())) + (&hi * BigRational::new(2.into(), 3.into()));
    [lo, hi, mid]
}

/// Runs `count` random operations and returns the number of containment
/// failures against exact rational arithmetic.
pub fn containment_failures(count: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let mut failures = 0;
    for i in 0..count {
        let a = random_interval(&mut r);
        let b = random_interval(&mut r);
        let ok = match i % 7 {
            0 => members(a).iter().all(|x| members(b).iter().all(|y| contains(a + b, &(x + y)))),
            1 => members(a).iter().all(|x| members(b).iter().all(|y| contains(a - b, &(x - y)))),
            2 => members(a).iter().all(|x| members(b).iter().all(|y| contains(a * b, &(x * y)))),
            3 => match a.try_div(b) {
                Ok(q) => members(a).iter().all(|x| members(b).iter().all(|y| contains(q, &(x / y)))),
                Err(_) => b.contains_zero(),
            },
            4 => members(a).iter().all(|x| contains(a.sqr(), &(x * x))),
            5 => members(a).iter().all(|x| contains(a.powi(3), &(x * x * x))),
            _ => {
                let p = a.abs();
                let s = p.sqrt().unwrap();
                let (lo, hi) = (rat(s.lo()), rat(s.hi()));
                // √x ∈ [lo, hi] ⇔ lo² ≤ x ≤ hi² for nonnegative endpoints
                s.lo() >= 0.0 && members(p).iter().all(|x| &lo * &lo <= *x && *x <= &hi * &hi)
            }
        };
        if !ok {
            failures += 1;
        }
    }
    failures
}

/// Exact and float agreement of `convolve` with the dense oracle; returns
/// the worst float relative error.
pub fn convolution_oracle(pairs: usize, seed: u64) -> Result<f64, String> {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for j in [3, 6] {
        for n in 1..=4 {
            let t = table(j, n);
            for _ in 0..pairs {
                let (a, b) = (random_q(&t, &mut r), random_q(&t, &mut r));
                let c = a.convolve(&b).map_err(|e| e.to_string())?;
                if c.coeffs() != dense_convolve(&a, &b, c.table()).as_slice() {
                    return Err(format!("exact mismatch for D{j}, N = {n}"));
                }
                let (x, y) = (random_seq(&t, &mut r), random_seq(&t, &mut r));
                let z = x.convolve(&y).map_err(|e| e.to_string())?;
                let want = dense_convolve(&x, &y, z.table());
                let scale = want.iter().map(|w| w.norm()).fold(1e-300, f64::max);
                for (got, w) in z.coeffs().iter().zip(&want) {
                    worst = worst.max((got - w).norm() / scale);
                }
            }
        }
    }
    Ok(worst)
}

pub fn group_checks() -> Result<(), String> {
    for j in [3u32, 6] {
        let g = build_group(j).map_err(|e| e.to_string())?;
        let (r, s) = (g.rotation, g.reflection);
        let rj = (0..j).fold(IDENTITY, |acc, _| mat_mul(&acc, &r));
        let rinv = (0..j - 1).fold(IDENTITY, |acc, _| mat_mul(&acc, &r));
        if rj != IDENTITY || mat_mul(&s, &s) != IDENTITY || mat_mul(&r, &s) != mat_mul(&s, &rinv) {
            return Err(format!("D{j} presentation"));
        }
        for a in -20..=20 {
            for b in -20..=20 {
                let size = g.orbit((a, b)).len() as u32;
                if (2 * j) % size != 0 {
                    return Err(format!("orbit of ({a}, {b}) has {size} elements"));
                }
            }
        }
    }
    let d6 = build_group(6).map_err(|e| e.to_string())?;
    if mat_apply(&d6.reflection, (4, -1)) != (5, 1) {
        return Err("D6 reflection of (4, -1)".into());
    }
    Ok(())
}

/// `L_N` against the minimum of `|λ_m|` over `[−10N, 10N]² ∖ I^N`.
pub fn tail_oracle(n: u32, d: f64, mu: f64) -> Result<(Interval, Interval), String> {
    let l = tail_bound_ln(n, d, Interval::point(mu)).map_err(|e| e.to_string())?;
    let m = 10 * n as i32;
    let mut best: Option<Interval> = None;
    for a in -m..=m {
        for b in -m..=m {
            if shell((a, b)) <= n {
                continue;
            }
            let v = symbol_interval((a, b), d, Interval::point(mu)).abs();
            best = Some(match best {
                None => v,
                Some(x) => x.min(v),
            });
        }
    }
    let brute = best.unwrap();
    if !(l.lo() <= brute.lo() && brute.lo() <= l.hi() && l.lo() <= brute.hi()) {
        return Err(format!("L_N = {l}, brute force {brute}"));
    }
    Ok((l, brute))
}


/// `‖u*v‖ ≤ ‖u‖‖v‖` and `‖Mv‖ ≤ ‖M‖‖v‖` on `instances` random cases per `ν`.
pub fn banach_checks(instances: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for nu in [1.0, 1.1, 1.4] {
        for i in 0..instances {
            let j = if i % 2 == 0 { 3 } else { 6 };
            let t = table(j, 1 + (i % 5) as u32);
            let (u, v) = (random_seq(&t, &mut r), random_seq(&t, &mut r));
            let uv = u.convolve(&v).map_err(|e| e.to_string())?;
            if uv.norm(nu).lo() > (u.norm(nu) * v.norm(nu)).hi() {
                return Err(format!("Banach algebra fails at nu = {nu}, instance {i}"));
            }
            let t2 = table(j, 2 + (i % 3) as u32);
            let m = if i % 3 == 0 {
                conv_operator(&u, &t2, &t2).map_err(|e| e.to_string())?
            } else {
                let mat = Mat::from_fn(t2.len(), t.len(), |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
                ReducedOperator::new(t.clone(), t2.clone(), mat).map_err(|e| e.to_string())?
            };
            let x = m.domain.len();
            let w = Seq::new(m.domain.clone(), 1.0, (0..x).map(|_| Complex64::new(r.random_range(-1.0..1.0), 0.0)).collect())
                .map_err(|e| e.to_string())?;
            let mw = m.apply(&w).map_err(|e| e.to_string())?;
            if mw.norm(nu).lo() > (m.op_norm(nu) * w.norm(nu)).hi() {
                return Err(format!("operator norm fails at nu = {nu}, instance {i}"));
            }
        }
    }
    Ok(())
}
