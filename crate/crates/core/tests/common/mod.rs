//! Exact oracles shared by the integration tests.
#![allow(dead_code)]

pub mod checks;

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shhex_core::lattice::{build_group, Index, OrbitTable};
use shhex_core::rigor::Ring;
use shhex_core::seqspace::{Coeff, Seq, SymSequence};
use shhex_core::{CInterval, Complex64, Interval};

pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Exact containment of a rational in an interval.
pub fn contains(i: Interval, x: &BigRational) -> bool {
    rat(i.lo()) <= *x && *x <= rat(i.hi())
}

/// Exact complex rationals with small integer parts, for exact-mode
/// convolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Q(pub Complex<Ratio<i128>>);

impl Q {
    pub fn new(re: i128, im: i128, den: i128) -> Self {
        Q(Complex::new(Ratio::new(re, den), Ratio::new(im, den)))
    }

    fn to_f64(r: Ratio<i128>) -> f64 {
        r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        Q(self.0 + o.0)
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        Q(self.0 - o.0)
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        Q(self.0 * o.0)
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Q::new(0, 0, 1)
    }
    fn one() -> Self {
        Q::new(1, 0, 1)
    }
}

impl Coeff for Q {
    fn from_c64(z: Complex64) -> Self {
        let r = |x: f64| Ratio::<i128>::approximate_float(x).expect("representable");
        Q(Complex::new(r(z.re), r(z.im)))
    }
    fn from_real(x: Interval) -> Self {
        Self::from_c64(Complex64::new(x.mid(), 0.0))
    }
    fn conj(self) -> Self {
        Q(self.0.conj())
    }
    fn modulus(self) -> Interval {
        CInterval::point(self.to_c64()).abs()
    }
    fn to_cinterval(self) -> CInterval {
        CInterval::point(self.to_c64())
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(Q::to_f64(self.0.re), Q::to_f64(self.0.im))
    }
    fn is_zero(&self) -> bool {
        self.0.re.is_zero() && self.0.im.is_zero()
    }
}

pub fn table(j: u32, n: u32) -> Arc<OrbitTable> {
    OrbitTable::build(&build_group(j).unwrap(), n)
}

/// Random coefficients that are constant on orbits and satisfy the
/// realness pairing `u_{−n} = conj(u_n)`.
pub fn random_symmetric<T: Coeff>(t: &Arc<OrbitTable>, rng: &mut ChaCha8Rng, draw: impl Fn(&mut ChaCha8Rng) -> T) -> SymSequence<T> {
    let mut c: Vec<T> = (0..t.len()).map(|_| draw(rng)).collect();
    for p in 0..t.len() {
        let q = t.conj_position(p);
        if q == p {
            c[p] = c[p] + c[p].conj();
        } else if q > p {
            c[q] = c[p].conj();
        }
    }
    SymSequence::new(t.clone(), 1.0, c).unwrap()
}

pub fn random_seq(t: &Arc<OrbitTable>, rng: &mut ChaCha8Rng) -> Seq {
    random_symmetric(t, rng, |r| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

pub fn random_q(t: &Arc<OrbitTable>, rng: &mut ChaCha8Rng) -> SymSequence<Q> {
    random_symmetric(t, rng, |r| Q::new(r.random_range(-50..=50), r.random_range(-50..=50), r.random_range(1..=12)))
}

/// Unfold to a dense map, convolve pairwise, fold back at the representatives.
pub fn dense_convolve<T: Coeff>(u: &SymSequence<T>, v: &SymSequence<T>, target: &OrbitTable) -> Vec<T> {
    let dense = |s: &SymSequence<T>| -> HashMap<Index, T> {
        let t = s.table();
        let mut m = HashMap::new();
        for p in 0..t.len() {
            for &k in t.orbit(p) {
                m.insert(k, s.coeffs()[p]);
            }
        }
        m
    };
    let (du, dv) = (dense(u), dense(v));
    let mut out: HashMap<Index, T> = HashMap::new();
    for (&a, &x) in &du {
        for (&b, &y) in &dv {
            let k = (a.0 + b.0, a.1 + b.1);
            let e = out.entry(k).or_insert_with(T::zero);
            *e = *e + x * y;
        }
    }
    target
        .reps()
        .iter()
        .map(|r| out.get(r).copied().unwrap_or_else(T::zero))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|x|` of a big rational.
pub fn rabs(x: &BigRational) -> BigRational {
    x.abs()
}

pub fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
