//! Outward-rounded real intervals with binary64 endpoints.
//!
//! Each endpoint is computed in round-to-nearest and then compared against the
//! exact rounding error (TwoSum / fma residuals). An endpoint is moved one ulp
//! outward only when the nearest result landed on the wrong side, so exact
//! operations stay exact. Near the underflow range the residual is no longer
//! representable and the nudge is applied unconditionally.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::Error;

/// Below this magnitude products and quotients may have lost bits to
/// gradual underflow, so error-free residuals cannot be trusted.
const TINY: f64 = 1.0e-290;

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]", self.lo, self.hi)
    }
}

// ---- directed scalar kernels -------------------------------------------------

#[inline]
fn down_from(x: f64, exact_minus_x: Ordering) -> f64 {
    match exact_minus_x {
        Ordering::Less => x.next_down(),
        _ => x,
    }
}

#[inline]
fn up_from(x: f64, exact_minus_x: Ordering) -> f64 {
    match exact_minus_x {
        Ordering::Greater => x.next_up(),
        _ => x,
    }
}

#[inline]
fn sign_of(e: f64) -> Ordering {
    e.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

/// Sign of (a + b) − fl(a + b), exact via TwoSum.
#[inline]
fn add_err(a: f64, b: f64, s: f64) -> Ordering {
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    sign_of(err)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_finite() {
        down_from(s, add_err(a, b, s))
    } else if s == f64::INFINITY && a.is_finite() && b.is_finite() {
        f64::MAX
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_finite() {
        up_from(s, add_err(a, b, s))
    } else if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
        -f64::MAX
    } else {
        s
    }
}

/// Product with 0·∞ = 0, the usual interval convention.
#[inline]
fn mul_raw(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = mul_raw(a, b);
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if !p.is_finite() {
        return if p == f64::INFINITY && a.is_finite() && b.is_finite() {
            f64::MAX
        } else {
            p
        };
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    down_from(p, sign_of(a.mul_add(b, -p)))
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = mul_raw(a, b);
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if !p.is_finite() {
        return if p == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
            -f64::MAX
        } else {
            p
        };
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    up_from(p, sign_of(a.mul_add(b, -p)))
}

/// Sign of a/b − fl(a/b) from the exact residual a − q·b.
#[inline]
fn div_err(a: f64, b: f64, q: f64) -> Ordering {
    let r = (-q).mul_add(b, a);
    let s = sign_of(r);
    if b < 0.0 {
        s.reverse()
    } else {
        s
    }
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if b.is_infinite() {
        return if q == 0.0 { q.next_down().min(0.0) } else { q };
    }
    if !q.is_finite() {
        return if q == f64::INFINITY && a.is_finite() { f64::MAX } else { q };
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_down();
    }
    down_from(q, div_err(a, b, q))
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if b.is_infinite() {
        return if q == 0.0 { q.next_up().max(0.0) } else { q };
    }
    if !q.is_finite() {
        return if q == f64::NEG_INFINITY && a.is_finite() { -f64::MAX } else { q };
    }
    if q.abs() < TINY || a.abs() < TINY {
        return q.next_up();
    }
    up_from(q, div_err(a, b, q))
}

#[inline]
fn sqrt_down(a: f64) -> f64 {
    if a == 0.0 || a.is_infinite() {
        return a;
    }
    let s = a.sqrt();
    if a < TINY {
        return s.next_down().max(0.0);
    }
    down_from(s, sign_of((-s).mul_add(s, a))).max(0.0)
}

#[inline]
fn sqrt_up(a: f64) -> f64 {
    if a == 0.0 || a.is_infinite() {
        return a;
    }
    let s = a.sqrt();
    if a < TINY {
        return s.next_up();
    }
    up_from(s, sign_of((-s).mul_add(s, a)))
}

// ---- the interval type -------------------------------------------------------

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Enclosure of π: the binary64 constant lies just below π.
    pub const PI: Interval = Interval {
        lo: std::f64::consts::PI,
        hi: 3.141_592_653_589_793_6,
    };

    /// Panics on invalid endpoints; use [`Interval::try_new`] for untrusted data.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).expect("invalid interval endpoints")
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self, Error> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// Encloses the real number written in decimal as `s`; binary64 parsing is
    /// correctly rounded, so the neighbours bracket the exact value.
    pub fn from_decimal(s: &str) -> Result<Self, Error> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("not finite: {s:?}")));
        }
        Ok(Self::new(x.next_down(), x.next_up()))
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Midpoint, rounded to nearest (not rigorous).
    pub fn mid(self) -> f64 {
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            return if self.lo.is_finite() {
                self.lo
            } else if self.hi.is_finite() {
                self.hi
            } else {
                0.0
            };
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on the width.
    pub fn width(self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    /// max |x| over the interval.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// min |x| over the interval.
    pub fn mig(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn try_div(self, b: Interval) -> Result<Interval, Error> {
        if b.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = [
            (self.lo, b.lo),
            (self.lo, b.hi),
            (self.hi, b.lo),
            (self.hi, b.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in c {
            lo = lo.min(div_down(x, y));
            hi = hi.max(div_up(x, y));
        }
        Ok(Interval { lo, hi })
    }

    pub fn recip(self) -> Result<Interval, Error> {
        Interval::ONE.try_div(self)
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval {
            lo: mul_down(a.lo, a.lo),
            hi: mul_up(a.hi, a.hi),
        }
    }

    pub fn powi(self, k: u32) -> Interval {
        fn pow_down(x: f64, k: u32) -> f64 {
            (0..k).fold(1.0, |acc, _| mul_down(acc, x))
        }
        fn pow_up(x: f64, k: u32) -> f64 {
            (0..k).fold(1.0, |acc, _| mul_up(acc, x))
        }
        if k == 0 {
            return Interval::ONE;
        }
        let even = k % 2 == 0;
        if self.lo >= 0.0 {
            Interval {
                lo: pow_down(self.lo, k),
                hi: pow_up(self.hi, k),
            }
        } else if self.hi <= 0.0 {
            let (a, b) = (-self.hi, -self.lo);
            if even {
                Interval {
                    lo: pow_down(a, k),
                    hi: pow_up(b, k),
                }
            } else {
                Interval {
                    lo: -pow_up(b, k),
                    hi: -pow_down(a, k),
                }
            }
        } else if even {
            Interval {
                lo: 0.0,
                hi: pow_up(self.mag(), k),
            }
        } else {
            Interval {
                lo: -pow_up(-self.lo, k),
                hi: pow_up(self.hi, k),
            }
        }
    }

    pub fn sqrt(self) -> Result<Interval, Error> {
        if self.lo < 0.0 {
            return Err(Error::NegativeSqrt);
        }
        Ok(Interval {
            lo: sqrt_down(self.lo),
            hi: sqrt_up(self.hi),
        })
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    pub fn min(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.min(o.hi),
        }
    }

    pub fn max(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo.max(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    /// Multiplies by a binary64 scalar treated as exact.
    pub fn scale(self, c: f64) -> Interval {
        self * Interval::point(c)
    }

    /// Sum of intervals in outward rounding.
    pub fn sum<I: IntoIterator<Item = Interval>>(it: I) -> Interval {
        it.into_iter().fold(Interval::ZERO, |a, b| a + b)
    }
}

/// Minimum over a non-empty collection; `None` when empty.
pub fn imin<I: IntoIterator<Item = Interval>>(it: I) -> Option<Interval> {
    it.into_iter().reduce(Interval::min)
}

/// Maximum over a non-empty collection; `None` when empty.
pub fn imax<I: IntoIterator<Item = Interval>>(it: I) -> Option<Interval> {
    it.into_iter().reduce(Interval::max)
}

pub fn iadd(a: Interval, b: Interval) -> Interval {
    a + b
}

pub fn isub(a: Interval, b: Interval) -> Interval {
    a - b
}

pub fn imul(a: Interval, b: Interval) -> Interval {
    a * b
}

pub fn idiv(a: Interval, b: Interval) -> Result<Interval, Error> {
    a.try_div(b)
}

pub fn ipow(a: Interval, k: u32) -> Interval {
    a.powi(k)
}

pub fn isqrt(a: Interval) -> Result<Interval, Error> {
    a.sqrt()
}

pub fn iabs(a: Interval) -> Interval {
    a.abs()
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, b: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, b.lo),
            hi: add_up(self.hi, b.hi),
        }
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, b: Interval) {
        *self = *self + b;
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, b: Interval) -> Interval {
        Interval {
            lo: add_down(self.lo, -b.hi),
            hi: add_up(self.hi, -b.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, b: Interval) -> Interval {
        let (a0, a1, b0, b1) = (self.lo, self.hi, b.lo, b.hi);
        if a0 >= 0.0 && b0 >= 0.0 {
            return Interval {
                lo: mul_down(a0, b0),
                hi: mul_up(a1, b1),
            };
        }
        let lo = mul_down(a0, b0)
            .min(mul_down(a0, b1))
            .min(mul_down(a1, b0))
            .min(mul_down(a1, b1));
        let hi = mul_up(a0, b0)
            .max(mul_up(a0, b1))
            .max(mul_up(a1, b0))
            .max(mul_up(a1, b1));
        Interval { lo, hi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_stays_exact() {
        assert_eq!(Interval::point(1.0) + Interval::point(2.0), Interval::point(3.0));
    }

    #[test]
    fn monotone_product() {
        let r = Interval::new(-1.0, 2.0) * Interval::point(3.0);
        assert_eq!(r, Interval::new(-3.0, 6.0));
    }

    #[test]
    fn inexact_sum_is_tight() {
        let r = Interval::point(0.1) + Interval::point(0.2);
        assert!(r.lo() < r.hi());
        assert!(r.hi() - r.lo() <= 4.0 * f64::EPSILON * 0.3);
    }

    #[test]
    fn powers_and_roots() {
        assert_eq!(Interval::new(-2.0, 1.0).powi(2), Interval::new(0.0, 4.0));
        assert_eq!(Interval::new(4.0, 9.0).sqrt().unwrap(), Interval::new(2.0, 3.0));
        assert_eq!(Interval::new(-3.0, -1.0).abs(), Interval::new(1.0, 3.0));
        assert_eq!(Interval::new(-2.0, -1.0).powi(3), Interval::new(-8.0, -1.0));
        assert!(Interval::new(-1.0, 4.0).sqrt().is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(
            Interval::ONE.try_div(Interval::new(-1.0, 1.0)),
            Err(Error::DivisionByZero)
        ));
        let q = Interval::ONE.try_div(Interval::point(3.0)).unwrap();
        assert!(q.lo() < q.hi() && q.contains(1.0 / 3.0));
    }

    #[test]
    fn overflow_saturates() {
        let big = Interval::point(f64::MAX);
        let r = big + big;
        assert_eq!(r.lo(), f64::MAX);
        assert_eq!(r.hi(), f64::INFINITY);
        assert!(!r.is_finite());
    }

    #[test]
    fn underflow_is_enclosed() {
        let t = Interval::point(1e-200) * Interval::point(1e-200);
        assert!(t.lo() < 0.0 || t.lo() == 0.0);
        assert!(t.hi() > 0.0);
    }

    #[test]
    fn pi_enclosure() {
        assert!(Interval::PI.lo() < Interval::PI.hi());
        assert_eq!(Interval::PI.hi(), std::f64::consts::PI.next_up());
    }

    #[test]
    fn decimal_enclosure_brackets() {
        let x = Interval::from_decimal("0.1").unwrap();
        assert!(x.contains(0.1) && x.lo() < 0.1 && x.hi() > 0.1);
    }

    #[test]
    fn invalid_endpoints_rejected() {
        assert!(Interval::try_new(2.0, 1.0).is_err());
        assert!(Interval::try_new(f64::NAN, 1.0).is_err());
    }
}
