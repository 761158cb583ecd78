//! Rectangular complex intervals.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Interval;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub const ZERO: CInterval = CInterval {
        re: Interval::ZERO,
        im: Interval::ZERO,
    };
    pub const ONE: CInterval = CInterval {
        re: Interval::ONE,
        im: Interval::ZERO,
    };

    pub fn new(re: Interval, im: Interval) -> Self {
        Self { re, im }
    }

    pub fn point(z: Complex64) -> Self {
        Self {
            re: Interval::point(z.re),
            im: Interval::point(z.im),
        }
    }

    pub fn real(x: Interval) -> Self {
        Self {
            re: x,
            im: Interval::ZERO,
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, r: Interval) -> Self {
        Self {
            re: self.re * r,
            im: self.im * r,
        }
    }

    /// Enclosure of |z|².
    pub fn norm_sqr(self) -> Interval {
        self.re.sqr() + self.im.sqr()
    }

    /// Enclosure of |z|.
    pub fn abs(self) -> Interval {
        if self.im == Interval::ZERO {
            return self.re.abs();
        }
        if self.re == Interval::ZERO {
            return self.im.abs();
        }
        // norm_sqr has a non-negative lower endpoint by construction
        self.norm_sqr()
            .sqrt()
            .expect("squared modulus has non-negative lower bound")
    }

    pub fn mid(self) -> Complex64 {
        Complex64::new(self.re.mid(), self.im.mid())
    }

    pub fn contains(self, z: Complex64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn hull(self, o: CInterval) -> CInterval {
        CInterval {
            re: self.re.hull(o.re),
            im: self.im.hull(o.im),
        }
    }
}

impl From<Complex64> for CInterval {
    fn from(z: Complex64) -> Self {
        CInterval::point(z)
    }
}

impl Add for CInterval {
    type Output = CInterval;
    #[inline]
    fn add(self, o: CInterval) -> CInterval {
        CInterval {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl AddAssign for CInterval {
    #[inline]
    fn add_assign(&mut self, o: CInterval) {
        *self = *self + o;
    }
}

impl Sub for CInterval {
    type Output = CInterval;
    #[inline]
    fn sub(self, o: CInterval) -> CInterval {
        CInterval {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for CInterval {
    type Output = CInterval;
    #[inline]
    fn neg(self) -> CInterval {
        CInterval {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for CInterval {
    type Output = CInterval;
    #[inline]
    fn mul(self, o: CInterval) -> CInterval {
        // real operands are common (D6 data is real); skip the zero products
        if self.im == Interval::ZERO && o.im == Interval::ZERO {
            return CInterval::real(self.re * o.re);
        }
        CInterval {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_encloses_float_product() {
        let a = Complex64::new(0.3, -1.7);
        let b = Complex64::new(2.1, 0.4);
        let p = CInterval::point(a) * CInterval::point(b);
        assert!(p.contains(a * b));
    }

    #[test]
    fn modulus_encloses() {
        let z = Complex64::new(3.0, 4.0);
        let m = CInterval::point(z).abs();
        assert!(m.contains(5.0));
        assert!(m.width() < 1e-14);
    }

    #[test]
    fn conj_flips_imaginary_part() {
        let z = CInterval::point(Complex64::new(1.0, 2.0)).conj();
        assert!(z.contains(Complex64::new(1.0, -2.0)));
    }
}
