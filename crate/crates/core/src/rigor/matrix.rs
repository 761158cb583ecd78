//! Dense row-major matrices over any coefficient ring used by the proofs.

use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;

use crate::Error;

use super::{CInterval, Interval};

/// Minimal ring interface for matrix kernels.
pub trait Ring:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
}

impl Ring for Interval {
    fn zero() -> Self {
        Interval::ZERO
    }
    fn one() -> Self {
        Interval::ONE
    }
}

impl Ring for CInterval {
    fn zero() -> Self {
        CInterval::ZERO
    }
    fn one() -> Self {
        CInterval::ONE
    }
}

impl Ring for num_complex::Complex64 {
    fn zero() -> Self {
        num_complex::Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        num_complex::Complex64::new(1.0, 0.0)
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntervalMatrix = Mat<Interval>;
pub type CIntervalMatrix = Mat<CInterval>;
pub type IntervalVector = Vec<Interval>;

impl<T: Ring> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Ring>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>, Error> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matvec: {}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    pub fn matmul(&self, b: &Mat<T>) -> Result<Mat<T>, Error> {
        if self.cols != b.rows {
            return Err(Error::Dimension(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let n = b.cols;
        let data: Vec<T> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut acc = vec![T::zero(); n];
                for (k, &a) in self.row(i).iter().enumerate() {
                    for (c, &bk) in acc.iter_mut().zip(b.row(k)) {
                        *c = *c + a * bk;
                    }
                }
                acc
            })
            .collect();
        Ok(Mat {
            rows: self.rows,
            cols: n,
            data,
        })
    }

    pub fn add(&self, b: &Mat<T>) -> Result<Mat<T>, Error> {
        self.zip_with(b, |x, y| x + y)
    }

    pub fn sub(&self, b: &Mat<T>) -> Result<Mat<T>, Error> {
        self.zip_with(b, |x, y| x - y)
    }

    fn zip_with(&self, b: &Mat<T>, f: impl Fn(T, T) -> T) -> Result<Mat<T>, Error> {
        if self.rows != b.rows || self.cols != b.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&b.data)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        })
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn imatvec(m: &IntervalMatrix, v: &[Interval]) -> Result<IntervalVector, Error> {
    m.matvec(v)
}

pub fn imatmul(a: &IntervalMatrix, b: &IntervalMatrix) -> Result<IntervalMatrix, Error> {
    a.matmul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        let v = vec![Interval::point(1.5), Interval::point(-2.0), Interval::point(0.25)];
        let i = IntervalMatrix::identity(3);
        assert_eq!(imatvec(&i, &v).unwrap(), v);
        let z = IntervalMatrix::zeros(3, 3);
        assert!(imatvec(&z, &v).unwrap().iter().all(|x| *x == Interval::ZERO));
    }

    #[test]
    fn dimension_mismatch() {
        let m = IntervalMatrix::zeros(2, 3);
        assert!(m.matvec(&[Interval::ONE; 2]).is_err());
        assert!(m.matmul(&IntervalMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn matmul_associates_with_matvec() {
        let a = Mat::<f64>::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        let b = Mat::<f64>::from_fn(3, 3, |i, j| (i as f64) - (j as f64));
        let v = [1.0, 2.0, 3.0];
        let lhs = a.matmul(&b).unwrap().matvec(&v).unwrap();
        let rhs = a.matvec(&b.matvec(&v).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
