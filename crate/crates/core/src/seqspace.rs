//! Symmetric Fourier sequences on reduced index sets, weighted ℓ¹ norms,
//! convolution and convolution operators.
//!
//! The norm of a sequence is that of its full unfolded coefficient array,
//! `‖u‖ = Σ_k |u_k| ν^{|k|}` with the orbit shell as index norm, which on
//! representatives reads `Σ_n α_n ν^{|n|} |u_n|`.

use std::fmt::Debug;
use std::ops::Neg;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::lattice::{Index, OrbitTable};
use crate::rigor::{CInterval, Interval, Mat, Ring};
use crate::Error;

/// Coefficient field: plain complex numbers for float work, complex
/// intervals for rigorous work.
pub trait Coeff: Ring + Neg<Output = Self> + Debug + PartialEq + 'static {
    fn from_c64(z: Complex64) -> Self;
    /// Lifts a real enclosure; float coefficients take its midpoint.
    fn from_real(x: Interval) -> Self;
    fn conj(self) -> Self;
    /// Rigorous enclosure of |z| (exact inputs for `Complex64`).
    fn modulus(self) -> Interval;
    fn to_cinterval(self) -> CInterval;
    fn to_c64(self) -> Complex64;
    fn is_zero(&self) -> bool;
}

impl Coeff for Complex64 {
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn from_real(x: Interval) -> Self {
        Complex64::new(x.mid(), 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> Interval {
        CInterval::point(self).abs()
    }
    fn to_cinterval(self) -> CInterval {
        CInterval::point(self)
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Coeff for CInterval {
    fn from_c64(z: Complex64) -> Self {
        CInterval::point(z)
    }
    fn from_real(x: Interval) -> Self {
        CInterval::real(x)
    }
    fn conj(self) -> Self {
        CInterval::conj(self)
    }
    fn modulus(self) -> Interval {
        self.abs()
    }
    fn to_cinterval(self) -> CInterval {
        self
    }
    fn to_c64(self) -> Complex64 {
        self.mid()
    }
    fn is_zero(&self) -> bool {
        *self == CInterval::ZERO
    }
}

/// Norm weights `α_n ν^{|n|}` of the unit symmetric sequences of a table.
pub fn weights(table: &OrbitTable, nu: f64) -> Vec<Interval> {
    let nu_i = Interval::point(nu);
    let max_shell = (0..table.len()).map(|p| table.shell(p)).max().unwrap_or(0);
    let mut pows = Vec::with_capacity(max_shell as usize + 1);
    let mut acc = Interval::ONE;
    for _ in 0..=max_shell {
        pows.push(acc);
        acc = acc * nu_i;
    }
    (0..table.len())
        .map(|p| pows[table.shell(p) as usize] * Interval::point(table.alpha(p) as f64))
        .collect()
}

/// Float version of the weights, for non-rigorous diagnostics.
pub fn weights_f64(table: &OrbitTable, nu: f64) -> Vec<f64> {
    (0..table.len())
        .map(|p| table.alpha(p) as f64 * nu.powi(table.shell(p) as i32))
        .collect()
}

/// Coefficients on the full box `[−m, m]²`, row-major in (k₁, k₂).
#[derive(Clone, Debug, PartialEq)]
pub struct FullGrid<T> {
    pub m: u32,
    pub data: Vec<T>,
}

impl<T: Coeff> FullGrid<T> {
    pub fn zeros(m: u32) -> Self {
        let side = (2 * m + 1) as usize;
        Self {
            m,
            data: vec![T::zero(); side * side],
        }
    }

    fn offset(&self, k: Index) -> Option<usize> {
        let m = self.m as i32;
        if k.0.abs() > m || k.1.abs() > m {
            return None;
        }
        let side = (2 * self.m + 1) as usize;
        Some((k.0 + m) as usize * side + (k.1 + m) as usize)
    }

    pub fn get(&self, k: Index) -> T {
        self.offset(k).map_or(T::zero(), |o| self.data[o])
    }

    pub fn set(&mut self, k: Index, v: T) {
        if let Some(o) = self.offset(k) {
            self.data[o] = v;
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = Index> + '_ {
        let m = self.m as i32;
        (-m..=m).flat_map(move |a| (-m..=m).map(move |b| (a, b)))
    }
}

#[derive(Clone, Debug)]
pub struct SymSequence<T> {
    table: Arc<OrbitTable>,
    d: f64,
    coeffs: Vec<T>,
}

pub type Seq = SymSequence<Complex64>;
pub type ISeq = SymSequence<CInterval>;

impl<T: Coeff> SymSequence<T> {
    pub fn new(table: Arc<OrbitTable>, d: f64, coeffs: Vec<T>) -> Result<Self, Error> {
        if coeffs.len() != table.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} representatives",
                coeffs.len(),
                table.len()
            )));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("half-period d = {d}")));
        }
        Ok(Self { table, d, coeffs })
    }

    pub fn zeros(table: Arc<OrbitTable>, d: f64) -> Self {
        let n = table.len();
        Self {
            table,
            d,
            coeffs: vec![T::zero(); n],
        }
    }

    /// Sequence with a single nonzero coefficient at `rep`.
    pub fn unit(table: Arc<OrbitTable>, d: f64, rep: Index, value: T) -> Result<Self, Error> {
        let p = table.position(rep).ok_or(Error::NotRepresentative(rep))?;
        let mut s = Self::zeros(table, d);
        s.coeffs[p] = value;
        Ok(s)
    }

    pub fn table(&self) -> &Arc<OrbitTable> {
        &self.table
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn truncation(&self) -> u32 {
        self.table.truncation()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, rep: Index) -> Option<T> {
        self.table.position(rep).map(|p| self.coeffs[p])
    }

    /// Coefficient at an arbitrary (unfolded) index.
    #[inline]
    pub fn at(&self, k: Index) -> T {
        self.table
            .position_of(k)
            .map_or(T::zero(), |p| self.coeffs[p])
    }

    fn check_compatible(&self, other: &Self) -> Result<(), Error> {
        if !self.table.same_group(&other.table) {
            return Err(Error::Mismatch("different symmetry groups".into()));
        }
        if self.d != other.d {
            return Err(Error::Mismatch(format!("d = {} vs {}", self.d, other.d)));
        }
        Ok(())
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> SymSequence<U> {
        SymSequence {
            table: self.table.clone(),
            d: self.d,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn to_interval(&self) -> ISeq {
        self.map(|c| c.to_cinterval())
    }

    pub fn to_point(&self) -> Seq {
        self.map(|c| c.to_c64())
    }

    /// Entrywise sum; the result lives on the larger of the two tables.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self, Error> {
        self.check_compatible(other)?;
        let (big, small) = if self.len() >= other.len() {
            (&self.table, &other.table)
        } else {
            (&other.table, &self.table)
        };
        let _ = small;
        let coeffs = (0..big.len())
            .map(|p| {
                let a = self.coeffs.get(p).copied().unwrap_or(T::zero());
                let b = other.coeffs.get(p).copied().unwrap_or(T::zero());
                f(a, b)
            })
            .collect();
        Ok(Self {
            table: big.clone(),
            d: self.d,
            coeffs,
        })
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|x| c * x)
    }

    /// Unfolds onto the box `[−m, m]²`; orbits not retained are zero.
    pub fn unfold(&self, m: u32) -> FullGrid<T> {
        let mut g = FullGrid::zeros(m);
        for p in 0..self.len() {
            for &k in self.table.orbit(p) {
                g.set(k, self.coeffs[p]);
            }
        }
        g
    }

    /// Reads a symmetric full grid back at the representatives of `table`.
    pub fn fold(grid: &FullGrid<T>, table: Arc<OrbitTable>, d: f64) -> Result<Self, Error> {
        let coeffs = table.reps().iter().map(|&r| grid.get(r)).collect();
        Self::new(table, d, coeffs)
    }

    /// Weighted ℓ¹ norm, rigorous upper enclosure.
    pub fn norm(&self, nu: f64) -> Interval {
        let w = weights(&self.table, nu);
        Interval::sum(self.coeffs.iter().zip(&w).map(|(c, &w)| c.modulus() * w))
    }

    /// Supremum of |u_k| over all unfolded indices except the origin.
    pub fn sup_norm_without_origin(&self) -> Interval {
        (0..self.len())
            .filter(|&p| self.table.rep(p) != (0, 0))
            .map(|p| self.coeffs[p].modulus())
            .fold(Interval::ZERO, Interval::max)
    }

    /// Re-embeds on another table of the same group: truncation `π^{N′}`
    /// when smaller, zero padding when larger.
    pub fn project_to(&self, table: &Arc<OrbitTable>) -> Result<Self, Error> {
        if !self.table.same_group(table) {
            return Err(Error::Mismatch("different symmetry groups".into()));
        }
        let mut coeffs = vec![T::zero(); table.len()];
        let common = coeffs.len().min(self.len());
        coeffs[..common].copy_from_slice(&self.coeffs[..common]);
        Ok(Self {
            table: table.clone(),
            d: self.d,
            coeffs,
        })
    }

    pub fn project(&self, n: u32) -> Self {
        let t = OrbitTable::build(self.table.group(), n);
        self.project_to(&t).expect("same group")
    }

    pub fn pad(&self, n: u32) -> Self {
        self.project(n)
    }

    /// Convolution onto the table of truncation N₁ + N₂.
    pub fn convolve(&self, other: &Self) -> Result<Self, Error> {
        let t = OrbitTable::build(
            self.table.group(),
            self.truncation() + other.truncation(),
        );
        self.convolve_to(other, &t)
    }

    /// `π^{target} (self * other)`, computed only at the target representatives.
    pub fn convolve_to(&self, other: &Self, target: &Arc<OrbitTable>) -> Result<Self, Error> {
        self.check_compatible(other)?;
        if !self.table.same_group(target) {
            return Err(Error::Mismatch("target table of another group".into()));
        }
        // enumerate the sparser operand in unfolded form
        let (dense, sparse) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let terms: Vec<(Index, T)> = (0..sparse.len())
            .filter(|&p| !sparse.coeffs[p].is_zero())
            .flat_map(|p| {
                let c = sparse.coeffs[p];
                sparse.table.orbit(p).iter().map(move |&k| (k, c))
            })
            .collect();
        let coeffs = target
            .reps()
            .par_iter()
            .map(|&n| {
                let mut acc = T::zero();
                for &(k, c) in &terms {
                    if let Some(q) = dense.table.position_of((n.0 - k.0, n.1 - k.1)) {
                        acc = acc + dense.coeffs[q] * c;
                    }
                }
                acc
            })
            .collect();
        Ok(Self {
            table: target.clone(),
            d: self.d,
            coeffs,
        })
    }

    /// Pointwise value of the real-valued function (real part of the series).
    pub fn evaluate(&self, x: [f64; 2]) -> f64 {
        let c = std::f64::consts::PI / self.d;
        let s3 = 3f64.sqrt() / 2.0;
        let mut acc = 0.0;
        for p in 0..self.len() {
            let u = self.coeffs[p].to_c64();
            if u.re == 0.0 && u.im == 0.0 {
                continue;
            }
            let mut e = Complex64::new(0.0, 0.0);
            for &(k1, k2) in self.table.orbit(p) {
                let w = [c * (k1 as f64 - 0.5 * k2 as f64), c * s3 * k2 as f64];
                let th = w[0] * x[0] + w[1] * x[1];
                e += Complex64::new(th.cos(), th.sin());
            }
            acc += (u * e).re;
        }
        acc
    }
}

impl Seq {
    /// Enforces the realness pairing `u_{−n} = conj(u_n)` by averaging.
    pub fn symmetrize(&mut self) {
        let old = self.coeffs.clone();
        for p in 0..self.len() {
            let q = self.table.conj_position(p);
            self.coeffs[p] = 0.5 * (old[p] + old[q].conj());
        }
    }

    /// Largest violation of the realness pairing.
    pub fn realness_defect(&self) -> f64 {
        (0..self.len())
            .map(|p| (self.coeffs[p] - self.coeffs[self.table.conj_position(p)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Non-rigorous float norm.
    pub fn norm_f64(&self, nu: f64) -> f64 {
        let w = weights_f64(&self.table, nu);
        self.coeffs.iter().zip(&w).map(|(c, w)| c.norm() * w).sum()
    }
}

/// Pointwise value of an arbitrary (not necessarily symmetric) unfolded grid.
pub fn evaluate_grid(grid: &FullGrid<Complex64>, d: f64, x: [f64; 2]) -> f64 {
    let c = std::f64::consts::PI / d;
    let s3 = 3f64.sqrt() / 2.0;
    let mut acc = 0.0;
    for k in grid.indices() {
        let u = grid.get(k);
        if u.re == 0.0 && u.im == 0.0 {
            continue;
        }
        let th = c * (k.0 as f64 - 0.5 * k.1 as f64) * x[0] + c * s3 * k.1 as f64 * x[1];
        acc += (u * Complex64::new(th.cos(), th.sin())).re;
    }
    acc
}

/// Finite block of a linear operator between reduced index sets.
#[derive(Clone, Debug)]
pub struct ReducedOperator<T> {
    pub domain: Arc<OrbitTable>,
    pub codomain: Arc<OrbitTable>,
    pub mat: Mat<T>,
}

impl<T: Coeff> ReducedOperator<T> {
    pub fn new(domain: Arc<OrbitTable>, codomain: Arc<OrbitTable>, mat: Mat<T>) -> Result<Self, Error> {
        if mat.rows() != codomain.len() || mat.cols() != domain.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for tables of size {} -> {}",
                mat.rows(),
                mat.cols(),
                domain.len(),
                codomain.len()
            )));
        }
        Ok(Self {
            domain,
            codomain,
            mat,
        })
    }

    pub fn identity(table: Arc<OrbitTable>) -> Self {
        let n = table.len();
        Self {
            domain: table.clone(),
            codomain: table,
            mat: Mat::identity(n),
        }
    }

    pub fn apply(&self, v: &SymSequence<T>) -> Result<SymSequence<T>, Error> {
        let x = v.project_to(&self.domain)?;
        let y = self.mat.matvec(x.coeffs())?;
        SymSequence::new(self.codomain.clone(), v.d(), y)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> ReducedOperator<U> {
        ReducedOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            mat: self.mat.map(f),
        }
    }

    /// Induced operator norm on the weighted ℓ¹ spaces:
    /// `max_m (1/w_m) Σ_n w_n |M_nm|`.
    pub fn op_norm(&self, nu: f64) -> Interval {
        let wd = weights(&self.domain, nu);
        let wc = weights(&self.codomain, nu);
        op_norm_weighted(&self.mat, &wc, &wd)
    }
}

/// `max_m (1/wd_m) Σ_n wc_n |M_nm|` in interval arithmetic.
pub fn op_norm_weighted<T: Coeff>(m: &Mat<T>, wc: &[Interval], wd: &[Interval]) -> Interval {
    assert_eq!(m.rows(), wc.len());
    assert_eq!(m.cols(), wd.len());
    let cols: Vec<Interval> = (0..m.cols())
        .into_par_iter()
        .map(|j| {
            let s = Interval::sum((0..m.rows()).map(|i| wc[i] * m[(i, j)].modulus()));
            s.try_div(wd[j]).expect("weights are positive")
        })
        .collect();
    cols.into_iter().fold(Interval::ZERO, Interval::max)
}

/// Matrix of `v ↦ π^{codomain}(u * v)` on `domain`.
pub fn conv_operator<T: Coeff>(
    u: &SymSequence<T>,
    domain: &Arc<OrbitTable>,
    codomain: &Arc<OrbitTable>,
) -> Result<ReducedOperator<T>, Error> {
    if !u.table().same_group(domain) || !u.table().same_group(codomain) {
        return Err(Error::Mismatch("tables of another group".into()));
    }
    let rows = codomain.len();
    let cols = domain.len();
    let entries: Vec<T> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|i| {
            let n = codomain.rep(i);
            (0..cols).map(move |j| {
                let mut acc = T::zero();
                for &k in domain.orbit(j) {
                    acc = acc + u.at((n.0 - k.0, n.1 - k.1));
                }
                acc
            })
        })
        .collect();
    ReducedOperator::new(domain.clone(), codomain.clone(), Mat::from_vec(rows, cols, entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_group;

    fn table(j: u32, n: u32) -> Arc<OrbitTable> {
        OrbitTable::build(&build_group(j).unwrap(), n)
    }

    #[test]
    fn unfold_unit_coefficient() {
        let t = table(6, 1);
        let u = Seq::unit(t, 3.0, (1, 1), Complex64::new(1.0, 0.0)).unwrap();
        let g = u.unfold(2);
        let ones = g.data.iter().filter(|z| z.re == 1.0).count();
        assert_eq!(ones, 6);
        assert_eq!(g.get((1, 0)).re, 1.0);
        assert_eq!(g.get((0, 0)).re, 0.0);
    }

    #[test]
    fn norm_examples() {
        let t = table(6, 1);
        let u = Seq::unit(t.clone(), 3.0, (1, 1), Complex64::new(1.0, 0.0)).unwrap();
        assert!(u.norm(2.0).contains(12.0));
        let c = Seq::unit(t, 3.0, (0, 0), Complex64::new(-2.5, 0.0)).unwrap();
        assert!(c.norm(1.3).contains(2.5));
    }

    #[test]
    fn orbit_square_at_origin() {
        let t = table(6, 1);
        let u = Seq::unit(t, 3.0, (1, 1), Complex64::new(1.0, 0.0)).unwrap();
        let w = u.convolve(&u).unwrap();
        assert_eq!(w.get((0, 0)).unwrap(), Complex64::new(6.0, 0.0));
    }

    #[test]
    fn delta_is_the_unit() {
        let t = table(3, 3);
        let mut v = Seq::zeros(t.clone(), 2.0);
        for (p, c) in v.coeffs_mut().iter_mut().enumerate() {
            *c = Complex64::new(p as f64 * 0.1, -(p as f64) * 0.05);
        }
        let e = Seq::unit(table(3, 0), 2.0, (0, 0), Complex64::new(1.0, 0.0)).unwrap();
        let w = e.convolve_to(&v, &t).unwrap();
        assert_eq!(w.coeffs(), v.coeffs());
        let id = conv_operator(&e, &t, &t).unwrap();
        for i in 0..t.len() {
            for j in 0..t.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(id.mat[(i, j)], Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn op_norm_simple_cases() {
        let t = table(6, 3);
        let id = ReducedOperator::<Complex64>::identity(t.clone());
        assert!(id.op_norm(1.4).contains(1.0));
        let n = t.len();
        let diag = Mat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(i as f64 - 2.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let d = ReducedOperator::new(t.clone(), t, diag).unwrap();
        let want = (0..n).map(|i| (i as f64 - 2.0).abs()).fold(0.0, f64::max);
        let got = d.op_norm(1.1);
        assert!(got.contains(want) || (got.hi() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn projection_round_trip() {
        let t = table(3, 4);
        let mut u = Seq::zeros(t, 1.5);
        for (p, c) in u.coeffs_mut().iter_mut().enumerate() {
            *c = Complex64::new(1.0 / (1.0 + p as f64), 0.5);
        }
        assert_eq!(u.project(4).coeffs(), u.coeffs());
        assert_eq!(u.pad(7).project(4).coeffs(), u.coeffs());
        let a = u.project(2).project(3);
        assert_eq!(a.coeffs()[..], u.project(2).pad(3).coeffs()[..]);
    }

    #[test]
    fn evaluate_at_origin_sums_orbits() {
        let t = table(3, 2);
        let mut u = Seq::zeros(t.clone(), 2.0);
        for (p, c) in u.coeffs_mut().iter_mut().enumerate() {
            *c = Complex64::new(0.1 * p as f64, 0.0);
        }
        let want: f64 = (0..t.len()).map(|p| t.alpha(p) as f64 * 0.1 * p as f64).sum();
        assert!((u.evaluate([0.0, 0.0]) - want).abs() < 1e-12);
    }
}
