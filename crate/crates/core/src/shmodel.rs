//! The Swift–Hohenberg zero-finding map `f(u) = Lu − γu² + u³` in symmetric
//! Fourier coefficients, its Jacobian, the tail bound `L_N`, Newton's method
//! and the approximate inverse `A`.
//!
//! The symbol of `L = (I + Δ)² + μI` at index `n` is
//! `λ_n = (1 − |ℒñ|²)² + μ` with `|ℒñ|² = (π/d)² q(n)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{build_group, qform, shell, GroupSpec, Index, OrbitTable};
use crate::rigor::{hex_f64, Interval, Mat};
use crate::seqspace::{conv_operator, Coeff, ReducedOperator, Seq, SymSequence};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub j: u32,
    pub n: u32,
    #[serde(with = "hex_f64")]
    pub d: f64,
    #[serde(with = "hex_f64")]
    pub nu: f64,
    #[serde(with = "hex_f64")]
    pub mu: f64,
    #[serde(with = "hex_f64")]
    pub gamma: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.j != 3 && self.j != 6 {
            return Err(Error::UnsupportedGroup(self.j));
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("truncation N must be at least 1".into()));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidParameter(format!("d = {} must be positive", self.d)));
        }
        if !(self.nu >= 1.0 && self.nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("nu = {} must be >= 1", self.nu)));
        }
        if !self.mu.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("mu and gamma must be finite".into()));
        }
        Ok(())
    }

    pub fn group(&self) -> Result<GroupSpec, Error> {
        build_group(self.j)
    }

    pub fn table(&self) -> Result<Arc<OrbitTable>, Error> {
        Ok(OrbitTable::build(&self.group()?, self.n))
    }

    pub fn mu_i(&self) -> Interval {
        Interval::point(self.mu)
    }

    pub fn gamma_i(&self) -> Interval {
        Interval::point(self.gamma)
    }
}

/// `(π/d)²` enclosed.
pub fn wave_scale(d: f64) -> Interval {
    let r = Interval::PI
        .try_div(Interval::point(d))
        .expect("d is positive");
    r.sqr()
}

/// Float symbol `λ_n`.
pub fn symbol(n: Index, d: f64, mu: f64) -> f64 {
    let c = (std::f64::consts::PI / d).powi(2);
    let x = c * qform(n) as f64;
    (1.0 - x).powi(2) + mu
}

/// Rigorous enclosure of `λ_n` for every μ in `mu`.
pub fn symbol_interval(n: Index, d: f64, mu: Interval) -> Interval {
    let x = wave_scale(d) * Interval::point(qform(n) as f64);
    (Interval::ONE - x).sqr() + mu
}

/// `λ` at every representative of a table.
pub fn symbols<T: Coeff>(table: &OrbitTable, d: f64, mu: Interval) -> Vec<T> {
    table
        .reps()
        .iter()
        .map(|&n| T::from_real(symbol_interval(n, d, mu)))
        .collect()
}

/// `π^{target}(λ u − γ u² + u³)` with the symbol given per representative
/// of the target table.
pub fn apply_f_with<T: Coeff>(
    u: &SymSequence<T>,
    lambda: &[T],
    gamma: T,
    target: &Arc<OrbitTable>,
) -> Result<SymSequence<T>, Error> {
    if lambda.len() != target.len() {
        return Err(Error::Dimension("symbol length differs from target".into()));
    }
    let t2 = OrbitTable::build(u.table().group(), 2 * u.truncation());
    let u2 = u.convolve_to(u, &t2)?;
    let u3 = u2.convolve_to(u, target)?;
    let lin = u.project_to(target)?;
    let coeffs = (0..target.len())
        .map(|p| {
            let quad = u2.coeffs().get(p).copied().unwrap_or(T::zero());
            lambda[p] * lin.coeffs()[p] - gamma * quad + u3.coeffs()[p]
        })
        .collect();
    SymSequence::new(target.clone(), u.d(), coeffs)
}

/// `f(u)` on the full support `I^{3N}`.
pub fn apply_f<T: Coeff>(u: &SymSequence<T>, p: &ModelParams) -> Result<SymSequence<T>, Error> {
    let target = OrbitTable::build(u.table().group(), 3 * u.truncation());
    apply_f_target(u, p, &target)
}

/// `π^{target} f(u)`.
pub fn apply_f_target<T: Coeff>(
    u: &SymSequence<T>,
    p: &ModelParams,
    target: &Arc<OrbitTable>,
) -> Result<SymSequence<T>, Error> {
    let lam = symbols::<T>(target, u.d(), p.mu_i());
    apply_f_with(u, &lam, T::from_real(p.gamma_i()), target)
}

/// `v = −2γu + 3u²`, the multiplier sequence of `DG(u)`.
pub fn dg_multiplier<T: Coeff>(u: &SymSequence<T>, gamma: T) -> Result<SymSequence<T>, Error> {
    let t2 = OrbitTable::build(u.table().group(), 2 * u.truncation());
    let u2 = u.convolve_to(u, &t2)?;
    let two = T::from_real(Interval::point(2.0));
    let three = T::from_real(Interval::point(3.0));
    let lin = u.project_to(&t2)?;
    let coeffs = (0..t2.len())
        .map(|p| three * u2.coeffs()[p] - two * gamma * lin.coeffs()[p])
        .collect();
    SymSequence::new(t2, u.d(), coeffs)
}

/// Galerkin block `π^N Df(u) π^N` over the table of `u`.
pub fn apply_df<T: Coeff>(u: &SymSequence<T>, p: &ModelParams) -> Result<ReducedOperator<T>, Error> {
    apply_df_with(u, &symbols::<T>(u.table(), u.d(), p.mu_i()), T::from_real(p.gamma_i()))
}

pub fn apply_df_with<T: Coeff>(
    u: &SymSequence<T>,
    lambda: &[T],
    gamma: T,
) -> Result<ReducedOperator<T>, Error> {
    let table = u.table().clone();
    let v = dg_multiplier(u, gamma)?;
    let mut op = conv_operator(&v, &table, &table)?;
    for (i, &l) in lambda.iter().enumerate() {
        op.mat[(i, i)] = op.mat[(i, i)] + l;
    }
    Ok(op)
}

/// Smallest value of `q` over the complement of `I^N`, found by walking
/// shells outward until `q ≥ ¾ s²` rules out every further shell.
pub fn complement_qmin(n: u32) -> i64 {
    let mut best = i64::MAX;
    let mut s = n as i64 + 1;
    while best == i64::MAX || 3 * s * s <= 4 * best {
        for a in -s..=s {
            for b in -s..=s {
                let k = (a as i32, b as i32);
                if shell(k) as i64 == s {
                    best = best.min(qform(k));
                }
            }
        }
        s += 1;
    }
    best
}

/// Rigorous lower bound `L_N` for `|λ_n|` over all `n ∉ I^N`, uniformly in
/// `μ ∈ mu`.
pub fn tail_bound_ln(n: u32, d: f64, mu: Interval) -> Result<Interval, Error> {
    let x_min = wave_scale(d) * Interval::point(complement_qmin(n) as f64);
    if x_min.lo() <= 1.0 {
        return Err(Error::TailNotInvertible(format!(
            "smallest tail wave number {x_min} does not exceed 1; increase N"
        )));
    }
    let l = (x_min - Interval::ONE).sqr() + mu;
    if l.lo() <= 0.0 {
        return Err(Error::TailNotInvertible(format!(
            "tail symbol bound {l} is not positive; increase N"
        )));
    }
    Ok(l)
}

/// Random starting point: uniform samples on a `(2N+1)²` grid in lattice
/// coordinates, Fourier transformed and read off at the representatives.
pub fn random_initial_guess(p: &ModelParams, seed: u64, amplitude: f64) -> Result<Seq, Error> {
    p.validate()?;
    let table = p.table()?;
    let m = 2 * p.n as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..m * m)
        .map(|_| amplitude * rng.random_range(-1.0..=1.0))
        .collect();
    let ys: Vec<f64> = (0..m)
        .map(|a| -p.d + 2.0 * p.d * a as f64 / m as f64)
        .collect();
    let c = std::f64::consts::PI / p.d;
    let coeffs: Vec<Complex64> = table
        .reps()
        .par_iter()
        .map(|&(n1, n2)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..m {
                for b in 0..m {
                    let th = -c * (n1 as f64 * ys[a] + n2 as f64 * ys[b]);
                    acc += samples[a * m + b] * Complex64::new(th.cos(), th.sin());
                }
            }
            acc / (m * m) as f64
        })
        .collect();
    let mut u = Seq::new(table, p.d, coeffs)?;
    u.symmetrize();
    Ok(u)
}

fn to_dmatrix(m: &Mat<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

fn from_dmatrix(m: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub u: Seq,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// `‖π^N f(u)‖` in floating point.
pub fn galerkin_residual(u: &Seq, p: &ModelParams) -> Result<f64, Error> {
    Ok(apply_f_target(u, p, u.table())?.norm_f64(p.nu))
}

/// Floating-point Newton iteration on the Galerkin system `π^N f = 0`.
pub fn newton_refine(u0: &Seq, p: &ModelParams, tol: f64, maxit: usize) -> Result<NewtonOutcome, Error> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("Newton tolerance must be positive".into()));
    }
    let mut u = u0.clone();
    let mut fu = apply_f_target(&u, p, u.table())?;
    let mut res = fu.norm_f64(p.nu);
    let mut history = vec![res];
    let mut increases = 0;
    let mut it = 0;
    while res >= tol && it < maxit {
        let jac = to_dmatrix(&apply_df(&u, p)?.mat);
        let rhs = nalgebra::DVector::from_column_slice(fu.coeffs());
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular(format!("Jacobian at Newton step {it}")))?;
        for (c, s) in u.coeffs_mut().iter_mut().zip(step.iter()) {
            *c -= *s;
        }
        u.symmetrize();
        it += 1;
        fu = apply_f_target(&u, p, u.table())?;
        let next = fu.norm_f64(p.nu);
        if !next.is_finite() {
            return Err(Error::Diverged { iterations: it, residual: next });
        }
        increases = if next > res { increases + 1 } else { 0 };
        res = next;
        history.push(res);
        if increases >= 5 {
            return Err(Error::Diverged { iterations: it, residual: res });
        }
    }
    Ok(NewtonOutcome {
        u,
        residual: res,
        iterations: it,
        history,
    })
}

/// Size of the non-constant part, used to reject the flat solutions.
pub fn nonconstant_norm(u: &Seq, nu: f64) -> f64 {
    let mut v = u.clone();
    v.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    v.norm_f64(nu)
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    pub attempts: u64,
    pub amplitude: f64,
    pub tol: f64,
    pub maxit: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            attempts: 50,
            amplitude: 1.0,
            tol: 1e-11,
            maxit: 60,
        }
    }
}

/// Runs Newton from seeds `seed, seed+1, …` and returns the first (lowest
/// seed) non-constant numerical zero, with that seed.
pub fn find_solution(p: &ModelParams, opts: &SearchOptions) -> Result<(u64, NewtonOutcome), Error> {
    p.validate()?;
    let seeds: Vec<u64> = (0..opts.attempts).map(|i| opts.seed.wrapping_add(i)).collect();
    let found = seeds.par_iter().find_map_first(|&s| {
        let u0 = random_initial_guess(p, s, opts.amplitude).ok()?;
        let out = newton_refine(&u0, p, opts.tol, opts.maxit).ok()?;
        (out.residual < opts.tol && nonconstant_norm(&out.u, p.nu) > 1e-3 * out.u.norm_f64(p.nu).max(1e-6))
            .then_some((s, out))
    });
    found.ok_or(Error::Diverged {
        iterations: opts.maxit,
        residual: f64::NAN,
    })
}

#[derive(Clone, Debug)]
pub struct ApproxInverse {
    pub an: ReducedOperator<Complex64>,
    pub tail_inv_bound: Interval,
    pub params: ModelParams,
}

/// Numerical inverse of a point matrix.
pub fn invert(m: &Mat<Complex64>) -> Result<Mat<Complex64>, Error> {
    let inv = to_dmatrix(m)
        .try_inverse()
        .ok_or_else(|| Error::Singular("Galerkin block".into()))?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular("Galerkin block inverse is not finite".into()));
    }
    Ok(from_dmatrix(&inv))
}

pub fn build_approx_inverse(u: &Seq, p: &ModelParams) -> Result<ApproxInverse, Error> {
    let df = apply_df(u, p)?;
    let an = ReducedOperator::new(df.codomain.clone(), df.domain.clone(), invert(&df.mat)?)?;
    let ln = tail_bound_ln(u.truncation(), u.d(), p.mu_i())?;
    Ok(ApproxInverse {
        an,
        tail_inv_bound: ln.recip()?,
        params: *p,
    })
}
