//! Pseudo-arclength continuation on the Lobatto grid and the Chebyshev fit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cheb;
use super::ChebBranch;
use crate::seqspace::Seq;
use crate::shmodel::{apply_df, apply_f_target, ModelParams};
use crate::Error;

/// One corrected grid point with its unit tangent.
#[derive(Clone, Debug)]
pub struct GridPoint {
    /// Arclength from the start, in `[0, s_fix]`.
    pub s: f64,
    /// Rescaled position `2s/s_fix − 1` in `[−1, 1]`.
    pub shat: f64,
    pub mu: f64,
    pub u: Seq,
    pub mu_dot: f64,
    pub u_dot: Seq,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ContinuationOptions {
    pub s_fix: f64,
    pub nc: usize,
    /// `+1` or `−1`: sign of `μ̇` at the start.
    pub direction: f64,
    pub tol: f64,
    pub maxit: usize,
    /// Halvings of a failed step before giving up.
    pub max_halvings: u32,
}

impl ContinuationOptions {
    pub fn new(s_fix: f64, nc: usize, direction: f64) -> Self {
        Self {
            s_fix,
            nc,
            direction,
            tol: 1e-12,
            maxit: 30,
            max_halvings: 4,
        }
    }
}

/// The real pairing `Σ_n Re(h_n conj(t_n))` over representatives, written
/// complex-linearly as `Σ_n h_n t_{−n}`; both agree on real-valued fields.
pub fn phase_pairing(h: &Seq, t: &Seq) -> Complex64 {
    let table = h.table();
    (0..table.len())
        .map(|p| h.coeffs()[p] * t.coeffs()[table.conj_position(p)])
        .sum()
}

fn with_mu(p: &ModelParams, mu: f64) -> ModelParams {
    ModelParams { mu, ..*p }
}

/// `[[row_μ, ℓ_row], [u, D_u f(μ, u)]]`: the Galerkin Jacobian bordered by
/// `∂_μ f = u` and a phase row.
pub fn bordered_matrix(mu: f64, u: &Seq, p: &ModelParams, row_mu: Complex64, row_u: &Seq) -> Result<DMatrix<Complex64>, Error> {
    let df = apply_df(u, &with_mu(p, mu))?;
    let n = u.len();
    let table = u.table();
    let mut m = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
    m[(0, 0)] = row_mu;
    for j in 0..n {
        m[(0, j + 1)] = row_u.coeffs()[table.conj_position(j)];
        m[(j + 1, 0)] = u.coeffs()[j];
        for i in 0..n {
            m[(i + 1, j + 1)] = df.mat[(i, j)];
        }
    }
    Ok(m)
}

fn tangent_norm(mu_dot: f64, u_dot: &Seq) -> f64 {
    (mu_dot * mu_dot + u_dot.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Unit tangent `(μ̇, u̇)` of the zero set of `π^N f` at `(μ, u)`, solved
/// from the Jacobian bordered by the previous tangent (or by `e_μ` at the
/// first point), and oriented to agree with it.
pub fn tangent_vector(mu: f64, u: &Seq, p: &ModelParams, prev: Option<(f64, &Seq)>) -> Result<(f64, Seq), Error> {
    let zero = Seq::zeros(u.table().clone(), u.d());
    let (row_mu, row_u) = match prev {
        Some((m, t)) => (m, t),
        None => (1.0, &zero),
    };
    let m = bordered_matrix(mu, u, p, Complex64::new(row_mu, 0.0), row_u)?;
    let mut rhs = DVector::from_element(u.len() + 1, Complex64::new(0.0, 0.0));
    rhs[0] = Complex64::new(1.0, 0.0);
    let t = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("bordered Jacobian for the tangent".into()))?;
    let mut u_dot = Seq::new(u.table().clone(), u.d(), t.iter().skip(1).copied().collect())?;
    u_dot.symmetrize();
    let mut mu_dot = t[0].re;
    let nrm = tangent_norm(mu_dot, &u_dot);
    if !(nrm.is_finite() && nrm > 0.0) {
        return Err(Error::Singular("tangent has no finite direction".into()));
    }
    let mut sign = 1.0 / nrm;
    if let Some((pm, pu)) = prev {
        if mu_dot * pm + phase_pairing(&u_dot, pu).re < 0.0 {
            sign = -sign;
        }
    }
    mu_dot *= sign;
    let u_dot = u_dot.scale(Complex64::new(sign, 0.0));
    Ok((mu_dot, u_dot))
}

/// `‖[∂_μ f, ∂_u f]·(μ̇, u̇)‖` in the weighted norm.
pub fn tangent_residual(mu: f64, u: &Seq, mu_dot: f64, u_dot: &Seq, p: &ModelParams) -> Result<f64, Error> {
    let df = apply_df(u, &with_mu(p, mu))?;
    let du = df.apply(u_dot)?;
    let r = du.add(&u.scale(Complex64::new(mu_dot, 0.0)))?;
    Ok(r.norm_f64(p.nu))
}

struct Anchor<'a> {
    mu: f64,
    u: &'a Seq,
    mu_dot: f64,
    u_dot: &'a Seq,
}

/// Newton on `[⟨w − w_prev, ẇ_prev⟩ − ds ; π^N f(w)] = 0` from the predictor.
fn correct(a: &Anchor, ds: f64, p: &ModelParams, opts: &ContinuationOptions) -> Result<(f64, Seq, f64), String> {
    let mu_pred = a.mu + ds * a.mu_dot;
    let u_pred = a.u.add(&a.u_dot.scale(Complex64::new(ds, 0.0))).map_err(|e| e.to_string())?;
    let (mut mu, mut u) = (mu_pred, u_pred.clone());
    let mut last = f64::INFINITY;
    for _ in 0..=opts.maxit {
        let f = apply_f_target(&u, &with_mu(p, mu), u.table()).map_err(|e| e.to_string())?;
        let diff = u.sub(a.u).map_err(|e| e.to_string())?;
        let g0 = Complex64::new((mu - a.mu) * a.mu_dot - ds, 0.0) + phase_pairing(&diff, a.u_dot);
        let res = g0.norm().max(f.norm_f64(p.nu));
        if !res.is_finite() {
            return Err(format!("non-finite residual (last {last:e})"));
        }
        last = res;
        if res < opts.tol {
            // a correction longer than the step means the corrector fell
            // onto another branch
            let diff = u.sub(&u_pred).map_err(|e| e.to_string())?;
            let jump = tangent_norm(mu - mu_pred, &diff);
            if jump > ds.abs() {
                return Err(format!("corrector moved {jump:e} for a step of {ds:e}"));
            }
            return Ok((mu, u, res));
        }
        let m = bordered_matrix(mu, &u, p, Complex64::new(a.mu_dot, 0.0), a.u_dot).map_err(|e| e.to_string())?;
        let mut rhs = DVector::from_element(u.len() + 1, g0);
        for (i, &c) in f.coeffs().iter().enumerate() {
            rhs[i + 1] = c;
        }
        let step = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| format!("singular bordered Jacobian (residual {res:e})"))?;
        mu -= step[0].re;
        for (c, s) in u.coeffs_mut().iter_mut().zip(step.iter().skip(1)) {
            *c -= *s;
        }
        u.symmetrize();
    }
    Err(format!("corrector did not converge, last residual {last:e}"))
}

/// Advances by `ds` from the anchor, halving the step on failure.
fn advance(a: &Anchor, ds: f64, p: &ModelParams, opts: &ContinuationOptions, depth: u32) -> Result<(f64, Seq, f64), String> {
    match correct(a, ds, p, opts) {
        Ok(x) => Ok(x),
        Err(e) if depth >= opts.max_halvings => Err(e),
        Err(_) => {
            let (mu, u, _) = advance(a, 0.5 * ds, p, opts, depth + 1)?;
            let (mu_dot, u_dot) =
                tangent_vector(mu, &u, p, Some((a.mu_dot, a.u_dot))).map_err(|e| e.to_string())?;
            let mid = Anchor {
                mu,
                u: &u,
                mu_dot,
                u_dot: &u_dot,
            };
            advance(&mid, 0.5 * ds, p, opts, depth + 1)
        }
    }
}

/// Arclength grid with `N_FFT/2 ≥ N_c + 1` points.
pub fn continuation_grid(s_fix: f64, nc: usize) -> Vec<f64> {
    cheb::arclength_grid(s_fix, cheb::nfft_for(nc))
}

/// Predictor–corrector along the grid, then the Chebyshev fit of `μ`, `u`
/// and the tangent.
pub fn continue_branch(u0: &Seq, p: &ModelParams, opts: &ContinuationOptions) -> Result<(ChebBranch, Vec<GridPoint>), Error> {
    p.validate()?;
    if !(opts.s_fix > 0.0 && opts.s_fix.is_finite()) {
        return Err(Error::InvalidParameter("s_fix must be positive".into()));
    }
    if opts.direction == 0.0 || !opts.direction.is_finite() {
        return Err(Error::InvalidParameter("direction must be +1 or -1".into()));
    }
    if u0.truncation() != p.n || u0.table().j() != p.j || u0.d() != p.d {
        return Err(Error::Mismatch("start point does not match the parameters".into()));
    }
    let start_res = apply_f_target(u0, p, u0.table())?.norm_f64(p.nu);
    let (mut mu_dot, mut u_dot) = tangent_vector(p.mu, u0, p, None)?;
    if mu_dot * opts.direction < 0.0 {
        mu_dot = -mu_dot;
        u_dot = u_dot.scale(Complex64::new(-1.0, 0.0));
    }
    let s = continuation_grid(opts.s_fix, opts.nc);
    let shat = cheb::rescaled_grid(cheb::nfft_for(opts.nc));
    let mut grid = vec![GridPoint {
        s: 0.0,
        shat: -1.0,
        mu: p.mu,
        u: u0.clone(),
        mu_dot,
        u_dot,
        residual: start_res,
    }];
    for k in 1..s.len() {
        let prev = &grid[k - 1];
        let anchor = Anchor {
            mu: prev.mu,
            u: &prev.u,
            mu_dot: prev.mu_dot,
            u_dot: &prev.u_dot,
        };
        let (mu, u, residual) =
            advance(&anchor, s[k] - s[k - 1], p, opts, 0).map_err(|reason| Error::Continuation { k, reason })?;
        let (mu_dot, u_dot) = tangent_vector(mu, &u, p, Some((prev.mu_dot, &prev.u_dot)))?;
        grid.push(GridPoint {
            s: s[k],
            shat: shat[k],
            mu,
            u,
            mu_dot,
            u_dot,
            residual,
        });
    }
    let branch = fit_branch(&grid, p, opts.s_fix, opts.nc)?;
    Ok((branch, grid))
}

fn fit_seq(values: Vec<&Seq>, nodes: &[f64], nc: usize) -> Vec<Seq> {
    let owned: Vec<Seq> = values.into_iter().cloned().collect();
    cheb::fit(
        &owned,
        nodes,
        nc,
        |x, w| x.scale(Complex64::new(w, 0.0)),
        |a, b| a.add(b).expect("grid sequences share a table"),
    )
    .into_iter()
    .map(|mut c| {
        c.symmetrize();
        c
    })
    .collect()
}

/// Fits order-`N_c` series through the grid points at their rescaled
/// positions `ŝ_k`.
pub fn fit_branch(grid: &[GridPoint], p: &ModelParams, s_fix: f64, nc: usize) -> Result<ChebBranch, Error> {
    if grid.len() < nc + 1 {
        return Err(Error::InvalidParameter(format!("{} grid points cannot fit order {nc}", grid.len())));
    }
    let nodes: Vec<f64> = grid.iter().map(|g| g.shat).collect();
    let mus: Vec<f64> = grid.iter().map(|g| g.mu).collect();
    let mud: Vec<f64> = grid.iter().map(|g| g.mu_dot).collect();
    let fit_f = |v: &[f64]| cheb::fit(v, &nodes, nc, |x, w| x * w, |a, b| a + b);
    ChebBranch::new(
        *p,
        s_fix,
        fit_f(&mus),
        fit_seq(grid.iter().map(|g| &g.u).collect(), &nodes, nc),
        fit_f(&mud),
        fit_seq(grid.iter().map(|g| &g.u_dot).collect(), &nodes, nc),
    )
}
