//! Approximate inverse `B(s)` along the branch and the bounds of the
//! radii condition, uniform in `s`.
//!
//! Every series is multiplied exactly in interval arithmetic; the `X`-norm
//! of a series is the con-norm `‖g₀‖ + 2Σ‖g_c‖`, which dominates
//! `sup_s ‖g(s)‖`. The tail of `B(s)` is the diagonal `1/λ_n(μ(s))` and is
//! bounded by `(2N_c + 1)/L_{N,K}`. With `fac` that bound,
//! `v̄ = −2γū + 3ū²`, `q = −2γδ + 6ū`:
//!
//! - `Y₀ = con‖B^N [0; π^N f(ū)]‖ + fac·con‖(π^{3N} − π^N) f(ū)‖`
//! - `Z₀ = con‖I − B^N DF^N‖`
//! - `Z₁ = Σ_i W_i Σ_{j≥1} con|B_ij| φ + fac·con‖v̄‖`, `φ = max_{k≠0} con|v̄_k| / ν^{N+1}`
//! - `Z₂(r) = (con‖B^N‖ + fac)(1 + con‖q‖ + 3r)`

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cheb::{self, con_factor, con_norm};
use super::continuation::bordered_matrix;
use super::{ChebBranch, LnkMode};
use crate::lattice::OrbitTable;
use crate::proof::{best_radius, check_radii, Bounds, RadiiCheck, Radius, SCAN_MAX, SCAN_POINTS};
use crate::rigor::{hex_f64, CInterval, Interval, Mat};
use crate::seqspace::{conv_operator, op_norm_weighted, weights, ISeq};
use crate::shmodel::{apply_df_with, apply_f_with, dg_multiplier, invert, symbols, tail_bound_ln};
use crate::Error;

/// Chebyshev coefficients of the finite block `B^N(s)`, acting on
/// `(η, h) ∈ ℝ × ℂ^{I^N}` with `η` first.
pub type BMatrix = Vec<Mat<Complex64>>;

fn from_dmatrix(m: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Inverts the bordered block of the fitted branch at the grid points and
/// fits the inverses to order `N_c`.
pub fn build_b(branch: &ChebBranch) -> Result<BMatrix, Error> {
    let nodes = cheb::rescaled_grid(cheb::nfft_for(branch.nc()));
    let inverses = nodes
        .par_iter()
        .map(|&s| {
            let (_, ud) = branch.tangent_at(s);
            let m = bordered_matrix(branch.mu_at(s), &branch.u_at(s), &branch.params, Complex64::new(0.0, 0.0), &ud)?;
            invert(&from_dmatrix(&m))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(cheb::fit(
        &inverses,
        &nodes,
        branch.nc(),
        |m, w| m.map(|z| z * w),
        |a, b| a.add(b).expect("same dimensions"),
    ))
}

/// Enclosure of `{μ(s) : s ∈ [−1, 1]}`.
pub fn mu_range(branch: &ChebBranch) -> Interval {
    let mu: Vec<Interval> = branch.mu.iter().map(|&m| Interval::point(m)).collect();
    cheb::range(&mu)
}

/// `L_{N,K}`, a lower bound of `|λ_m(μ(s))|` over the tail `m ∉ I^N`.
pub fn tail_bound_lnk(branch: &ChebBranch, mode: LnkMode) -> Result<Interval, Error> {
    let p = &branch.params;
    match mode {
        LnkMode::Conservative => tail_bound_ln(p.n, p.d, mu_range(branch)),
        LnkMode::Literal => {
            let mut best: Option<Interval> = None;
            for &m in &branch.mu {
                let l = tail_bound_ln(p.n, p.d, Interval::point(m))?;
                best = Some(match best {
                    None => l,
                    Some(b) => b.min(l),
                });
            }
            Ok(best.expect("at least one coefficient"))
        }
    }
}

/// Weights of `X`: one for `η`, then `ω_n = α_n ν^{|n|}`.
fn x_weights(table: &OrbitTable, nu: f64) -> Vec<Interval> {
    std::iter::once(Interval::ONE).chain(weights(table, nu)).collect()
}

fn x_norm(v: &[CInterval], w: &[Interval]) -> Interval {
    Interval::sum(v.iter().zip(w).map(|(z, &w)| w * z.abs()))
}

fn tail_norm(f: &ISeq, head: usize, nu: f64) -> Interval {
    let mut t = f.clone();
    for c in &mut t.coeffs_mut()[..head] {
        *c = CInterval::ZERO;
    }
    t.norm(nu)
}

fn add_seq(a: &ISeq, b: &ISeq) -> ISeq {
    a.add(b).expect("series coefficients share a table")
}

/// Interval series of the branch and the products the bounds need.
struct Series {
    mu: Vec<Interval>,
    u: Vec<ISeq>,
    ud: Vec<ISeq>,
    /// `f(μ(s), ū(s))`, order `3N_c`, on `I^{3N}`.
    f: Vec<ISeq>,
    /// `v̄ = −2γū + 3ū²`, order `2N_c`, on `I^{2N}`.
    v: Vec<ISeq>,
}

impl Series {
    fn new(branch: &ChebBranch) -> Result<Self, Error> {
        let p = &branch.params;
        let nc = branch.nc();
        let table = branch.u[0].table().clone();
        let group = table.group().clone();
        let t2 = OrbitTable::build(&group, 2 * p.n);
        let t3 = OrbitTable::build(&group, 3 * p.n);
        let mu: Vec<Interval> = branch.mu.iter().map(|&m| Interval::point(m)).collect();
        let u: Vec<ISeq> = branch.u.iter().map(|s| s.to_interval()).collect();
        let ud: Vec<ISeq> = branch.u_dot.iter().map(|s| s.to_interval()).collect();
        let gamma = CInterval::real(p.gamma_i());
        let u2 = cheb::product_with(nc, nc, |a, b| u[a].convolve_to(&u[b], &t2).expect("same group"), add_seq);
        let u3 = cheb::product_with(2 * nc, nc, |a, b| u2[a].convolve_to(&u[b], &t3).expect("same group"), add_seq);
        let mu_u = cheb::product_with(nc, nc, |a, b| u[b].scale(CInterval::real(mu[a])), add_seq);
        // (1 − (π/d)²q_n)², the μ-free part of the symbol
        let lam0: Vec<CInterval> = symbols(&t3, p.d, Interval::ZERO);
        let f = (0..=3 * nc)
            .map(|c| {
                let mut g = u3[c].clone();
                if c <= 2 * nc {
                    let quad = u2[c].project_to(&t3)?.scale(gamma);
                    g = g.sub(&quad)?;
                    g = g.add(&mu_u[c].project_to(&t3)?)?;
                }
                if c <= nc {
                    let lin = u[c].project_to(&t3)?;
                    let lu: Vec<CInterval> = lin.coeffs().iter().zip(&lam0).map(|(&x, &l)| x * l).collect();
                    g = g.add(&ISeq::new(t3.clone(), p.d, lu)?)?;
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let two_gamma = CInterval::real(Interval::point(2.0)) * gamma;
        let three = CInterval::real(Interval::point(3.0));
        let v = (0..=2 * nc)
            .map(|c| {
                let mut g = u2[c].scale(three);
                if c <= nc {
                    g = g.sub(&u[c].project_to(&t2)?.scale(two_gamma))?;
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Self { mu, u, ud, f, v })
    }
}

/// Coefficients of the bordered block `DF^N(s)`, order `2N_c`.
fn df_series(branch: &ChebBranch, s: &Series) -> Result<Vec<Mat<CInterval>>, Error> {
    let p = &branch.params;
    let nc = branch.nc();
    let table = branch.u[0].table().clone();
    let n = table.len();
    let lam0: Vec<CInterval> = symbols(&table, p.d, Interval::ZERO);
    (0..=2 * nc)
        .into_par_iter()
        .map(|c| {
            let conv = conv_operator(&s.v[c], &table, &table)?;
            let mut m = Mat::<CInterval>::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    m[(i + 1, j + 1)] = conv.mat[(i, j)];
                }
            }
            if c <= nc {
                for i in 0..n {
                    m[(0, i + 1)] = s.ud[c].coeffs()[table.conj_position(i)];
                    m[(i + 1, 0)] = s.u[c].coeffs()[i];
                    let diag = CInterval::real(s.mu[c]) + if c == 0 { lam0[i] } else { CInterval::ZERO };
                    m[(i + 1, i + 1)] = m[(i + 1, i + 1)] + diag;
                }
            }
            Ok(m)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformBounds {
    pub bounds: Bounds,
    /// `con‖B^N‖` in the operator norm of `X`.
    pub b_norm: Interval,
    pub l_nk: Interval,
    pub mu_range: Interval,
}

pub fn uniform_bounds(branch: &ChebBranch, b: &BMatrix, mode: LnkMode) -> Result<UniformBounds, Error> {
    let p = &branch.params;
    let nc = branch.nc();
    if b.len() != nc + 1 {
        return Err(Error::Dimension(format!("B has {} coefficients for order {nc}", b.len())));
    }
    let table = branch.u[0].table().clone();
    let n = table.len();
    if b[0].rows() != n + 1 || b[0].cols() != n + 1 {
        return Err(Error::Dimension("B does not match the branch table".into()));
    }
    let l_nk = tail_bound_lnk(branch, mode)?;
    let fac = Interval::point((2 * nc + 1) as f64) * l_nk.recip()?;
    let s = Series::new(branch)?;
    let bi: Vec<Mat<CInterval>> = b.iter().map(|m| m.map(CInterval::point)).collect();
    let wx = x_weights(&table, p.nu);

    // Y₀
    let g: Vec<Vec<CInterval>> = s
        .f
        .iter()
        .map(|f| std::iter::once(CInterval::ZERO).chain(f.coeffs()[..n].iter().copied()).collect())
        .collect();
    let bg = cheb::product_with(
        nc,
        3 * nc,
        |a, c| bi[a].matvec(&g[c]).expect("dimensions"),
        |x, y| x.iter().zip(y).map(|(&a, &b)| a + b).collect(),
    );
    let y0_head = con_norm(bg.iter().map(|v| x_norm(v, &wx)));
    let y0_tail = con_norm(s.f.iter().map(|f| tail_norm(f, n, p.nu)));
    let y0 = y0_head + fac * y0_tail;

    // Z₀
    let dfs = df_series(branch, &s)?;
    let prods = cheb::product_with(
        nc,
        2 * nc,
        |a, c| bi[a].matmul(&dfs[c]).expect("dimensions"),
        |x, y| x.add(y).expect("dimensions"),
    );
    let id = Mat::<CInterval>::identity(n + 1);
    let z0 = con_norm(prods.par_iter().enumerate().map(|(c, m)| {
        let e = if c == 0 { id.sub(m).expect("dimensions") } else { m.map(|z| -z) };
        op_norm_weighted(&e, &wx, &wx)
    }).collect::<Vec<_>>());

    // Z₁
    let phi_num = (1..s.v[0].len())
        .map(|k| con_norm(s.v.iter().map(|v| v.coeffs()[k].abs())))
        .fold(Interval::ZERO, Interval::max);
    let phi = phi_num.try_div(Interval::point(p.nu).powi(p.n + 1))?;
    let b_abs = Interval::sum((0..=n).map(|i| {
        let row = Interval::sum((1..=n).map(|j| Interval::sum(bi.iter().enumerate().map(|(c, m)| con_factor(c) * m[(i, j)].abs()))));
        wx[i] * row
    }));
    let z1 = b_abs * phi + fac * con_norm(s.v.iter().map(|v| v.norm(p.nu)));

    // Z₂
    let b_norm = Interval::sum(bi.iter().enumerate().map(|(c, m)| con_factor(c) * op_norm_weighted(m, &wx, &wx)));
    let two_gamma = CInterval::real(Interval::point(2.0) * p.gamma_i());
    let q_norm = con_norm(s.u.iter().enumerate().map(|(c, u)| {
        let mut q = u.scale(CInterval::real(Interval::point(6.0)));
        if c == 0 {
            q.coeffs_mut()[0] = q.coeffs()[0] - two_gamma;
        }
        q.norm(p.nu)
    }));
    let k = b_norm + fac;
    let bounds = Bounds {
        y0,
        z0,
        z1,
        z2_base: k * (Interval::ONE + q_norm),
        z2_slope: Interval::point(3.0) * k,
    };
    if ![y0, z0, z1, bounds.z2_base, bounds.z2_slope].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("branch bounds"));
    }
    Ok(UniformBounds {
        bounds,
        b_norm,
        l_nk,
        mu_range: mu_range(branch),
    })
}

fn eval_iseq(c: &[ISeq], t: &[Interval]) -> ISeq {
    let mut acc = c[0].clone();
    for (n, cn) in c.iter().enumerate().skip(1) {
        acc = add_seq(&acc, &cn.scale(CInterval::real(Interval::point(2.0) * t[n])));
    }
    acc
}

/// The single-point bounds at `w̄(s)` with `B(s)` evaluated, for comparing
/// against the uniform ones. `L_N` is taken at the enclosure of `μ(s)`.
pub fn pointwise_bounds(branch: &ChebBranch, b: &BMatrix, s: f64) -> Result<Bounds, Error> {
    let p = &branch.params;
    let nc = branch.nc();
    let table = branch.u[0].table().clone();
    let n = table.len();
    let t = cheb::cheb_t_interval(Interval::point(s), nc);
    let two = Interval::point(2.0);
    let mu = Interval::point(branch.mu[0]) + two * Interval::sum((1..=nc).map(|c| Interval::point(branch.mu[c]) * t[c]));
    let ui: Vec<ISeq> = branch.u.iter().map(|x| x.to_interval()).collect();
    let udi: Vec<ISeq> = branch.u_dot.iter().map(|x| x.to_interval()).collect();
    let u = eval_iseq(&ui, &t);
    let ud = eval_iseq(&udi, &t);
    let mut bs = b[0].map(CInterval::point);
    for (c, m) in b.iter().enumerate().skip(1) {
        let w = CInterval::real(two * t[c]);
        bs = bs.add(&m.map(|z| CInterval::point(z) * w))?;
    }
    let gamma = CInterval::real(p.gamma_i());
    let linv = tail_bound_ln(p.n, p.d, mu)?.recip()?;
    let wx = x_weights(&table, p.nu);

    let t3 = OrbitTable::build(table.group(), 3 * p.n);
    let f = apply_f_with(&u, &symbols(&t3, p.d, mu), gamma, &t3)?;
    let g: Vec<CInterval> = std::iter::once(CInterval::ZERO).chain(f.coeffs()[..n].iter().copied()).collect();
    let y0 = x_norm(&bs.matvec(&g)?, &wx) + linv * tail_norm(&f, n, p.nu);

    let df = apply_df_with(&u, &symbols(&table, p.d, mu), gamma)?;
    let mut m = Mat::<CInterval>::zeros(n + 1, n + 1);
    for i in 0..n {
        m[(0, i + 1)] = ud.coeffs()[table.conj_position(i)];
        m[(i + 1, 0)] = u.coeffs()[i];
        for j in 0..n {
            m[(i + 1, j + 1)] = df.mat[(i, j)];
        }
    }
    let e = Mat::<CInterval>::identity(n + 1).sub(&bs.matmul(&m)?)?;
    let z0 = op_norm_weighted(&e, &wx, &wx);

    let v = dg_multiplier(&u, gamma)?;
    let phi = v.sup_norm_without_origin().try_div(Interval::point(p.nu).powi(p.n + 1))?;
    let b_abs = Interval::sum((0..=n).map(|i| wx[i] * Interval::sum((1..=n).map(|j| bs[(i, j)].abs()))));
    let z1 = b_abs * phi + linv * v.norm(p.nu);

    let mut q = u.scale(CInterval::real(Interval::point(6.0)));
    q.coeffs_mut()[0] = q.coeffs()[0] - CInterval::real(two * p.gamma_i());
    let k = op_norm_weighted(&bs, &wx, &wx) + linv;
    Ok(Bounds {
        y0,
        z0,
        z1,
        z2_base: k * (Interval::ONE + q.norm(p.nu)),
        z2_slope: Interval::point(3.0) * k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchCertificate {
    pub params: crate::shmodel::ModelParams,
    #[serde(with = "hex_f64")]
    pub s_fix: f64,
    pub nc: usize,
    pub lnk_mode: LnkMode,
    pub l_nk: Interval,
    pub mu_range: Interval,
    pub bounds: Bounds,
    pub b_norm: Interval,
    #[serde(with = "hex_f64")]
    pub r0: f64,
    #[serde(with = "hex_f64")]
    pub margin1: f64,
    #[serde(with = "hex_f64")]
    pub margin2: f64,
    pub success: bool,
    /// Phase pairing used in the first component of `F`.
    pub phase_pairing: String,
    pub digest: String,
    pub diagnostics: Option<String>,
}

pub const PHASE_PAIRING: &str = "sum over representatives of Re(a_n conj(b_n))";

impl BranchCertificate {
    pub fn recheck(&self) -> RadiiCheck {
        check_radii(&self.bounds, self.r0)
    }

    pub fn is_consistent(&self) -> bool {
        let c = self.recheck();
        c.success == self.success
            && c.margin1().to_bits() == self.margin1.to_bits()
            && c.margin2().to_bits() == self.margin2.to_bits()
    }
}

/// Builds `B`, the uniform bounds and checks the radii condition. A failed
/// check yields `success = false`, not an error.
pub fn prove_branch(branch: &ChebBranch, mode: LnkMode, radius: Radius, digest: &str) -> Result<BranchCertificate, Error> {
    branch.params.validate()?;
    let b = build_b(branch)?;
    let ub = uniform_bounds(branch, &b, mode)?;
    let bounds = ub.bounds;
    let (r0, check) = match radius {
        Radius::Fixed(r) => (r, check_radii(&bounds, r)),
        Radius::Scan => best_radius(&bounds, bounds.y0.hi().max(1e-300), SCAN_MAX, SCAN_POINTS)
            .unwrap_or_else(|| (SCAN_MAX, check_radii(&bounds, SCAN_MAX))),
    };
    let diagnostics = check.violation().map(|v| {
        format!(
            "{v}; Y0 = {:e}, Z0 = {:e}, Z1 = {:e}, |B| = {:e}",
            bounds.y0.hi(),
            bounds.z0.hi(),
            bounds.z1.hi(),
            ub.b_norm.hi()
        )
    });
    Ok(BranchCertificate {
        params: branch.params,
        s_fix: branch.s_fix,
        nc: branch.nc(),
        lnk_mode: mode,
        l_nk: ub.l_nk,
        mu_range: ub.mu_range,
        bounds,
        b_norm: ub.b_norm,
        r0,
        margin1: check.margin1(),
        margin2: check.margin2(),
        success: check.success,
        phase_pairing: PHASE_PAIRING.to_string(),
        digest: digest.to_string(),
        diagnostics,
    })
}
