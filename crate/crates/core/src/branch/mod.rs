//! Solution branches `s ↦ (μ(s), u(s))` as Chebyshev series on `[−1, 1]`,
//! built by pseudo-arclength continuation and proved all at once with
//! bounds that hold uniformly in `s`.
//!
//! The zero problem along the branch is
//! `F(w) = [(u − ū(s), u̇(s))₂ ; f(μ, u)]`, with `w = (μ, u)` in
//! `X = ℝ × ℓ¹_ν`, `‖(η, h)‖ = |η| + ‖h‖`.

pub mod bounds;
pub mod cheb;
pub mod continuation;

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::proof::ReplayInput;
use crate::rigor::Interval;
use crate::seqspace::Seq;
use crate::shmodel::ModelParams;
use crate::Error;

pub use bounds::{build_b, pointwise_bounds, prove_branch, tail_bound_lnk, uniform_bounds, BMatrix, BranchCertificate};
pub use continuation::{continue_branch, tangent_vector, ContinuationOptions, GridPoint};

/// Chebyshev coefficients `0..=N_c` of `μ`, `u` and the tangent.
/// `params.mu` holds `μ` at the start of the continuation.
#[derive(Clone, Debug)]
pub struct ChebBranch {
    pub params: ModelParams,
    pub s_fix: f64,
    pub mu: Vec<f64>,
    pub u: Vec<Seq>,
    pub mu_dot: Vec<f64>,
    pub u_dot: Vec<Seq>,
}

impl ChebBranch {
    pub fn new(params: ModelParams, s_fix: f64, mu: Vec<f64>, u: Vec<Seq>, mu_dot: Vec<f64>, u_dot: Vec<Seq>) -> Result<Self, Error> {
        let nc1 = mu.len();
        if nc1 == 0 || u.len() != nc1 || mu_dot.len() != nc1 || u_dot.len() != nc1 {
            return Err(Error::Dimension("Chebyshev blocks of unequal order".into()));
        }
        let table = u[0].table();
        for s in u.iter().chain(&u_dot) {
            if !std::sync::Arc::ptr_eq(s.table(), table) && s.table().reps() != table.reps() {
                return Err(Error::Mismatch("branch coefficients on different tables".into()));
            }
            if s.d() != params.d || s.truncation() != params.n || s.table().j() != params.j {
                return Err(Error::Mismatch("branch coefficients do not match the parameters".into()));
            }
        }
        Ok(Self {
            params,
            s_fix,
            mu,
            u,
            mu_dot,
            u_dot,
        })
    }

    /// Chebyshev order `N_c`.
    pub fn nc(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn len(&self) -> usize {
        self.u[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.u[0].is_empty()
    }

    pub fn mu_at(&self, s: f64) -> f64 {
        cheb::eval(&self.mu, s)
    }

    pub fn u_at(&self, s: f64) -> Seq {
        eval_seq(&self.u, s)
    }

    pub fn tangent_at(&self, s: f64) -> (f64, Seq) {
        (cheb::eval(&self.mu_dot, s), eval_seq(&self.u_dot, s))
    }

    /// Parameters with `μ = μ(s)`.
    pub fn params_at(&self, s: f64) -> ModelParams {
        ModelParams {
            mu: self.mu_at(s),
            ..self.params
        }
    }
}

/// `c₀ + 2Σ c_n T_n(s)` for a series of sequences.
pub fn eval_seq(c: &[Seq], s: f64) -> Seq {
    let t = cheb::cheb_t(s, c.len() - 1);
    let mut acc = c[0].clone();
    for (n, cn) in c.iter().enumerate().skip(1) {
        acc = acc.add(&cn.scale(Complex64::new(2.0 * t[n], 0.0))).expect("same table");
    }
    acc
}

/// How `L_{N,K}` bounds the tail symbol along the branch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LnkMode {
    /// Over the enclosed range of `μ(s)`, `s ∈ [−1, 1]`.
    #[default]
    Conservative,
    /// Over the Chebyshev coefficients `μ̄_k`, as the formula is printed.
    Literal,
}

impl FromStr for LnkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "conservative" => Ok(Self::Conservative),
            "literal" => Ok(Self::Literal),
            _ => Err(Error::Parse(format!("unknown L_NK mode {s:?}"))),
        }
    }
}

/// Published constants of a branch theorem.
#[derive(Clone, Copy, Debug)]
pub struct PublishedBranch {
    pub name: &'static str,
    pub j: u32,
    pub y0: &'static str,
    pub z0: &'static str,
    pub z1: &'static str,
    pub z2: &'static str,
    pub r0: &'static str,
    pub s_fix: f64,
    pub gamma: f64,
    pub nu: f64,
    pub n: u32,
    pub d: f64,
    pub nc: usize,
    pub b_norm: &'static str,
}

/// The five branch theorems.
pub const BRANCH_THEOREMS: [PublishedBranch; 5] = [
    PublishedBranch { name: "TB1", j: 3, y0: "7.163e-6", z0: "0.02671", z1: "0.4775", z2: "11174.51", r0: "2e-5", s_fix: 0.05, gamma: 1.6, nu: 1.1, n: 40, d: 5.0, nc: 3, b_norm: "113.916" },
    PublishedBranch { name: "TB2", j: 3, y0: "8.4e-7", z0: "8.063e-3", z1: "0.1695", z2: "257070.1", r0: "2e-6", s_fix: 0.5, gamma: 0.3, nu: 1.4, n: 24, d: 5.0, nc: 31, b_norm: "3241.65" },
    PublishedBranch { name: "HB1", j: 6, y0: "4.999e-5", z0: "1.005e-2", z1: "0.239", z2: "3957.78", r0: "1e-4", s_fix: 0.4, gamma: 1.6, nu: 1.1, n: 60, d: 10.0, nc: 7, b_norm: "45.28" },
    PublishedBranch { name: "HB2", j: 6, y0: "2.12e-5", z0: "0.03361", z1: "0.2195", z2: "8236.77", r0: "5e-5", s_fix: 0.18, gamma: 1.6, nu: 1.25, n: 20, d: 5.0, nc: 31, b_norm: "36.122" },
    PublishedBranch { name: "HB3", j: 6, y0: "8.204e-6", z0: "0.1857", z1: "0.4403", z2: "6065.53", r0: "3e-5", s_fix: 0.23, gamma: 1.6, nu: 1.25, n: 20, d: 5.0, nc: 15, b_norm: "44.04" },
];

impl PublishedBranch {
    /// Replay input without a slope: the branch `μ` range is not published,
    /// so only radii up to `r₀` are admissible.
    pub fn replay_input(&self) -> Result<ReplayInput, Error> {
        Ok(ReplayInput {
            y0: Interval::from_decimal(self.y0)?,
            z0: Interval::from_decimal(self.z0)?,
            z1: Interval::from_decimal(self.z1)?,
            z2_r0: Interval::from_decimal(self.z2)?,
            r0: Interval::from_decimal(self.r0)?,
            z2_slope: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{replay, ReplayMode};

    #[test]
    fn branch_theorems_replay_at_published_radius() {
        for t in &BRANCH_THEOREMS {
            let o = replay(&t.replay_input().unwrap());
            assert_eq!(o.mode, Some(ReplayMode::AtRadius), "{}", t.name);
        }
    }

    #[test]
    fn lnk_mode_parse() {
        assert_eq!("literal".parse::<LnkMode>().unwrap(), LnkMode::Literal);
        assert!("other".parse::<LnkMode>().is_err());
    }
}
