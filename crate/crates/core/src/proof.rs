//! Interval bounds `Y₀, Z₀, Z₁, Z₂` for the Newton–Kantorovich argument
//! around a numerical zero, the radii-polynomial check, and certificates.
//!
//! With `A^N ≈ (π^N Df(ū) π^N)⁻¹` and the exact diagonal tail `1/λ_n`:
//!
//! - `Y₀ = ‖A^N π^N f(ū)‖ + L_N⁻¹ ‖(π^{3N} − π^N) f(ū)‖`
//! - `Z₀ = ‖I − A^N π^N Df(ū) π^N‖`
//! - `Z₁ = Σ_n w_n Σ_m |A^N_{nm}| φ + L_N⁻¹ ‖v̄‖`, `φ = ‖V̄‖_∞ / ν^{N+1}`
//! - `Z₂(r) = (‖A^N‖ + L_N⁻¹)(‖−2γδ + 6ū‖ + 3r)`
//!
//! where `v̄ = −2γū + 3ū²` and `V̄` is `v̄` without its constant term.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rigor::{hex_f64, CInterval, Interval, Mat};
use crate::seqspace::{op_norm_weighted, weights, ISeq, Seq};
use crate::shmodel::{apply_df, apply_f, build_approx_inverse, dg_multiplier, tail_bound_ln, ApproxInverse, ModelParams};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub y0: Interval,
    pub z0: Interval,
    pub z1: Interval,
    pub z2_base: Interval,
    pub z2_slope: Interval,
}

impl Bounds {
    pub fn z2_at(&self, r: f64) -> Interval {
        self.z2_base + self.z2_slope * Interval::point(r)
    }

    fn is_finite(&self) -> bool {
        [self.y0, self.z0, self.z1, self.z2_base, self.z2_slope]
            .iter()
            .all(|b| b.is_finite())
    }
}

/// The two radii polynomials at one radius, evaluated from upper endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiCheck {
    /// `½Z₂(r)r² − (1 − Z₀ − Z₁)r + Y₀`, must be negative.
    pub p1: Interval,
    /// `Z₀ + Z₁ + Z₂(r)r`, must be below one.
    pub p2: Interval,
    pub success: bool,
}

impl RadiiCheck {
    pub fn margin1(&self) -> f64 {
        self.p1.hi()
    }

    pub fn margin2(&self) -> f64 {
        self.p2.hi()
    }

    /// Which inequality fails, for diagnostics.
    pub fn violation(&self) -> Option<&'static str> {
        if !(self.p1.hi() < 0.0) {
            Some("first radii inequality (Y0 too large for this radius)")
        } else if !(self.p2.hi() < 1.0) {
            Some("second radii inequality (Z0 + Z1 + Z2 r >= 1)")
        } else {
            None
        }
    }
}

fn upper(x: Interval) -> Interval {
    Interval::point(x.hi())
}

/// Evaluates both inequalities with every bound replaced by its upper endpoint.
pub fn check_radii(b: &Bounds, r0: f64) -> RadiiCheck {
    let bad = RadiiCheck {
        p1: Interval::ENTIRE,
        p2: Interval::ENTIRE,
        success: false,
    };
    if !(r0 > 0.0 && r0.is_finite()) || !b.is_finite() {
        return bad;
    }
    let r = Interval::point(r0);
    let z2 = upper(b.z2_base) + upper(b.z2_slope) * r;
    let z01 = upper(b.z0) + upper(b.z1);
    let p1 = Interval::point(0.5) * z2 * r.sqr() - (Interval::ONE - z01) * r + upper(b.y0);
    let p2 = z01 + z2 * r;
    RadiiCheck {
        p1,
        p2,
        success: p1.hi() < 0.0 && p2.hi() < 1.0,
    }
}

/// Log-spaced radii from `lo` to `hi` inclusive.
pub fn radius_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 || !(lo > 0.0) || !(hi > lo) {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// First radius of the grid for which the check succeeds.
pub fn scan_radius(b: &Bounds, lo: f64, hi: f64, points: usize) -> Option<(f64, RadiiCheck)> {
    radius_grid(lo, hi, points)
        .into_iter()
        .map(|r| (r, check_radii(b, r)))
        .find(|(_, c)| c.success)
}

/// Radius of the grid with the largest relative margin `−p₁(r)/r` of the
/// first inequality, i.e. the strongest contraction of the fixed-point map
/// into the ball. Near `√(2Y₀/Z₂)`, well inside the feasible interval.
pub fn best_radius(b: &Bounds, lo: f64, hi: f64, points: usize) -> Option<(f64, RadiiCheck)> {
    radius_grid(lo, hi, points)
        .into_iter()
        .map(|r| (r, check_radii(b, r)))
        .filter(|(_, c)| c.success)
        .min_by(|(ra, a), (rb, b)| (a.margin1() / ra).total_cmp(&(b.margin1() / rb)))
}

pub const SCAN_POINTS: usize = 400;
pub const SCAN_MAX: f64 = 0.1;

/// Interval copy of the point matrix `A^N`.
fn an_interval(a: &ApproxInverse) -> Mat<CInterval> {
    a.an.mat.map(CInterval::point)
}

pub fn bound_y0(u: &ISeq, a: &ApproxInverse, p: &ModelParams) -> Result<Interval, Error> {
    let f = apply_f(u, p)?;
    let table = u.table();
    let fin = f.project_to(table)?;
    let af = an_interval(a).matvec(fin.coeffs())?;
    let w = weights(table, p.nu);
    let head = Interval::sum(af.iter().zip(&w).map(|(c, &w)| c.abs() * w));
    let mut tail = f.clone();
    for c in &mut tail.coeffs_mut()[..table.len()] {
        *c = CInterval::ZERO;
    }
    Ok(head + a.tail_inv_bound * tail.norm(p.nu))
}

pub fn bound_z0(u: &ISeq, a: &ApproxInverse, p: &ModelParams) -> Result<Interval, Error> {
    let df = apply_df(u, p)?;
    let prod = an_interval(a).matmul(&df.mat)?;
    let e = Mat::<CInterval>::identity(prod.rows()).sub(&prod)?;
    let w = weights(u.table(), p.nu);
    Ok(op_norm_weighted(&e, &w, &w))
}

pub fn bound_z1(u: &ISeq, a: &ApproxInverse, p: &ModelParams) -> Result<Interval, Error> {
    let v = dg_multiplier(u, CInterval::real(p.gamma_i()))?;
    let vinf = v.sup_norm_without_origin();
    let phi = vinf
        .try_div(Interval::point(p.nu).powi(u.truncation() + 1))
        .expect("nu >= 1");
    let w = weights(u.table(), p.nu);
    let an = &a.an.mat;
    let abs_rows = Interval::sum((0..an.rows()).map(|i| {
        let row = Interval::sum(an.row(i).iter().map(|&z| CInterval::point(z).abs()));
        w[i] * row
    }));
    Ok(abs_rows * phi + a.tail_inv_bound * v.norm(p.nu))
}

/// `(‖A^N‖, Z₂ base, Z₂ slope)`.
pub fn bound_z2(u: &ISeq, a: &ApproxInverse, p: &ModelParams) -> Result<(Interval, Interval, Interval), Error> {
    let w = weights(u.table(), p.nu);
    let an_norm = op_norm_weighted(&an_interval(a), &w, &w);
    let mut q = u.scale(CInterval::real(Interval::point(6.0)));
    q.coeffs_mut()[0] = q.coeffs()[0] - CInterval::real(Interval::point(2.0) * p.gamma_i());
    let k = an_norm + a.tail_inv_bound;
    Ok((an_norm, k * q.norm(p.nu), Interval::point(3.0) * k))
}

pub fn compute_bounds(u: &Seq, a: &ApproxInverse, p: &ModelParams) -> Result<(Bounds, Interval), Error> {
    let ui = u.to_interval();
    let ((y0, z0), (z1, z2)) = rayon::join(
        || rayon::join(|| bound_y0(&ui, a, p), || bound_z0(&ui, a, p)),
        || rayon::join(|| bound_z1(&ui, a, p), || bound_z2(&ui, a, p)),
    );
    let (an_norm, z2_base, z2_slope) = z2?;
    let b = Bounds {
        y0: y0?,
        z0: z0?,
        z1: z1?,
        z2_base,
        z2_slope,
    };
    if !b.is_finite() {
        return Err(Error::NonFinite("solution bounds"));
    }
    Ok((b, an_norm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub params: ModelParams,
    pub bounds: Bounds,
    pub an_norm: Interval,
    pub tail_inv_bound: Interval,
    #[serde(with = "hex_f64")]
    pub r0: f64,
    #[serde(with = "hex_f64")]
    pub margin1: f64,
    #[serde(with = "hex_f64")]
    pub margin2: f64,
    pub success: bool,
    pub digest: String,
    pub diagnostics: Option<String>,
}

impl Certificate {
    /// Re-evaluates the inequalities from the stored endpoints only.
    pub fn recheck(&self) -> RadiiCheck {
        check_radii(&self.bounds, self.r0)
    }

    /// True when the stored verdict and margins agree with a fresh check.
    pub fn is_consistent(&self) -> bool {
        let c = self.recheck();
        c.success == self.success
            && c.margin1().to_bits() == self.margin1.to_bits()
            && c.margin2().to_bits() == self.margin2.to_bits()
    }
}

/// Radius request for `prove_solution`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Fixed(f64),
    /// Log grid on `[Y₀, 0.1]`, keeping the radius of largest relative margin.
    Scan,
}

/// Runs the whole rigorous pipeline at `ū`. A failed radii check is not
/// an error; the certificate then carries `success = false`.
pub fn prove_solution(u: &Seq, p: &ModelParams, radius: Radius, digest: &str) -> Result<Certificate, Error> {
    p.validate()?;
    if u.truncation() != p.n || u.table().j() != p.j || u.d() != p.d {
        return Err(Error::Mismatch("solution does not match the parameters".into()));
    }
    let a = build_approx_inverse(u, p)?;
    let (bounds, an_norm) = compute_bounds(u, &a, p)?;
    let (r0, check) = match radius {
        Radius::Fixed(r) => (r, check_radii(&bounds, r)),
        Radius::Scan => {
            let lo = bounds.y0.hi().max(1e-300);
            best_radius(&bounds, lo, SCAN_MAX, SCAN_POINTS)
                .unwrap_or_else(|| (SCAN_MAX, check_radii(&bounds, SCAN_MAX)))
        }
    };
    let diagnostics = check.violation().map(|v| {
        let tail_dominates = a.tail_inv_bound.hi() > an_norm.hi();
        format!(
            "{v}; Y0 = {:e}, Z0 + Z1 = {:e}; {} term of the approximate inverse dominates",
            bounds.y0.hi(),
            (bounds.z0 + bounds.z1).hi(),
            if tail_dominates { "tail" } else { "finite" }
        )
    });
    Ok(Certificate {
        params: *p,
        bounds,
        an_norm,
        tail_inv_bound: a.tail_inv_bound,
        r0,
        margin1: check.margin1(),
        margin2: check.margin2(),
        success: check.success,
        digest: digest.to_string(),
        diagnostics,
    })
}

/// Published bound constants of a theorem, as decimal strings.
#[derive(Clone, Copy, Debug)]
pub struct Published {
    pub name: &'static str,
    pub y0: &'static str,
    pub z0: &'static str,
    pub z1: &'static str,
    pub z2: &'static str,
    pub r0: &'static str,
    pub mu: f64,
    pub gamma: f64,
    pub nu: f64,
    pub n: u32,
    pub d: f64,
    /// Published bound on `‖A^N‖` (or `‖B^N‖` for branches).
    pub a_norm: Option<&'static str>,
}

/// The eight single-solution theorems.
pub const SOLUTION_THEOREMS: [Published; 8] = [
    Published { name: "T1", y0: "9.64e-6", z0: "2.042e-9", z1: "0.175", z2: "25886.81", r0: "3e-5", mu: 0.01, gamma: 1.6, nu: 1.15, n: 70, d: 10.0, a_norm: Some("150.21") },
    Published { name: "T2", y0: "6.29e-6", z0: "1.465e-12", z1: "0.5788", z2: "923.91", r0: "2e-4", mu: 0.01, gamma: 1.6, nu: 1.38, n: 12, d: 5.0, a_norm: Some("44.06") },
    Published { name: "T3", y0: "3.645e-5", z0: "1.377e-12", z1: "0.765", z2: "447.7", r0: "2e-4", mu: -0.01, gamma: 1.7, nu: 1.34, n: 22, d: 5.0, a_norm: Some("13.616") },
    Published { name: "T4", y0: "1.74e-4", z0: "8.961e-13", z1: "0.6921", z2: "255.3", r0: "9e-4", mu: -0.2, gamma: 2.0, nu: 1.33, n: 10, d: 5.0, a_norm: Some("11.935") },
    Published { name: "H1", y0: "2.013e-4", z0: "6.485e-12", z1: "0.4509", z2: "632.8281", r0: "6e-3", mu: -0.01, gamma: 1.6, nu: 1.3, n: 30, d: 10.0, a_norm: Some("15.577") },
    Published { name: "H2", y0: "4.27e-6", z0: "1.248e-10", z1: "0.56031", z2: "8766.03", r0: "3e-5", mu: -0.1, gamma: 2.0, nu: 1.37, n: 26, d: 10.0, a_norm: Some("732.4") },
    Published { name: "H3", y0: "3.83e-5", z0: "6.9233e-12", z1: "0.2686", z2: "3404.11", r0: "7e-5", mu: 0.3, gamma: 2.1, nu: 1.4, n: 16, d: 5.0, a_norm: Some("588.773") },
    Published { name: "H4", y0: "4.543e-6", z0: "1.51e-10", z1: "0.8061", z2: "3773.54", r0: "4e-5", mu: 0.25, gamma: 2.0, nu: 1.09, n: 56, d: 15.0, a_norm: Some("44.624") },
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReplayMode {
    /// The published radius with the published `Z₂(r₀)`.
    AtRadius,
    /// A smaller radius; `Z₂(r₀)` still bounds `Z₂(r)` since `Z₂` increases in `r`.
    SmallerRadius,
    /// A larger radius with `Z₂(r) = Z₂(r₀) + 3(‖A‖ + 1/L_N)(r − r₀)`.
    ExtendedRadius,
}

#[derive(Clone, Copy, Debug)]
pub struct ReplayOutcome {
    pub mode: Option<ReplayMode>,
    pub r: f64,
    pub check: RadiiCheck,
}

impl ReplayOutcome {
    pub fn success(&self) -> bool {
        self.check.success
    }
}

/// Decimal constants of a replay, enclosed outward.
#[derive(Clone, Copy, Debug)]
pub struct ReplayInput {
    pub y0: Interval,
    pub z0: Interval,
    pub z1: Interval,
    pub z2_r0: Interval,
    pub r0: Interval,
    /// `3(‖A‖ + 1/L_N)` when known; enables the extended mode.
    pub z2_slope: Option<Interval>,
}

impl ReplayInput {
    pub fn from_published(c: &Published) -> Result<Self, Error> {
        let slope = match c.a_norm {
            Some(a) => {
                let a = Interval::from_decimal(a)?;
                let l = tail_bound_ln(c.n, c.d, Interval::point(c.mu))?;
                Some(Interval::point(3.0) * (a + l.recip()?))
            }
            None => None,
        };
        Ok(Self {
            y0: Interval::from_decimal(c.y0)?,
            z0: Interval::from_decimal(c.z0)?,
            z1: Interval::from_decimal(c.z1)?,
            z2_r0: Interval::from_decimal(c.z2)?,
            r0: Interval::from_decimal(c.r0)?,
            z2_slope: slope,
        })
    }

    /// Parses `Y0=…,Z0=…,Z1=…,Z2=…,r0=…[,A=…,N=…,d=…,mu=…]`.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let mut get = std::collections::HashMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            get.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let need = |k: &str| {
            get.get(k)
                .ok_or_else(|| Error::Parse(format!("missing {k} in replay constants")))
                .and_then(|v| Interval::from_decimal(v))
        };
        let num = |k: &str| -> Result<Option<f64>, Error> {
            get.get(k)
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("{k}: {e}"))))
                .transpose()
        };
        let slope = match (get.get("a"), num("n")?, num("d")?, num("mu")?) {
            (Some(a), Some(n), Some(d), Some(mu)) => {
                let l = tail_bound_ln(n as u32, d, Interval::point(mu))?;
                Some(Interval::point(3.0) * (Interval::from_decimal(a)? + l.recip()?))
            }
            _ => None,
        };
        Ok(Self {
            y0: need("y0")?,
            z0: need("z0")?,
            z1: need("z1")?,
            z2_r0: need("z2")?,
            r0: need("r0")?,
            z2_slope: slope,
        })
    }
}

/// Replays the radii condition on published constants. The published
/// radius is tried first; if it fails, smaller radii (valid because `Z₂`
/// is nondecreasing) and then, given `‖A‖`, larger radii are searched.
pub fn replay(c: &ReplayInput) -> ReplayOutcome {
    // largest binary64 not above the decimal radius, so that Z₂(r₀) bounds Z₂(r)
    let r0 = c.r0.lo();
    let fixed = Bounds {
        y0: c.y0,
        z0: c.z0,
        z1: c.z1,
        z2_base: c.z2_r0,
        z2_slope: Interval::ZERO,
    };
    let at = check_radii(&fixed, r0);
    if at.success {
        return ReplayOutcome { mode: Some(ReplayMode::AtRadius), r: r0, check: at };
    }
    if let Some((r, check)) = scan_radius(&fixed, c.y0.lo().max(1e-300).min(r0), r0, SCAN_POINTS) {
        return ReplayOutcome { mode: Some(ReplayMode::SmallerRadius), r, check };
    }
    if let Some(slope) = c.z2_slope {
        // Z₂(r) = (Z₂(r₀) − slope·r₀) + slope·r, with r₀ rounded up for the offset
        let offset = c.z2_r0 - slope * Interval::point(c.r0.hi());
        let ext = Bounds {
            z2_base: Interval::point(offset.hi()),
            z2_slope: slope,
            ..fixed
        };
        let grid = radius_grid(c.r0.hi(), SCAN_MAX, SCAN_POINTS);
        if let Some((r, check)) = grid
            .into_iter()
            .skip(1)
            .map(|r| (r, check_radii(&ext, r)))
            .find(|(_, ch)| ch.success)
        {
            return ReplayOutcome { mode: Some(ReplayMode::ExtendedRadius), r, check };
        }
    }
    ReplayOutcome { mode: None, r: r0, check: at }
}

/// Bound of `‖A(DG(u) − DG(ū))‖` sampled on one direction: returns the
/// float estimate of `‖A^N π^N (DG(ū+h) − DG(ū)) e‖ / ‖e‖` maximised over
/// the unit columns `e`, used by tests as a plausibility oracle for `Z₂`.
pub fn sampled_second_derivative(u: &Seq, h: &Seq, a: &ApproxInverse, p: &ModelParams) -> Result<f64, Error> {
    let uh = u.add(h)?;
    let d1 = apply_df(&uh, p)?;
    let d0 = apply_df(u, p)?;
    let diff = d1.mat.sub(&d0.mat)?;
    let prod = a.an.mat.matmul(&diff)?;
    let w = weights(u.table(), p.nu);
    Ok(op_norm_weighted::<Complex64>(&prod, &w, &w).mid())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(y0: f64, z0: f64, z1: f64, z2: f64) -> Bounds {
        Bounds {
            y0: Interval::point(y0),
            z0: Interval::point(z0),
            z1: Interval::point(z1),
            z2_base: Interval::point(z2),
            z2_slope: Interval::ZERO,
        }
    }

    #[test]
    fn first_triangular_constants() {
        let c = check_radii(&b(9.64e-6, 2.042e-9, 0.175, 25886.81), 3e-5);
        assert!(c.success);
        assert!((c.margin1() + 3.5e-6).abs() < 2e-7, "{}", c.margin1());
        assert!((c.margin2() - 0.951).abs() < 2e-3, "{}", c.margin2());
    }

    #[test]
    fn obvious_failures() {
        assert!(!check_radii(&b(1e-3, 0.0, 0.1, 1.0), 1e-4).success);
        assert!(!check_radii(&b(1e-9, 0.5, 0.5, 1.0), 1e-4).success);
        assert!(!check_radii(&b(1e-9, 0.0, 0.1, 1.0), 0.0).success);
    }

    #[test]
    fn improving_a_bound_keeps_success() {
        let base = b(1e-6, 1e-9, 0.4, 1000.0);
        assert!(check_radii(&base, 1e-5).success);
        for scale in [0.5, 0.1, 0.0] {
            let mut better = base;
            better.z1 = Interval::point(0.4 * scale);
            assert!(check_radii(&better, 1e-5).success);
            better.y0 = Interval::point(1e-6 * scale);
            assert!(check_radii(&better, 1e-5).success);
        }
    }

    #[test]
    fn replay_parse() {
        let r = ReplayInput::parse("Y0=9.64e-6,Z0=2.042e-9,Z1=0.175,Z2=25886.81,r0=3e-5").unwrap();
        let o = replay(&r);
        assert_eq!(o.mode, Some(ReplayMode::AtRadius));
        assert!(ReplayInput::parse("Y0=1").is_err());
    }
}
