//! Periodicity domains in physical coordinates and numerical checks of the
//! triangle (D₃) and hexagon (D₆) tilings.
//!
//! The wave vector of index `k` is `(π/d)ℒk` with `ℒ = [[1, −½], [0, √3/2]]`,
//! so the lattice of periods is spanned by `ℒ^{−T}(2d, 0) = (2d, 2d/√3)` and
//! `ℒ^{−T}(0, 2d) = (0, 4d/√3)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seqspace::Seq;
use crate::Error;

const S3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Parallelogram0,
    Parallelogram2d,
    Delta1,
    Delta2,
    Hexagon0,
}

impl std::str::FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "parallelogram0" => Ok(Self::Parallelogram0),
            "parallelogram2d" => Ok(Self::Parallelogram2d),
            "delta1" => Ok(Self::Delta1),
            "delta2" => Ok(Self::Delta2),
            "hexagon0" => Ok(Self::Hexagon0),
            _ => Err(Error::Parse(format!("unknown domain {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub d: f64,
}

/// Slack for closed boundaries: boundary points computed in floating point
/// should not drop out through rounding of `√3`.
fn slack(d: f64) -> f64 {
    1e-12 * d
}

fn in_parallelogram(x: [f64; 2], half: f64, d: f64) -> bool {
    let e = slack(d);
    let off = 2.0 * half / S3;
    x[0].abs() <= half + e && x[1] >= x[0] / S3 - off - e && x[1] <= x[0] / S3 + off + e
}

fn rotate(x: [f64; 2], deg: f64) -> [f64; 2] {
    let (s, c) = deg.to_radians().sin_cos();
    [c * x[0] - s * x[1], s * x[0] + c * x[1]]
}

impl Domain {
    pub fn new(kind: DomainKind, d: f64) -> Result<Self, Error> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("d = {d}")));
        }
        Ok(Self { kind, d })
    }

    /// Closed membership test.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let d = self.d;
        let e = slack(d);
        match self.kind {
            DomainKind::Parallelogram0 => in_parallelogram(x, d, d),
            DomainKind::Parallelogram2d => in_parallelogram(x, 2.0 * d, d),
            DomainKind::Delta1 => {
                x[0].abs() <= 2.0 * d + e
                    && x[1] >= -x[0] / S3 - e
                    && x[1] <= x[0] / S3 + 4.0 * d / S3 + e
            }
            DomainKind::Delta2 => {
                x[0].abs() <= 2.0 * d + e
                    && x[1] >= x[0] / S3 - 4.0 * d / S3 - e
                    && x[1] <= -x[0] / S3 + e
            }
            DomainKind::Hexagon0 => (1..=3).any(|k| self.in_rhombus(k, x)),
        }
    }

    /// Membership in `▱_k`, `k = 1, 2, 3`: `▱₀ + (−d, d/√3)` rotated by
    /// `(k − 1)·120°`.
    pub fn in_rhombus(&self, k: u32, x: [f64; 2]) -> bool {
        let y = rotate(x, -120.0 * (k as f64 - 1.0));
        in_parallelogram([y[0] + self.d, y[1] - self.d / S3], self.d, self.d)
    }

    pub fn centroid(&self) -> Result<[f64; 2], Error> {
        let c1 = [2.0 * self.d / 3.0, 2.0 * self.d / S3];
        match self.kind {
            DomainKind::Delta1 => Ok(c1),
            DomainKind::Delta2 => Ok([-c1[0], -c1[1]]),
            DomainKind::Hexagon0 => Ok([0.0, 0.0]),
            k => Err(Error::InvalidParameter(format!("no centroid defined for {k:?}"))),
        }
    }

    /// `[x1_min, x1_max, x2_min, x2_max]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        let d = self.d;
        match self.kind {
            DomainKind::Parallelogram0 => [-d, d, -S3 * d, S3 * d],
            DomainKind::Parallelogram2d => [-2.0 * d, 2.0 * d, -2.0 * S3 * d, 2.0 * S3 * d],
            DomainKind::Delta1 => [-2.0 * d, 2.0 * d, -2.0 * d / S3, 2.0 * S3 * d],
            DomainKind::Delta2 => [-2.0 * d, 2.0 * d, -2.0 * S3 * d, 2.0 * d / S3],
            DomainKind::Hexagon0 => [-2.0 * d, 2.0 * d, -4.0 * d / S3, 4.0 * d / S3],
        }
    }

    /// Uniform sample of the domain by rejection from its bounding box.
    pub fn sample(&self, count: usize, rng: &mut impl Rng) -> Vec<[f64; 2]> {
        let b = self.bounding_box();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x = [rng.random_range(b[0]..=b[1]), rng.random_range(b[2]..=b[3])];
            if self.contains(x) {
                out.push(x);
            }
        }
        out
    }
}

/// The `2j` orthogonal matrices of the physical group, as row-major 2×2.
pub fn physical_group(j: u32) -> Result<Vec<[[f64; 2]; 2]>, Error> {
    let step = match j {
        3 => 120.0,
        6 => 60.0,
        _ => return Err(Error::UnsupportedGroup(j)),
    };
    let mut out = Vec::new();
    for k in 0..j {
        let (s, c) = (step * k as f64).to_radians().sin_cos();
        out.push([[c, -s], [s, c]]);
        // rotation composed with the reflection x₂ ↦ −x₂
        out.push([[c, s], [s, -c]]);
    }
    Ok(out)
}

fn apply(a: &[[f64; 2]; 2], x: [f64; 2]) -> [f64; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// Translations generating the hexagon tiling.
pub fn hexagon_translations(d: f64) -> [[f64; 2]; 3] {
    [[4.0 * d, 0.0], [2.0 * d, 2.0 * S3 * d], [-2.0 * d, 2.0 * S3 * d]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingReport {
    pub j: u32,
    pub samples: usize,
    pub checks: usize,
    /// Largest absolute violation over all checks.
    pub max_violation: f64,
    /// The coefficient mass `Σ_n α_n |u_n|` the tolerance is scaled by.
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks the tiling claims for an arbitrary evaluator of a function with
/// `D_j` symmetry: D₃ symmetry about the centroids of Δ₁ and Δ₂, or for
/// D₆ invariance about the origin, ⬡₀ periodicity and `u|Δ₁ = u|Δ₂`.
pub fn verify_tiling_with<F>(eval: F, j: u32, d: f64, scale: f64, samples: usize, tol: f64, seed: u64) -> Result<TilingReport, Error>
where
    F: Fn([f64; 2]) -> f64 + Sync,
{
    let group = physical_group(j)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks: Vec<([f64; 2], [f64; 2])> = Vec::new();
    match j {
        3 => {
            for kind in [DomainKind::Delta1, DomainKind::Delta2] {
                let dom = Domain::new(kind, d)?;
                let c = dom.centroid()?;
                for x in dom.sample(samples.div_ceil(2), &mut rng) {
                    for a in &group {
                        let y = apply(a, [x[0] - c[0], x[1] - c[1]]);
                        tasks.push((x, [y[0] + c[0], y[1] + c[1]]));
                    }
                }
            }
        }
        _ => {
            let hex = Domain::new(DomainKind::Hexagon0, d)?;
            for x in hex.sample(samples, &mut rng) {
                for a in &group {
                    tasks.push((x, apply(a, x)));
                }
                for t in hexagon_translations(d) {
                    tasks.push((x, [x[0] + t[0], x[1] + t[1]]));
                }
            }
            let d1 = Domain::new(DomainKind::Delta1, d)?;
            for x in d1.sample(samples, &mut rng) {
                tasks.push((x, [-x[0], -x[1]]));
            }
        }
    }
    let max_violation = tasks
        .par_iter()
        .map(|&(x, y)| (eval(x) - eval(y)).abs())
        .reduce(|| 0.0, f64::max);
    Ok(TilingReport {
        j,
        samples,
        checks: tasks.len(),
        max_violation,
        scale,
        tol,
        pass: max_violation <= tol * scale,
    })
}

/// `verify_tiling_with` for a symmetric sequence, tolerance relative to
/// its coefficient mass.
pub fn verify_tiling(u: &Seq, samples: usize, tol: f64, seed: u64) -> Result<TilingReport, Error> {
    let scale = u.norm_f64(1.0);
    verify_tiling_with(|x| u.evaluate(x), u.table().j(), u.d(), scale, samples, tol, seed)
}

/// Values on a regular `resolution × resolution` grid over the bounding box,
/// rows for contained points only, ordered by `x₂` then `x₁`.
pub fn sample_grid(u: &Seq, dom: &Domain, resolution: usize) -> Result<Vec<[f64; 3]>, Error> {
    sample_grid_with(|x| u.evaluate(x), dom, resolution)
}

pub fn sample_grid_with<F>(eval: F, dom: &Domain, resolution: usize) -> Result<Vec<[f64; 3]>, Error>
where
    F: Fn([f64; 2]) -> f64 + Sync,
{
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    let b = dom.bounding_box();
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let rows: Vec<Vec<[f64; 3]>> = (0..resolution)
        .into_par_iter()
        .map(|i2| {
            let x2 = at(b[2], b[3], i2);
            (0..resolution)
                .filter_map(|i1| {
                    let x = [at(b[0], b[1], i1), x2];
                    dom.contains(x).then(|| [x[0], x[1], eval(x)])
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv(rows: &[[f64; 3]], mut out: impl Write) -> Result<(), Error> {
    writeln!(out, "x1,x2,u")?;
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", r[0], r[1], r[2])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let d = 3.0;
        let p0 = Domain::new(DomainKind::Parallelogram0, d).unwrap();
        assert!(p0.contains([0.0, 0.0]));
        let d1 = Domain::new(DomainKind::Delta1, d).unwrap();
        assert!(d1.contains(d1.centroid().unwrap()));
        assert!(!d1.contains([2.0 * d + 1e-6, 0.0]));
        let c = d1.centroid().unwrap();
        assert!((c[0] - 2.0).abs() < 1e-15 && (c[1] - 2.0 * S3).abs() < 1e-14);
        let d2 = Domain::new(DomainKind::Delta2, d).unwrap();
        assert_eq!(d2.centroid().unwrap(), [-c[0], -c[1]]);
        let h = Domain::new(DomainKind::Hexagon0, d).unwrap();
        assert_eq!(h.centroid().unwrap(), [0.0, 0.0]);
        assert!(p0.centroid().is_err());
    }

    #[test]
    fn hexagon_is_regular() {
        let d = 2.0;
        let h = Domain::new(DomainKind::Hexagon0, d).unwrap();
        let r = 4.0 * d / S3;
        for k in 0..6 {
            let v = rotate([0.0, r], 60.0 * k as f64);
            assert!(h.contains([0.999 * v[0], 0.999 * v[1]]));
            assert!(!h.contains([1.001 * v[0], 1.001 * v[1]]));
        }
        assert!(h.contains([0.0, 0.0]));
    }

    #[test]
    fn group_matrices_are_orthogonal_and_distinct() {
        for j in [3, 6] {
            let g = physical_group(j).unwrap();
            assert_eq!(g.len(), 2 * j as usize);
            for a in &g {
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                assert!((det.abs() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn resolution_two_grid() {
        let p0 = Domain::new(DomainKind::Parallelogram0, 1.0).unwrap();
        let rows = sample_grid_with(|_| 1.0, &p0, 2).unwrap();
        assert!(rows.len() <= 4 && !rows.is_empty());
        assert!(rows.iter().all(|r| r[2] == 1.0));
        assert!(sample_grid_with(|_| 1.0, &p0, 1).is_err());
    }
}
