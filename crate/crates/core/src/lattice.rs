//! Dihedral groups acting on hexagonal-lattice Fourier indices.
//!
//! Wave vectors are `ℒ ñ` with `ℒ = [[1, −½], [0, √3/2]]` and `ñ = (π/d) n`.
//! A physical point-group element `𝒜` acts on indices through the integer
//! matrix `ℒ⁻¹𝒜ℒ`; these are derived once in exact `ℚ(√3)` arithmetic.
//!
//! The index norm used throughout is the orbit shell
//! `|n| = max(|n₁|, |n₂|, |n₁ − n₂|)`, the largest box coordinate over the
//! orbit. It is a norm on ℤ², constant on orbits, and `|n| ≤ N` exactly when
//! the orbit of `n` fits in the box `[−N, N]²`.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::Error;

pub type Index = (i32, i32);

/// Integer 2×2 matrix acting on index pairs.
pub type IMat = [[i32; 2]; 2];

pub const IDENTITY: IMat = [[1, 0], [0, 1]];

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_apply(m: &IMat, n: Index) -> Index {
    (m[0][0] * n.0 + m[0][1] * n.1, m[1][0] * n.0 + m[1][1] * n.1)
}

fn det(m: &IMat) -> i32 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Orbit shell of an index; see the module docs.
pub fn shell(n: Index) -> u32 {
    let (a, b) = (n.0 as i64, n.1 as i64);
    a.abs().max(b.abs()).max((a - b).abs()) as u32
}

/// The D₃/D₆-invariant quadratic form `q(n) = n₁² − n₁n₂ + n₂²`, so that
/// `|ℒñ|² = (π/d)² q(n)`.
pub fn qform(n: Index) -> i64 {
    let (a, b) = (n.0 as i64, n.1 as i64);
    a * a - a * b + b * b
}

// ---- exact arithmetic in ℚ(√3) ---------------------------------------------

type Q = Ratio<i64>;

/// `a + b√3`
#[derive(Clone, Copy, Debug, PartialEq)]
struct Q3 {
    a: Q,
    b: Q,
}

impl Q3 {
    fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }
    fn int(a: i64) -> Self {
        Self::new(Q::from_integer(a), Q::from_integer(0))
    }
    fn add(self, o: Q3) -> Q3 {
        Q3::new(self.a + o.a, self.b + o.b)
    }
    fn mul(self, o: Q3) -> Q3 {
        Q3::new(
            self.a * o.a + Q::from_integer(3) * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )
    }
}

type M3 = [[Q3; 2]; 2];

fn m3_mul(x: &M3, y: &M3) -> M3 {
    let z = Q3::int(0);
    let mut c = [[z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = x[i][0].mul(y[0][j]).add(x[i][1].mul(y[1][j]));
        }
    }
    c
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn basis() -> (M3, M3) {
    let l = [
        [Q3::int(1), Q3::new(q(-1, 2), q(0, 1))],
        [Q3::int(0), Q3::new(q(0, 1), q(1, 2))],
    ];
    let linv = [
        [Q3::int(1), Q3::new(q(0, 1), q(1, 3))],
        [Q3::int(0), Q3::new(q(0, 1), q(2, 3))],
    ];
    (l, linv)
}

/// `ℒ⁻¹𝒜ℒ`, required to be an integer matrix.
fn to_lattice(phys: &M3) -> IMat {
    let (l, linv) = basis();
    let m = m3_mul(&m3_mul(&linv, phys), &l);
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let e = m[i][j];
            assert!(
                e.b == q(0, 1) && e.a.is_integer(),
                "lattice matrix entry {e:?} is not an integer"
            );
            out[i][j] = *e.a.numer() as i32;
        }
    }
    out
}

/// Rotation by π/3 in physical coordinates.
fn rot60() -> M3 {
    [
        [Q3::new(q(1, 2), q(0, 1)), Q3::new(q(0, 1), q(-1, 2))],
        [Q3::new(q(0, 1), q(1, 2)), Q3::new(q(1, 2), q(0, 1))],
    ]
}

/// Reflection x₂ ↦ −x₂.
fn reflect() -> M3 {
    [[Q3::int(1), Q3::int(0)], [Q3::int(0), Q3::int(-1)]]
}

// ---- groups ------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub j: u32,
    /// `r^k s^e` for `k < j`, `e ∈ {0,1}`, in that order.
    pub elements: Vec<IMat>,
    pub rotation: IMat,
    pub reflection: IMat,
}

pub fn build_group(j: u32) -> Result<GroupSpec, Error> {
    let r60 = rot60();
    let phys_rot = match j {
        6 => r60,
        3 => m3_mul(&r60, &r60),
        _ => return Err(Error::UnsupportedGroup(j)),
    };
    let r = to_lattice(&phys_rot);
    let s = to_lattice(&reflect());
    let mut elements = Vec::with_capacity(2 * j as usize);
    let mut rk = IDENTITY;
    for _ in 0..j {
        elements.push(rk);
        elements.push(mat_mul(&rk, &s));
        rk = mat_mul(&rk, &r);
    }
    let g = GroupSpec {
        j,
        elements,
        rotation: r,
        reflection: s,
    };
    g.verify()?;
    Ok(g)
}

impl GroupSpec {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn power(&self, m: &IMat, k: u32) -> IMat {
        (0..k).fold(IDENTITY, |acc, _| mat_mul(&acc, m))
    }

    /// Checks the dihedral presentation and that the elements form a group.
    pub fn verify(&self) -> Result<(), Error> {
        let fail = |what: &str| Err(Error::InvalidParameter(format!("D{}: {what}", self.j)));
        let (r, s) = (&self.rotation, &self.reflection);
        if self.power(r, self.j) != IDENTITY {
            return fail("r^j != e");
        }
        if mat_mul(s, s) != IDENTITY {
            return fail("s^2 != e");
        }
        let rinv = self.power(r, self.j - 1);
        if mat_mul(r, s) != mat_mul(s, &rinv) {
            return fail("rs != s r^-1");
        }
        if self.elements.len() != 2 * self.j as usize {
            return fail("wrong order");
        }
        for (i, a) in self.elements.iter().enumerate() {
            if det(a).abs() != 1 {
                return fail("element not unimodular");
            }
            if self.elements[..i].contains(a) {
                return fail("duplicate element");
            }
            for b in &self.elements {
                if !self.elements.contains(&mat_mul(a, b)) {
                    return fail("not closed under products");
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, g: usize, n: Index) -> Index {
        mat_apply(&self.elements[g], n)
    }

    /// All images of `n`, sorted and deduplicated.
    pub fn orbit(&self, n: Index) -> Vec<Index> {
        let mut o: Vec<Index> = self.elements.iter().map(|m| mat_apply(m, n)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Lexicographically greatest orbit member.
    pub fn representative(&self, n: Index) -> Index {
        self.elements
            .iter()
            .map(|m| mat_apply(m, n))
            .max()
            .expect("groups are non-empty")
    }

    pub fn is_representative(&self, n: Index) -> bool {
        self.representative(n) == n
    }

    /// Representative of the orbit of `−n` (realness pairing).
    pub fn conjugate_rep(&self, n: Index) -> Result<Index, Error> {
        if !self.is_representative(n) {
            return Err(Error::NotRepresentative(n));
        }
        Ok(self.representative((-n.0, -n.1)))
    }
}

pub fn orbit(g: &GroupSpec, n: Index) -> Vec<Index> {
    g.orbit(n)
}

pub fn representative(g: &GroupSpec, n: Index) -> Index {
    g.representative(n)
}

pub fn conjugate_rep(g: &GroupSpec, n: Index) -> Result<Index, Error> {
    g.conjugate_rep(n)
}

// ---- orbit tables ----------------------------------------------------------

/// Reduced index set `I^N`: one representative per orbit with shell ≤ N,
/// ordered by (shell, n₁, n₂) so that `I^N` is a prefix of `I^{N+1}`.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    group: GroupSpec,
    n: u32,
    reps: Vec<Index>,
    positions: HashMap<Index, usize>,
    orbits: Vec<Vec<Index>>,
    alpha: Vec<u32>,
    shells: Vec<u32>,
    conj: Vec<usize>,
    /// position of every box index, `u32::MAX` outside retained orbits
    grid: Vec<u32>,
}

pub fn build_orbit_table(g: &GroupSpec, n: u32) -> OrbitTable {
    let ni = n as i32;
    let mut reps: Vec<Index> = Vec::new();
    for a in -ni..=ni {
        for b in -ni..=ni {
            if shell((a, b)) <= n && g.is_representative((a, b)) {
                reps.push((a, b));
            }
        }
    }
    reps.sort_by_key(|&r| (shell(r), r.0, r.1));
    let positions: HashMap<Index, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let orbits: Vec<Vec<Index>> = reps.iter().map(|&r| g.orbit(r)).collect();
    let alpha = orbits.iter().map(|o| o.len() as u32).collect();
    let shells = reps.iter().map(|&r| shell(r)).collect();
    let conj = reps
        .iter()
        .map(|&r| positions[&g.representative((-r.0, -r.1))])
        .collect();
    let side = (2 * n + 1) as usize;
    let mut grid = vec![u32::MAX; side * side];
    for (p, o) in orbits.iter().enumerate() {
        for &k in o {
            grid[(k.0 + ni) as usize * side + (k.1 + ni) as usize] = p as u32;
        }
    }
    OrbitTable {
        group: g.clone(),
        n,
        reps,
        positions,
        orbits,
        alpha,
        shells,
        conj,
        grid,
    }
}

impl OrbitTable {
    pub fn build(g: &GroupSpec, n: u32) -> Arc<OrbitTable> {
        Arc::new(build_orbit_table(g, n))
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn j(&self) -> u32 {
        self.group.j
    }

    pub fn truncation(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[Index] {
        &self.reps
    }

    pub fn rep(&self, p: usize) -> Index {
        self.reps[p]
    }

    pub fn orbit(&self, p: usize) -> &[Index] {
        &self.orbits[p]
    }

    pub fn alpha(&self, p: usize) -> u32 {
        self.alpha[p]
    }

    pub fn shell(&self, p: usize) -> u32 {
        self.shells[p]
    }

    /// Position of the representative of `orbit(−rep(p))`.
    pub fn conj_position(&self, p: usize) -> usize {
        self.conj[p]
    }

    pub fn position(&self, rep: Index) -> Option<usize> {
        self.positions.get(&rep).copied()
    }

    /// Position of the orbit containing an arbitrary index, if retained.
    #[inline]
    pub fn position_of(&self, k: Index) -> Option<usize> {
        let ni = self.n as i32;
        if k.0 < -ni || k.0 > ni || k.1 < -ni || k.1 > ni {
            return None;
        }
        let side = (2 * self.n + 1) as usize;
        let p = self.grid[(k.0 + ni) as usize * side + (k.1 + ni) as usize];
        (p != u32::MAX).then_some(p as usize)
    }

    /// Number of reps with shell ≤ m (length of the `I^m` prefix).
    pub fn prefix_len(&self, m: u32) -> usize {
        self.shells.partition_point(|&s| s <= m)
    }

    pub fn same_group(&self, other: &OrbitTable) -> bool {
        self.group.j == other.group.j
    }
}
