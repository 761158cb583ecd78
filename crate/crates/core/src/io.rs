//! JSON files with hex-float numerics: solutions, branches, certificates.

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::branch::ChebBranch;
use crate::lattice::{Index, OrbitTable};
use crate::rigor::hexfloat::{from_hex, to_hex};
use crate::rigor::hex_f64;
use crate::seqspace::Seq;
use crate::shmodel::ModelParams;
use crate::Error;

pub const FORMAT_VERSION: u32 = 1;

/// A complex number as two hex literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexComplex(pub String, pub String);

impl From<Complex64> for HexComplex {
    fn from(z: Complex64) -> Self {
        Self(to_hex(z.re), to_hex(z.im))
    }
}

impl TryFrom<&HexComplex> for Complex64 {
    type Error = Error;

    fn try_from(h: &HexComplex) -> Result<Self, Error> {
        Ok(Complex64::new(from_hex(&h.0)?, from_hex(&h.1)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub version: u32,
    pub params: ModelParams,
    pub reps: Vec<Index>,
    pub coeffs: Vec<HexComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_hex")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

mod opt_hex {
    use super::hex_f64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => hex_f64::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "hex_f64")] f64);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl SolutionFile {
    pub fn from_solution(u: &Seq, params: &ModelParams, residual: Option<f64>, seed: Option<u64>) -> Self {
        Self {
            version: FORMAT_VERSION,
            params: *params,
            reps: u.table().reps().to_vec(),
            coeffs: u.coeffs().iter().map(|&z| z.into()).collect(),
            residual,
            seed,
        }
    }

    /// Validates the header against a freshly built table and decodes.
    pub fn to_solution(&self) -> Result<(Seq, ModelParams), Error> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", self.version)));
        }
        self.params.validate()?;
        let table = self.params.table()?;
        if table.reps() != self.reps.as_slice() {
            return Err(Error::Format(format!(
                "representative list does not match the D{} table for N = {}",
                self.params.j, self.params.n
            )));
        }
        check_len(&table, self.coeffs.len())?;
        let coeffs = self.coeffs.iter().map(Complex64::try_from).collect::<Result<Vec<_>, _>>()?;
        Ok((Seq::new(table, self.params.d, coeffs)?, self.params))
    }
}

/// One Chebyshev order: `μ_n` then the coefficients of `u_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebBlock {
    #[serde(with = "hex_f64")]
    pub mu: f64,
    pub u: Vec<HexComplex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchFile {
    pub version: u32,
    /// `mu` is the parameter at the start of the continuation.
    pub params: ModelParams,
    #[serde(with = "hex_f64")]
    pub s_fix: f64,
    pub nc: usize,
    pub reps: Vec<Index>,
    pub blocks: Vec<ChebBlock>,
    pub tangent: Vec<ChebBlock>,
}

fn to_blocks(mu: &[f64], u: &[Seq]) -> Vec<ChebBlock> {
    mu.iter()
        .zip(u)
        .map(|(&m, s)| ChebBlock {
            mu: m,
            u: s.coeffs().iter().map(|&z| z.into()).collect(),
        })
        .collect()
}

fn from_blocks(blocks: &[ChebBlock], table: &std::sync::Arc<OrbitTable>, d: f64) -> Result<(Vec<f64>, Vec<Seq>), Error> {
    let mut mu = Vec::with_capacity(blocks.len());
    let mut u = Vec::with_capacity(blocks.len());
    for b in blocks {
        check_len(table, b.u.len())?;
        mu.push(b.mu);
        let c = b.u.iter().map(Complex64::try_from).collect::<Result<Vec<_>, _>>()?;
        u.push(Seq::new(table.clone(), d, c)?);
    }
    Ok((mu, u))
}

impl BranchFile {
    pub fn from_branch(b: &ChebBranch) -> Self {
        Self {
            version: FORMAT_VERSION,
            params: b.params,
            s_fix: b.s_fix,
            nc: b.nc(),
            reps: b.u[0].table().reps().to_vec(),
            blocks: to_blocks(&b.mu, &b.u),
            tangent: to_blocks(&b.mu_dot, &b.u_dot),
        }
    }

    pub fn to_branch(&self) -> Result<ChebBranch, Error> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", self.version)));
        }
        self.params.validate()?;
        let table = self.params.table()?;
        if table.reps() != self.reps.as_slice() {
            return Err(Error::Format("representative list does not match the table".into()));
        }
        if self.blocks.len() != self.nc + 1 || self.tangent.len() != self.nc + 1 {
            return Err(Error::Format(format!("expected {} Chebyshev blocks", self.nc + 1)));
        }
        let (mu, u) = from_blocks(&self.blocks, &table, self.params.d)?;
        let (mu_dot, u_dot) = from_blocks(&self.tangent, &table, self.params.d)?;
        ChebBranch::new(self.params, self.s_fix, mu, u, mu_dot, u_dot)
    }
}

fn check_len(table: &OrbitTable, n: usize) -> Result<(), Error> {
    if table.len() != n {
        return Err(Error::Format(format!("{n} coefficients for {} representatives", table.len())));
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), Error> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Digest of the canonical serialization of a value.
pub fn digest_of<T: Serialize>(value: &T) -> Result<String, Error> {
    Ok(sha256_hex(to_json(value)?.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Seq, ModelParams) {
        let p = ModelParams {
            j: 3,
            n: 3,
            d: 5.0,
            nu: 1.38,
            mu: 0.01,
            gamma: 1.6,
        };
        let mut u = Seq::zeros(p.table().unwrap(), p.d);
        for (i, c) in u.coeffs_mut().iter_mut().enumerate() {
            *c = Complex64::new(0.1 / (i as f64 + 1.0), -1e-3 * i as f64);
        }
        (u, p)
    }

    #[test]
    fn solution_round_trip_is_bit_exact() {
        let (u, p) = sample();
        let f = SolutionFile::from_solution(&u, &p, Some(1.5e-13), Some(7));
        let text = to_json(&f).unwrap();
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let (v, q) = back.to_solution().unwrap();
        assert_eq!(q, p);
        assert_eq!(v.coeffs(), u.coeffs());
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let (u, p) = sample();
        let mut f = SolutionFile::from_solution(&u, &p, None, None);
        f.reps.swap(1, 2);
        assert!(f.to_solution().is_err());
        let mut g = SolutionFile::from_solution(&u, &p, None, None);
        g.coeffs.pop();
        g.reps.pop();
        assert!(g.to_solution().is_err());
    }

    #[test]
    fn branch_round_trip() {
        let (u, p) = sample();
        let v = u.scale(Complex64::new(0.5, 0.0));
        let b = ChebBranch::new(p, 0.02, vec![0.01, 1e-3], vec![u.clone(), v.clone()], vec![1.0, 0.0], vec![v, u]).unwrap();
        let f = BranchFile::from_branch(&b);
        let back: BranchFile = serde_json::from_str(&to_json(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let c = back.to_branch().unwrap();
        assert_eq!(c.mu, b.mu);
        assert_eq!(c.u[1].coeffs(), b.u[1].coeffs());
        let mut bad = f.clone();
        bad.nc = 3;
        assert!(bad.to_branch().is_err());
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
