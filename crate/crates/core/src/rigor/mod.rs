//! Interval arithmetic: scalars, complex rectangles, dense matrices and
//! bit-exact hex serialization of endpoints.

mod complex;
pub mod hexfloat;
mod interval;
mod matrix;

pub use complex::CInterval;
pub use interval::{iabs, iadd, idiv, imax, imin, imul, ipow, isqrt, isub, Interval};
pub use matrix::{imatmul, imatvec, CIntervalMatrix, IntervalMatrix, IntervalVector, Mat, Ring};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [hexfloat::to_hex(self.lo()), hexfloat::to_hex(self.hi())].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = hexfloat::from_hex(&lo).map_err(D::Error::custom)?;
        let hi = hexfloat::from_hex(&hi).map_err(D::Error::custom)?;
        Interval::try_new(lo, hi).map_err(D::Error::custom)
    }
}

/// Serde adapter storing a single `f64` as a hex literal.
pub mod hex_f64 {
    use super::hexfloat;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hexfloat::to_hex(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        hexfloat::from_hex(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter storing a `Vec<f64>` as hex literals.
pub mod hex_vec {
    use super::hexfloat;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        xs.iter()
            .map(|&x| hexfloat::to_hex(x))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| hexfloat::from_hex(s).map_err(D::Error::custom))
            .collect()
    }
}
