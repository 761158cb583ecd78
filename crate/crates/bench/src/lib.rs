//! Fixtures shared by the benchmarks.

use shhex_core::lattice::build_group;
use shhex_core::seqspace::Seq;
use shhex_core::{Complex64, ModelParams, OrbitTable};

/// Deterministic symmetric sequence with geometrically decaying coefficients.
pub fn decaying(j: u32, n: u32, d: f64) -> Seq {
    let table = OrbitTable::build(&build_group(j).expect("j is 3 or 6"), n);
    let mut u = Seq::zeros(table, d);
    for (p, c) in u.coeffs_mut().iter_mut().enumerate() {
        let r = 0.7f64.powi(p as i32 / 4);
        *c = Complex64::new(r * ((p as f64) * 0.37).cos(), r * ((p as f64) * 0.11).sin());
    }
    u.symmetrize();
    u
}

pub fn params(j: u32, n: u32) -> ModelParams {
    ModelParams {
        j,
        n,
        d: 5.0,
        nu: 1.3,
        mu: 0.01,
        gamma: 1.6,
    }
}
