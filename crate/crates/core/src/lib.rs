//! Rigorous enclosure of D₃/D₆-symmetric periodic steady states of the planar
//! Swift–Hohenberg equation `(1 + Δ)²u + μu − γu² + u³ = 0` on the hexagonal
//! lattice.
//!
//! The pipeline is: find an approximate zero of the symmetric Galerkin system
//! by Newton's method ([`shmodel`]), then certify a true zero nearby with
//! interval Newton–Kantorovich bounds ([`proof`]). Whole solution branches
//! parameterized by Chebyshev series are handled in [`branch`].

pub mod branch;
pub mod geom;
pub mod io;
pub mod lattice;
pub mod proof;
pub mod rigor;
pub mod seqspace;
pub mod shmodel;

pub use branch::{BranchCertificate, ChebBranch, LnkMode};
pub use lattice::{GroupSpec, Index, OrbitTable};
pub use proof::{Certificate, RadiiCheck};
pub use rigor::{CInterval, Interval};
pub use seqspace::{Coeff, ReducedOperator, SymSequence};
pub use shmodel::{ApproxInverse, ModelParams};

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid interval endpoints [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("interval division by an interval containing zero")]
    DivisionByZero,
    #[error("square root of an interval with negative part")]
    NegativeSqrt,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported dihedral group D{0}; expected 3 or 6")]
    UnsupportedGroup(u32),
    #[error("{0:?} is not an orbit representative")]
    NotRepresentative(Index),
    #[error("incompatible sequences: {0}")]
    Mismatch(String),
    #[error("tail of the linear part is not uniformly invertible: {0}")]
    TailNotInvertible(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("Newton diverged after {iterations} iterations (residual {residual:e})")]
    Diverged { iterations: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("continuation failed at grid point {k}: {reason}")]
    Continuation { k: usize, reason: String },
    #[error("non-finite bound encountered in {0}")]
    NonFinite(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
