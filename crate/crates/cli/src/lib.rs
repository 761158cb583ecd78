//! `shhex` subcommands: find, prove, continue, render, verify.
//!
//! Exit codes: 0 success, 2 proof failed, 3 numerics diverged, 4 I/O or
//! validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use shhex_core::branch::{continue_branch, prove_branch, ContinuationOptions, BRANCH_THEOREMS};
use shhex_core::geom::{sample_grid, verify_tiling, write_csv, Domain, DomainKind};
use shhex_core::io::{read_json, sha256_hex, to_json, BranchFile, SolutionFile};
use shhex_core::proof::{prove_solution, replay, Bounds, Radius, ReplayInput, ReplayOutcome, SOLUTION_THEOREMS};
use shhex_core::seqspace::Seq;
use shhex_core::shmodel::{find_solution, SearchOptions};
use shhex_core::{BranchCertificate, Certificate, ChebBranch, Error, LnkMode, ModelParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROOF_FAILED: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "SHHEX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "shhex", version, about = "Swift-Hohenberg steady states on the hexagonal lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Newton search from random seeds; writes a solution file.
    Find(FindArgs),
    /// Computer-assisted proof of a solution, or replay/recheck of constants.
    Prove(ProveArgs),
    /// Chebyshev continuation from a solution and a proof of the branch.
    Continue(ContinueArgs),
    /// Samples a solution or branch on a domain as CSV.
    Render(RenderArgs),
    /// Checks the tiling symmetries of a solution or branch point.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Group {
    D3,
    D6,
}

impl Group {
    fn j(self) -> u32 {
        match self {
            Self::D3 => 3,
            Self::D6 => 6,
        }
    }
}

/// Model parameters. Unset values fall back to command-specific defaults
/// or, when a file is read, to the values stored in it.
#[derive(Clone, Debug, Default, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub group: Option<Group>,
    /// Truncation order.
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Weight of the ℓ¹ norm, at least 1.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self, base: ModelParams) -> Result<ModelParams, Failure> {
        let p = ModelParams {
            j: self.group.map_or(base.j, Group::j),
            n: self.n.unwrap_or(base.n),
            d: self.d.unwrap_or(base.d),
            nu: self.nu.unwrap_or(base.nu),
            mu: self.mu.unwrap_or(base.mu),
            gamma: self.gamma.unwrap_or(base.gamma),
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters of a stored solution; only `ν` may be overridden.
    fn apply_to_file(&self, stored: ModelParams) -> Result<ModelParams, Failure> {
        let p = self.resolve(stored)?;
        let same = p.j == stored.j
            && p.n == stored.n
            && p.d.to_bits() == stored.d.to_bits()
            && p.mu.to_bits() == stored.mu.to_bits()
            && p.gamma.to_bits() == stored.gamma.to_bits();
        if !same {
            return Err(Failure::Input(
                "group, N, d, mu and gamma are fixed by the input file; only --nu may differ".into(),
            ));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Args)]
pub struct SearchArgs {
    /// First seed of the search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Further seeds tried after the first one diverges.
    #[arg(long, default_value_t = 49)]
    pub retries: u64,
    /// Scale of the random initial guess.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Newton stopping tolerance on the Galerkin residual.
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
    #[arg(long, default_value_t = 60)]
    pub maxit: usize,
}

impl SearchArgs {
    fn options(&self) -> Result<SearchOptions, Failure> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Failure::Input("--amplitude must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Failure::Input("--tol must be positive".into()));
        }
        Ok(SearchOptions {
            seed: self.seed,
            attempts: self.retries.saturating_add(1),
            amplitude: self.amplitude,
            tol: self.tol,
            maxit: self.maxit,
        })
    }
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, short, default_value = "solution.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    /// Solution file to prove.
    pub solution: Option<PathBuf>,
    /// Only `--nu` may differ from the solution file.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Fixed radius; the default scans a log grid.
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long, short, default_value = "certificate.json")]
    pub out: PathBuf,
    /// Replays the radii condition on `Y0=…,Z0=…,Z1=…,Z2=…,r0=…`.
    #[arg(long, conflicts_with_all = ["solution", "replay", "recheck"])]
    pub replay_constants: Option<String>,
    /// Replays a stored theorem by name (T1…T4, H1…H4, TB1, TB2, HB1…HB3).
    #[arg(long, conflicts_with_all = ["solution", "recheck"])]
    pub replay: Option<String>,
    /// Re-evaluates the inequalities of a stored certificate.
    #[arg(long, conflicts_with = "solution")]
    pub recheck: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ContinueArgs {
    /// Starting solution; without one, a start is searched with the
    /// model and search flags.
    pub solution: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Chebyshev order N_c.
    #[arg(long, default_value_t = 3)]
    pub ncheb: usize,
    /// Arclength of the branch piece.
    #[arg(long, default_value_t = 0.02)]
    pub sfix: f64,
    /// Orientation of the tangent at the start, sign of dμ/ds.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub direction: f64,
    #[arg(long, value_enum, default_value_t = LnkArg::Conservative)]
    pub lnk: LnkArg,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long, default_value = "branch.json")]
    pub out: PathBuf,
    #[arg(long, default_value = "branch-certificate.json")]
    pub cert: PathBuf,
    /// Replays a branch theorem by name (TB1, TB2, HB1, HB2, HB3).
    #[arg(long, conflicts_with = "solution")]
    pub replay: Option<String>,
    /// Replays the radii condition on `Y0=…,Z0=…,Z1=…,Z2=…,r0=…`.
    #[arg(long, conflicts_with_all = ["solution", "replay"])]
    pub replay_constants: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LnkArg {
    Conservative,
    Literal,
}

impl From<LnkArg> for LnkMode {
    fn from(a: LnkArg) -> Self {
        match a {
            LnkArg::Conservative => LnkMode::Conservative,
            LnkArg::Literal => LnkMode::Literal,
        }
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Solution or branch file.
    pub input: PathBuf,
    /// parallelogram0, parallelogram2d, delta1, delta2 or hexagon0.
    #[arg(long, default_value = "parallelogram0")]
    pub domain: String,
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// Branch parameter in [-1, 1]; required for branch files.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Allows the hexagon for D3 fields, which it does not tile.
    #[arg(long)]
    pub force: bool,
    /// CSV output; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Solution or branch file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Tolerance relative to the coefficient mass.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
}

/// A classified failure carrying its message.
#[derive(Debug)]
pub enum Failure {
    Proof(String),
    Diverged(String),
    Input(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Self::Proof(_) => EXIT_PROOF_FAILED,
            Self::Diverged(_) => EXIT_DIVERGED,
            Self::Input(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Proof(m) | Self::Diverged(m) | Self::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Diverged { .. } | Error::Continuation { .. } | Error::Singular(_) | Error::NonFinite(_) => {
                Self::Diverged(m)
            }
            Error::TailNotInvertible(_) => Self::Proof(m),
            _ => Self::Input(m),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message());
        return f.code();
    }
    match run(&cli.command, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
    // a pool built earlier in the process stays in place
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cmd: &Command, out: &mut impl Write) -> Result<i32, Failure> {
    match cmd {
        Command::Find(a) => cmd_find(a, out),
        Command::Prove(a) => cmd_prove(a, out),
        Command::Continue(a) => cmd_continue(a, out),
        Command::Render(a) => cmd_render(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| Failure::Input(format!("stdout: {e}")))?
    };
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| io_failure(path, e))
}

const FIND_DEFAULT: ModelParams = ModelParams {
    j: 3,
    n: 12,
    d: 5.0,
    nu: 1.38,
    mu: 0.01,
    gamma: 1.6,
};

const CONTINUE_DEFAULT: ModelParams = ModelParams {
    j: 6,
    n: 8,
    d: 5.0,
    nu: 1.7,
    mu: 0.1,
    gamma: 1.6,
};

fn search(p: &ModelParams, s: &SearchArgs) -> Result<(u64, Seq, f64), Failure> {
    match find_solution(p, &s.options()?) {
        Ok((seed, o)) => Ok((seed, o.u, o.residual)),
        Err(Error::Diverged { .. }) => Err(Failure::Diverged(format!(
            "no seed in {}..={} converged to a non-constant solution",
            s.seed,
            s.seed.saturating_add(s.retries)
        ))),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_find(a: &FindArgs, out: &mut impl Write) -> Result<i32, Failure> {
    let p = a.model.resolve(FIND_DEFAULT)?;
    let (seed, u, residual) = search(&p, &a.search)?;
    let file = SolutionFile::from_solution(&u, &p, Some(residual), Some(seed));
    write_file(&a.out, &to_json(&file)?)?;
    say!(out, "seed {seed}: residual {residual:e}, |u| = {:e}", u.norm_f64(p.nu));
    say!(out, "wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn print_bounds(out: &mut impl Write, b: &Bounds) -> Result<(), Failure> {
    say!(out, "Y0 <= {:e}", b.y0.hi());
    say!(out, "Z0 <= {:e}", b.z0.hi());
    say!(out, "Z1 <= {:e}", b.z1.hi());
    say!(out, "Z2(r) <= {:e} + {:e} r", b.z2_base.hi(), b.z2_slope.hi());
    Ok(())
}

fn report_replay(out: &mut impl Write, name: &str, o: &ReplayOutcome) -> Result<i32, Failure> {
    match o.mode {
        Some(mode) => {
            say!(out, "{name}: success ({mode:?}) at r = {:e}", o.r);
            Ok(EXIT_OK)
        }
        None => {
            say!(out, "{name}: failed at r = {:e}", o.r);
            eprintln!("{}", o.check.violation().unwrap_or("radii condition failed"));
            Ok(EXIT_PROOF_FAILED)
        }
    }
}

fn named_replay(name: &str) -> Result<ReplayInput, Failure> {
    if let Some(t) = SOLUTION_THEOREMS.iter().find(|t| t.name.eq_ignore_ascii_case(name)) {
        return Ok(ReplayInput::from_published(t)?);
    }
    if let Some(t) = BRANCH_THEOREMS.iter().find(|t| t.name.eq_ignore_ascii_case(name)) {
        return Ok(t.replay_input()?);
    }
    Err(Failure::Input(format!("unknown theorem {name:?}")))
}

fn radius(r0: Option<f64>) -> Result<Radius, Failure> {
    match r0 {
        Some(r) if r > 0.0 && r.is_finite() => Ok(Radius::Fixed(r)),
        Some(r) => Err(Failure::Input(format!("--r0 {r} must be positive"))),
        None => Ok(Radius::Scan),
    }
}

pub fn cmd_prove(a: &ProveArgs, out: &mut impl Write) -> Result<i32, Failure> {
    if let Some(c) = &a.replay_constants {
        return report_replay(out, "replay", &replay(&ReplayInput::parse(c)?));
    }
    if let Some(name) = &a.replay {
        return report_replay(out, name, &replay(&named_replay(name)?));
    }
    if let Some(path) = &a.recheck {
        return recheck(path, out);
    }
    let path = a
        .solution
        .as_ref()
        .ok_or_else(|| Failure::Input("a solution file, --replay, --replay-constants or --recheck is required".into()))?;
    let bytes = read_bytes(path)?;
    let file: SolutionFile = serde_json::from_slice(&bytes).map_err(|e| io_failure(path, e))?;
    let (u, stored) = file.to_solution()?;
    let p = a.model.apply_to_file(stored)?;
    let cert = prove_solution(&u, &p, radius(a.r0)?, &sha256_hex(&bytes))?;
    write_file(&a.out, &to_json(&cert)?)?;
    print_bounds(out, &cert.bounds)?;
    say!(out, "r0 = {:e}", cert.r0);
    say!(out, "margins {:e} {:e}", cert.margin1, cert.margin2);
    say!(out, "{}; wrote {}", if cert.success { "proved" } else { "proof failed" }, a.out.display());
    if cert.success {
        Ok(EXIT_OK)
    } else {
        eprintln!("{}", cert.diagnostics.as_deref().unwrap_or("radii condition failed"));
        Ok(EXIT_PROOF_FAILED)
    }
}

fn recheck(path: &Path, out: &mut impl Write) -> Result<i32, Failure> {
    let bytes = read_bytes(path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| io_failure(path, e))?;
    let (consistent, success) = if value.get("s_fix").is_some() {
        let c: BranchCertificate = serde_json::from_value(value).map_err(|e| io_failure(path, e))?;
        (c.is_consistent(), c.success)
    } else {
        let c: Certificate = serde_json::from_value(value).map_err(|e| io_failure(path, e))?;
        (c.is_consistent(), c.success)
    };
    say!(out, "stored verdict {}; recheck {}", if success { "success" } else { "failure" }, if consistent { "agrees" } else { "disagrees" });
    Ok(if consistent && success { EXIT_OK } else { EXIT_PROOF_FAILED })
}

pub fn cmd_continue(a: &ContinueArgs, out: &mut impl Write) -> Result<i32, Failure> {
    if let Some(c) = &a.replay_constants {
        return report_replay(out, "replay", &replay(&ReplayInput::parse(c)?));
    }
    if let Some(name) = &a.replay {
        let t = BRANCH_THEOREMS
            .iter()
            .find(|t| t.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Failure::Input(format!("unknown branch theorem {name:?}")))?;
        return report_replay(out, t.name, &replay(&t.replay_input()?));
    }
    if !(a.sfix > 0.0 && a.sfix.is_finite()) {
        return Err(Failure::Input(format!("--sfix {} must be positive", a.sfix)));
    }
    if a.ncheb < 1 {
        return Err(Failure::Input("--ncheb must be at least 1".into()));
    }
    if a.direction == 0.0 || !a.direction.is_finite() {
        return Err(Failure::Input("--direction must be a nonzero sign".into()));
    }
    let radius = radius(a.r0)?;
    let (u0, p) = match &a.solution {
        Some(path) => {
            let file: SolutionFile = read_json(path).map_err(|e| io_failure(path, e))?;
            let (u, stored) = file.to_solution()?;
            (u, a.model.apply_to_file(stored)?)
        }
        None => {
            let p = a.model.resolve(CONTINUE_DEFAULT)?;
            let (seed, u, residual) = search(&p, &a.search)?;
            say!(out, "start: seed {seed}, residual {residual:e}");
            (u, p)
        }
    };
    let opts = ContinuationOptions::new(a.sfix, a.ncheb, a.direction.signum());
    let (branch, _) = continue_branch(&u0, &p, &opts)?;
    let text = to_json(&BranchFile::from_branch(&branch))?;
    write_file(&a.out, &text)?;
    say!(out, "mu from {:e} to {:e}; wrote {}", branch.mu_at(-1.0), branch.mu_at(1.0), a.out.display());
    let cert = prove_branch(&branch, a.lnk.into(), radius, &sha256_hex(text.as_bytes()))?;
    write_file(&a.cert, &to_json(&cert)?)?;
    print_bounds(out, &cert.bounds)?;
    say!(out, "L_NK >= {:e}, |B| <= {:e}", cert.l_nk.lo(), cert.b_norm.hi());
    say!(out, "r0 = {:e}", cert.r0);
    say!(out, "{}; wrote {}", if cert.success { "branch proved" } else { "branch proof failed" }, a.cert.display());
    if cert.success {
        Ok(EXIT_OK)
    } else {
        eprintln!("{}", cert.diagnostics.as_deref().unwrap_or("radii condition failed"));
        Ok(EXIT_PROOF_FAILED)
    }
}

/// A field read from a solution or branch file, with its parameters.
fn load_field(path: &Path, s: Option<f64>) -> Result<(Seq, ModelParams), Failure> {
    let bytes = read_bytes(path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| io_failure(path, e))?;
    if value.get("blocks").is_some() {
        let file: BranchFile = serde_json::from_value(value).map_err(|e| io_failure(path, e))?;
        let branch: ChebBranch = file.to_branch()?;
        let s = s.ok_or_else(|| Failure::Input("--s is required for branch files".into()))?;
        if !(-1.0..=1.0).contains(&s) {
            return Err(Failure::Input(format!("--s {s} outside [-1, 1]")));
        }
        Ok((branch.u_at(s), branch.params_at(s)))
    } else {
        let file: SolutionFile = serde_json::from_value(value).map_err(|e| io_failure(path, e))?;
        Ok(file.to_solution()?)
    }
}

pub fn cmd_render(a: &RenderArgs, out: &mut impl Write) -> Result<i32, Failure> {
    let kind: DomainKind = a.domain.parse()?;
    let (u, p) = load_field(&a.input, a.s)?;
    if kind == DomainKind::Hexagon0 && p.j == 3 && !a.force {
        return Err(Failure::Input(
            "the hexagon is not a period domain of a D3 field; pass --force to render it anyway".into(),
        ));
    }
    let rows = sample_grid(&u, &Domain::new(kind, p.d)?, a.resolution)?;
    match &a.out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| io_failure(path, e))?;
            let mut w = std::io::BufWriter::new(f);
            write_csv(&rows, &mut w)?;
            w.flush().map_err(|e| io_failure(path, e))?;
        }
        None => write_csv(&rows, &mut *out)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut impl Write) -> Result<i32, Failure> {
    if a.samples == 0 {
        return Err(Failure::Input("--samples must be positive".into()));
    }
    let (u, _) = load_field(&a.input, a.s)?;
    let report = verify_tiling(&u, a.samples, a.tol, a.seed)?;
    say!(out, "{}", to_json(&report)?.trim_end());
    Ok(if report.pass { EXIT_OK } else { EXIT_PROOF_FAILED })
}
