//! Batch front-end: `homog <subcommand>` with a keyed-text configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 failed assumption check under `--strict`.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Flags, Output};
use config::{ConfigError, RunConfig};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "HOMOG_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ASSUMPTION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(homog_core::Error),
    Assumption(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Assumption(m) => write!(f, "assumption check failed: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<homog_core::Error> for CliError {
    fn from(e: homog_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Assumption(_) => EXIT_ASSUMPTION,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Divergence bound and field constants; JSON with passes_A2.
    CheckAssumptions,
    /// Support function σ at one point or at `sigma.samples` random pairs.
    Sigma,
    /// Intrinsic distance from `metric.source` (CSV per cell).
    Distance,
    /// Negative-cycle search for the tilted weights (JSON certificate).
    Cycle,
    /// Reachability components and the trapped-set verdict.
    InvariantSets,
    /// H̄(P) for every P in `effective.p` via the k-schedule.
    Effective,
    /// Support values of the Wulff set over `effective.directions` directions.
    Wulff,
    /// Approximate corrector for the first P at truncation `effective.k`.
    Corrector,
    /// ε-convergence table of the oscillatory solver against the Hopf–Lax limit.
    Homogenize,
    /// Snapshots of the oscillatory solution at `solver.snapshots`.
    Evolve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckAssumptions => "check-assumptions",
            Command::Sigma => "sigma",
            Command::Distance => "distance",
            Command::Cycle => "cycle",
            Command::InvariantSets => "invariant-sets",
            Command::Effective => "effective",
            Command::Wulff => "wulff",
            Command::Corrector => "corrector",
            Command::Homogenize => "homogenize",
            Command::Evolve => "evolve",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "homog",
    version,
    about = "Effective Hamiltonians, invariant sets and homogenization for the G-equation",
    after_help = "Configuration keys (all optional, `key = value` per line):\n  \
        field.kind field.amplitude field.value field.center grid.dimension grid.resolution\n  \
        assumptions.chi metric.radius metric.eta metric.side metric.level metric.tilt\n  \
        metric.truncation metric.source effective.p effective.tol effective.k_max effective.k\n  \
        effective.bisection_tol effective.pde_audit effective.scheme effective.directions\n  \
        sigma.x sigma.q sigma.samples sigma.truncation sigma.level solver.epsilon solver.t\n  \
        solver.cfl solver.resolution solver.side solver.initial solver.center solver.snapshots\n  \
        output.directory output.format seed\n\n\
        Environment: HOMOG_THREADS sets the worker thread count."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Keyed-text configuration file.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,

    /// Override one key (`key=value`); applied after the file, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Output directory; same as `--set output.directory=DIR`.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Exit with code 4 when an assumption check fails.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Reject reachability graphs whose grid is too coarse for the margin.
    #[arg(long, global = true)]
    pub certify_margin: bool,
}

/// Resolves the configuration from file and overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(dir) = &cli.out {
        cfg.set("output.directory", &dir.to_string_lossy())?;
    }
    Ok(cfg)
}

/// Runs one subcommand; writes the manifest first and returns the files written.
pub fn run(cfg: &RunConfig, command: Command, flags: Flags) -> Result<Vec<String>, CliError> {
    let dir = PathBuf::from(cfg.get("output.directory"));
    let mut out = Output::new(&dir, cfg.format()?)?;
    out.text("manifest.txt", &cfg.to_manifest())?;
    match command {
        Command::CheckAssumptions => commands::check_assumptions_cmd(cfg, flags, &mut out)?,
        Command::Sigma => commands::sigma_cmd(cfg, &mut out)?,
        Command::Distance => commands::distance_cmd(cfg, &mut out)?,
        Command::Cycle => commands::cycle_cmd(cfg, &mut out)?,
        Command::InvariantSets => commands::invariant_sets_cmd(cfg, flags, &mut out)?,
        Command::Effective => commands::effective_cmd(cfg, &mut out)?,
        Command::Wulff => commands::wulff_cmd(cfg, &mut out)?,
        Command::Corrector => commands::corrector_cmd(cfg, &mut out)?,
        Command::Homogenize => commands::homogenize_cmd(cfg, &mut out)?,
        Command::Evolve => commands::evolve_cmd(cfg, &mut out)?,
    }
    Ok(out.written)
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v}: expected an integer")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let flags = Flags {
        strict: cli.strict,
        certify_margin: cli.certify_margin,
    };
    let result = init_threads()
        .and_then(|_| resolve_config(&cli))
        .and_then(|cfg| run(&cfg, cli.command, flags));
    match result {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("homog {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
