//! `triclock`: command-line front end for the three-clock map.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{resolve, ConfigFile};
use crate::output::Format;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "TRICLOCK_WORKERS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] triclock_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "triclock",
    version,
    about = "Dynamics of the three-clock synchronisation map on the 2-torus",
    after_help = "Exit status: 0 success, 1 domain error, 2 inconclusive certification, 64 usage error.\n\
                  Settings resolve as: command-line flag, then --config file (`key = value` lines), then default.\n\
                  The worker count falls back to $TRICLOCK_WORKERS, then to the number of CPUs."
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Coupling strength, 0 < a < 1/6 [default: 0.1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Seed for sampled quantities [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file [default: stdout]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads [default: $TRICLOCK_WORKERS or the CPU count]
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Plain-text `key = value` file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orbit of one point, with V and its orbital derivative at each step
    Iterate(commands::IterateArgs),
    /// The nine fixed points with Jacobian eigendata and classification
    FixedPoints,
    /// Certify that the orbital derivative is negative on A1
    VerifyLyapunov(commands::VerifyArgs),
    /// The curve on which the sign of xi4 changes, as a polyline
    Gamma(commands::GammaArgs),
    /// The eight heteroclinic arcs as polylines
    Heteroclinics(commands::HeteroclinicArgs),
    /// Monte Carlo estimate of the basin of (pi, pi)
    Basin(commands::BasinArgs),
    /// Plot data: fixed points, heteroclinics, gamma and region boundaries
    Portrait(commands::PortraitArgs),
    /// Fitted contraction rate of one orbit near the sink
    Rate(commands::RateArgs),
}

impl Command {
    fn config_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Iterate(_) => &["x0", "y0", "n", "backward"],
            Command::FixedPoints => &[],
            Command::VerifyLyapunov(_) => &["epsilon", "cell", "depth"],
            Command::Gamma(_) => &["points"],
            Command::Heteroclinics(_) => &["step"],
            Command::Basin(_) => &["samples", "max-iter", "radius"],
            Command::Portrait(_) => &["step", "points"],
            Command::Rate(_) => &["x0", "y0", "window"],
        }
    }
}

/// Settings shared by every subcommand, after resolution.
#[derive(Debug, Clone)]
pub struct Common {
    pub a: f64,
    pub seed: u64,
    pub format: Format,
}

pub const DEFAULT_A: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 0;

/// Result of a subcommand: rendered output and the exit status to report.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let config = match &cli.common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut allowed = vec!["a", "seed", "out", "format", "workers"];
    allowed.extend_from_slice(cli.command.config_keys());
    config.check_keys(&allowed)?;

    let common = Common {
        a: resolve(cli.common.a, &config, "a", DEFAULT_A)?,
        seed: resolve(cli.common.seed, &config, "seed", DEFAULT_SEED)?,
        format: resolve(cli.common.format, &config, "format", Format::Json)?,
    };
    let out: Option<PathBuf> = match cli.common.out {
        Some(p) => Some(p),
        None => config.get("out")?,
    };
    let workers = match cli.common.workers {
        Some(n) => Some(n),
        None => match config.get::<usize>("workers")? {
            Some(n) => Some(n),
            None => workers_from_env()?,
        },
    };
    if workers == Some(0) {
        return Err(CliError::Usage("workers must be at least 1".into()));
    }
    if let Some(n) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }

    let outcome = match &cli.command {
        Command::Iterate(args) => commands::iterate(&common, &config, args)?,
        Command::FixedPoints => commands::fixed_points(&common)?,
        Command::VerifyLyapunov(args) => commands::verify_lyapunov(&common, &config, args)?,
        Command::Gamma(args) => commands::gamma(&common, &config, args)?,
        Command::Heteroclinics(args) => commands::heteroclinics(&common, &config, args)?,
        Command::Basin(args) => commands::basin(&common, &config, args)?,
        Command::Portrait(args) => commands::portrait(&common, &config, args)?,
        Command::Rate(args) => commands::rate(&common, &config, args)?,
    };
    emit(out.as_deref(), &outcome.text)?;
    Ok(outcome.code)
}

fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}: expected a positive integer, got `{v}`"))),
        _ => Ok(None),
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
