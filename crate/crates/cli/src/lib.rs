//! Command-line front end: model specs in, grid CSVs and verification reports out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod csv;
pub mod error;
pub mod spec;
pub mod verify;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use hazdep::depfun::GammaRoute;

pub use error::{exit, CliError, CliResult};
pub use spec::{LoadedModel, ModelSpec};

#[derive(Debug, Parser)]
#[command(name = "hazdep", version, about = "Exponent dependence measures of multivariate survival models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate γ₀ for a pair on [0, 1-δ]².
    GammaGrid {
        #[arg(long)]
        model: PathBuf,
        /// One-based pair such as `1,2`.
        #[arg(long, default_value = "1,2")]
        pair: String,
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// closed-form, quotient or fd-pipeline; the closed form when available otherwise.
        #[arg(long)]
        route: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the exponent Λ_I of the Möbius factorization.
    Factorize {
        #[arg(long)]
        model: PathBuf,
        /// One-based subset such as `1,2,3`.
        #[arg(long)]
        subset: String,
        /// `lo:hi:n` for every axis, or `;`-separated per-axis items.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw lifetimes from a frailty model.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(short = 'n', long = "count")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => csv::write_atomic(p, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn load(path: &Path) -> CliResult<LoadedModel> {
    ModelSpec::load(path)?.build()
}

/// Caps the worker pool at `HAZDEP_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("HAZDEP_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("HAZDEP_THREADS={v} is not a positive integer")))?;
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command; returns the exit code.
pub fn execute(command: Command) -> CliResult<i32> {
    configure_threads()?;
    match command {
        Command::GammaGrid { model, pair, resolution, delta, route, out } => {
            let route = route.as_deref().map(GammaRoute::parse).transpose()?;
            let csv = commands::gamma_grid_csv(&load(&model)?, &pair, resolution, delta, route)?;
            emit(out.as_deref(), &csv.render())?;
        }
        Command::Factorize { model, subset, grid, out } => {
            let csv = commands::factorize_csv(&load(&model)?, &subset, &grid)?;
            emit(out.as_deref(), &csv.render())?;
        }
        Command::Sample { model, n, seed, out } => {
            let csv = commands::sample_csv(&load(&model)?, n, seed)?;
            emit(out.as_deref(), &csv.render())?;
        }
        Command::Verify { suite, out } => {
            let suite: verify::Suite = suite.parse().map_err(CliError::Usage)?;
            let report = verify::run_suite(suite);
            let mut json = report.to_json();
            json.push('\n');
            emit(out.as_deref(), &json)?;
            if out.is_some() {
                let failed = report.failures().count();
                eprintln!("{}: {} checks, {failed} failed", report.suite, report.checks.len());
            }
            return Ok(if report.passed { exit::OK } else { exit::VERIFY_FAILED });
        }
    }
    Ok(exit::OK)
}

/// Parses `args` and runs the command, reporting errors on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hazdep: {e}");
            e.exit_code()
        }
    }
}
