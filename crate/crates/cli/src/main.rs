use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use num_complex::Complex64;

use quasispec::scenario::parse_complex;
use quasispec::{emit, parse_scenario, run, CliError, Command, Format, RunOptions};

/// Rank-one perturbation laboratory: moments, roots of g(z) = 1/alpha,
/// eigenvalue cross-checks and invariant-subspace certificates.
///
/// Exit status: 0 on success, 2 when a run completes but reports invariant
/// violations, 1 on any error.
#[derive(Debug, Parser)]
#[command(name = "quasispec", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Scenario file (JSON).
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,

    /// Replace the scenario's alpha list with a single value, e.g. `2`, `-1`, `i`, `0.5+1e-3i`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<Complex64>,

    /// Replace the search annulus.
    #[arg(long, num_args = 2, value_names = ["RMIN", "RMAX"])]
    annulus: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Root indices (0-based, comma separated) whose eigenvectors span the certified subspace.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("QUASISPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("QUASISPEC_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let text = std::fs::read(&cli.scenario)?;
    let scenario = parse_scenario(&text)?;
    let opts = RunOptions {
        alpha: cli.alpha,
        annulus: cli.annulus.map(|v| (v[0], v[1])),
        subset: cli.subset,
    };
    let report = run(cli.command, &scenario, &opts)?;
    let bytes = emit(&report, cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
