//! `bandfill`: fill gaps in sequences and grids with band-limited
//! interpolants.
//!
//! Exit codes: 0 success, 1 I/O, 2 parse or parameter, 3 geometry,
//! 4 solver. Failures print `{"error": {"category", "message"}}` to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use bandfill::{Error, ErrorCategory, Method};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "bandfill",
    version,
    about = "Recover missing samples by band-limited approximation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fill the missing samples of a CSV series.
    Recover(RecoverArgs),
    /// Forecast a few steps past the end of a series.
    Forecast(ForecastArgs),
    /// Spectrum and conditioning of the gap operator for a mask.
    Diagnose(DiagnoseArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RecoverArgs {
    /// CSV with header `t,value` or `t1,t2,value`; absent rows are missing.
    #[arg(long)]
    input: PathBuf,
    /// Extra missing indices, e.g. "1..12" or "(0..2 x 3..4)".
    #[arg(long, default_value = "")]
    missing: String,
    /// Band edge as a fraction of π (0.25 means Ω = 0.25π).
    #[arg(long)]
    omega: f64,
    /// Column band for grids; defaults to --omega.
    #[arg(long)]
    omega_cols: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Direct)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Neumann,
}

impl From<SolverArg> for Method {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Direct => Method::Direct,
            SolverArg::Neumann => Method::Neumann,
        }
    }
}

#[derive(Args)]
struct ForecastArgs {
    /// Past samples ending at t = 0. Without it a seeded synthetic series
    /// is used.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for the synthetic series.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Past length q; the past window is {-q..0}.
    #[arg(long, default_value_t = 60)]
    past: i64,
    #[arg(long, default_value_t = 0.25)]
    omega: f64,
    /// Accepted forecast length m̃.
    #[arg(long, default_value_t = 3)]
    horizon: usize,
    /// Gap length m.
    #[arg(long, default_value_t = 12)]
    gap: usize,
    /// Outer truncation N.
    #[arg(long, default_value_t = 60)]
    n: i64,
    /// "zero", "truth" (synthetic series only) or a CSV path.
    #[arg(long, default_value = "zero")]
    dummy: String,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Missing set, e.g. "0..2".
    #[arg(long, required_unless_present = "gap_sizes")]
    missing: Option<String>,
    #[arg(long)]
    omega: f64,
    /// Sweep M = {1..m} over these sizes, e.g. "1..20".
    #[arg(long, conflicts_with = "missing")]
    gap_sizes: Option<String>,
    /// Also write the operator matrix as CSV.
    #[arg(long)]
    export_matrix: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON run config with "command": "simulate".
    #[arg(long, required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Bundled config: truncation_sweep or noise_bound.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Recover(a) => commands::recover(&a),
        Command::Forecast(a) => commands::forecast(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({
                "error": { "category": e.category().as_str(), "message": e.to_string() }
            });
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Io => 1,
        ErrorCategory::Parse | ErrorCategory::Parameter => 2,
        ErrorCategory::Geometry => 3,
        ErrorCategory::Solver => 4,
    }
}
