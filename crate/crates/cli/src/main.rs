//! `statphase`: expansions, bounds and oracle checks from the command line.
//!
//! Exit codes: 0 ok, 2 invalid input or failed validation, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::Format;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "statphase", version, about = "Stationary-phase expansions with explicit remainder bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expansion terms, bounds and oracle errors at given frequencies.
    Expand(ExpandArgs),
    /// Logarithmic sweep in ω (with --problem) or in t along x = 2·ratio·t (with --ratio).
    Sweep(SweepArgs),
    /// Schrödinger region map over a (t, ratio) grid, or the L² cone check.
    Schrodinger(SchrodingerArgs),
    /// Run every input check on a problem.
    Validate(ValidateArgs),
    /// Tables of bound constants, Θ coefficients and Schrödinger constants.
    Constants(ConstantsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Auto,
    Singular,
    Refined,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Problem definition (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Expansion depth.
    #[arg(long = "N", short = 'N', default_value_t = 1)]
    pub n: usize,
    /// Refined-bound tuning in (0,1).
    #[arg(long, default_value_t = 0.6)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub policy: Policy,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Frequencies (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub omega: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Template {
    Exp1,
    Exp2,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Initial data (JSON); defaults to the intro example with --mu.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 0.75)]
    pub mu: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ConeArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps2: f64,
    /// Width of the outside cones.
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    /// Decay parameter in (max(mu,1/2), 1); default 0.9·max(mu,1/2)+0.1.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value = "exp1")]
    pub template: Template,
    /// Plateau width of the fixed cut-off; default (p2-p1)/4.
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["problem", "ratio"])))]
pub struct SweepArgs {
    /// ω sweep of this problem.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// t sweep of the Schrödinger solution along x = 2·ratio·t.
    #[arg(long, allow_hyphen_values = true)]
    pub ratio: Option<f64>,
    #[arg(long = "N", short = 'N', default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0.6)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub policy: Policy,
    /// Lower end of the ω or t range.
    #[arg(long, default_value_t = 10.0)]
    pub from: f64,
    /// Upper end of the ω or t range.
    #[arg(long, default_value_t = 1e4)]
    pub to: f64,
    #[arg(long, default_value_t = 31)]
    pub points: usize,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub cone: ConeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SchrodingerArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub cone: ConeArgs,
    /// Times (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub ratio_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub ratio_max: f64,
    #[arg(long, default_value_t = 51)]
    pub ratio_points: usize,
    /// Compare ‖u(t,·)‖ on the cone cross-section with its limit instead.
    #[arg(long)]
    pub l2cone: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 10.0)]
    pub omega: f64,
    /// Sample grid size.
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    /// Orders ρ for the envelope and Θ tables.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub rho: Vec<f64>,
    /// Singularity exponents for the Θ table.
    #[arg(long = "theta-mu", value_delimiter = ',', default_value = "1,0.5")]
    pub theta_mu: Vec<f64>,
    #[arg(long, default_value_t = 0.6)]
    pub gamma: f64,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub cone: ConeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A failure with its exit code, reported as JSON on stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
    pub details: Value,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, kind: "invalid_input".into(), message, details: Value::Null }
    }

    pub fn io<E: std::fmt::Display>(e: E) -> Self {
        Failure { code: 3, kind: "io".into(), message: e.to_string(), details: Value::Null }
    }
}

impl From<statphase::error::Error> for Failure {
    fn from(e: statphase::error::Error) -> Self {
        let code = if e.is_validation() { 2 } else { 3 };
        Failure { code, kind: e.kind().into(), message: e.to_string(), details: Value::Null }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Expand(a) => commands::expand(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Schrodinger(a) => commands::schrodinger(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Constants(a) => commands::constants(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let doc = json!({ "error": { "kind": f.kind, "message": f.message, "exit_code": f.code, "details": f.details } });
            eprintln!("{doc}");
            ExitCode::from(f.code)
        }
    }
}
