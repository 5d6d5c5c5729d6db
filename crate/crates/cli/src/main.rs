//! `nlsdr`: tune, fit, predict and benchmark nonlinear SDR estimators.

mod commands;
mod config;
mod dataset;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlsdr_core::estimators::GsaveExponent;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    InvalidCells(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::InvalidCells(_) => 4,
        }
    }
}

impl From<nlsdr_core::Error> for CliError {
    fn from(e: nlsdr_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nlsdr", version, about = "Nonlinear sufficient dimension reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validate kernel bandwidths and write a config file plus CV traces.
    Tune {
        /// CSV with `x*` predictor and `y*` response columns.
        #[arg(long)]
        data: PathBuf,
        /// Output directory for config.txt, cv_x.csv and cv_y.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit an estimator and save the model.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// One of gsir, gsave, kcca, ksir.
        #[arg(long)]
        method: String,
        /// Number of predictor functions.
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved model on new predictors.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run Monte Carlo benchmark cells.
    Bench(BenchArgs),
    /// Render a benchmark CSV as text tables.
    Report {
        csv: PathBuf,
    },
}

#[derive(Debug, Args)]
struct HyperArgs {
    /// key=value file from `nlsdr tune`; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gamma_x: Option<f64>,
    #[arg(long)]
    eps_x: Option<f64>,
    #[arg(long)]
    gamma_y: Option<f64>,
    #[arg(long)]
    eps_y: Option<f64>,
    /// KSIR slice count.
    #[arg(long, default_value_t = 10)]
    slices: usize,
    #[arg(long, default_value = "derivation", value_parser = parse_exponent)]
    gsave_exponent: GsaveExponent,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `table1`, `table2`, or MODEL/SCENARIO[/method,...] such as `II/A/gsir`.
    #[arg(required = true)]
    cells: Vec<String>,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "NLSDR_THREADS")]
    threads: Option<usize>,
    #[arg(long, default_value_t = 200)]
    n_train: usize,
    #[arg(long, default_value_t = 200)]
    n_test: usize,
    #[arg(long, default_value_t = 10)]
    p: usize,
    /// Cross-validate once per cell instead of once per replication.
    #[arg(long)]
    tune_once: bool,
    #[arg(long, default_value = "derivation", value_parser = parse_exponent)]
    gsave_exponent: GsaveExponent,
}

fn parse_exponent(s: &str) -> Result<GsaveExponent, String> {
    s.parse().map_err(|e: nlsdr_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tune { data, out } => commands::tune(&data, &out),
        Command::Fit {
            data,
            method,
            d,
            hyper,
            out,
        } => commands::fit(&data, &method, d, &hyper, &out),
        Command::Predict { model, data, out } => commands::predict(&model, &data, &out),
        Command::Bench(args) => commands::bench(&args),
        Command::Report { csv } => commands::report(&csv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
