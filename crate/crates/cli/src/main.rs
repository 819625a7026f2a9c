//! Command-line surface for the spectral-clt toolkit.
//!
//! Commands: `centering`, `test`, `power`, `experiment`, `mp-info`.
//! Reports are emitted as versioned JSON (or CSV where tabular); exit codes
//! are 0 on success, 1 on numerical failure, 2 on usage or input errors.

mod commands;
mod ingest;
mod output;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

pub const SCHEMA_VERSION: &str = "1";

/// Failure carrying the process exit code.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<spectral_clt::Error> for CliError {
    fn from(err: spectral_clt::Error) -> Self {
        let code = if err.is_input_error() { 2 } else { 1 };
        CliError { code, message: err.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError { code: 2, message: err.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "spectral-clt",
    about = "Spiked-covariance centering parameters, the corrected likelihood-ratio \
             sphericity test, and Monte Carlo experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args)]
pub struct OutputArgs {
    /// Output path; "-" writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
pub struct ModelArgs {
    /// Dimension p.
    #[arg(long)]
    p: usize,
    /// Sample size n.
    #[arg(long)]
    n: usize,
    /// Spike spec `value:multiplicity`, repeatable or comma-separated
    /// (e.g. `--spike 3:1,1.2:2`).
    #[arg(long = "spike")]
    spikes: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the spike-corrected centering parameter for a test function.
    Centering {
        #[command(flatten)]
        model: ModelArgs,
        /// Test function: x, x2, log, lrt_g, or poly:<c0,c1,...>.
        #[arg(long)]
        f: String,
        /// Contour margin (relative widening over the enclosed interval).
        #[arg(long, default_value_t = spectral_clt::centering::DEFAULT_MARGIN)]
        margin: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the corrected likelihood-ratio sphericity test on a CSV dataset
    /// (rows = observations, columns = variables).
    Test {
        /// Path to the CSV file.
        csv: String,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Skip the first line.
        #[arg(long)]
        header: bool,
        /// Subtract column means before forming S = XᵀX/n.
        #[arg(long)]
        center: bool,
        /// Treat the file as variables-in-rows and transpose it.
        #[arg(long)]
        transpose: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate the asymptotic power function over a grid of levels.
    Power {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated significance levels.
        #[arg(long, default_value = "0.01,0.05,0.1")]
        alphas: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a Monte Carlo experiment described by a JSON config file.
    Experiment {
        /// Path to the JSON config.
        #[arg(long)]
        config: String,
        /// Override the config's replicate count.
        #[arg(long)]
        reps: Option<usize>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's significance level.
        #[arg(long)]
        alpha: Option<f64>,
        /// Write a per-replicate CSV (rep, statistic, centered, reject).
        #[arg(long)]
        dump_reps: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print Marčenko–Pastur support edges and null CLT constants for (p, n).
    MpInfo {
        /// Dimension p.
        #[arg(long)]
        p: usize,
        /// Sample size n.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Centering { model, f, margin, output } => {
            commands::centering(&model, &f, margin, &output)
        }
        Command::Test { csv, alpha, header, center, transpose, output } => {
            commands::test(&csv, alpha, header, center, transpose, &output)
        }
        Command::Power { model, alphas, output } => commands::power(&model, &alphas, &output),
        Command::Experiment { config, reps, seed, alpha, dump_reps, output } => {
            commands::experiment(&config, reps, seed, alpha, dump_reps.as_deref(), &output)
        }
        Command::MpInfo { p, n, output } => commands::mp_info(p, n, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

/// Cap rayon's parallelism from SPECTRAL_CLT_THREADS when set.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("SPECTRAL_CLT_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
}
