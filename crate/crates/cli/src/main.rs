//! `gausslab`: seeded, reproducible Gaussian-measure experiments with CSV
//! output. Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O.

use clap::{Parser, Subcommand};
use gausslab_cli::{run, CliError, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gausslab",
    version,
    about = "Gaussian-measure experiments: path sampling, change of measure, \
             chaos calculus, hedging, and functional inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sup-norm tail table with the fitted log-tail slope.
    #[command(name = "fernique-tail")]
    FerniqueTail {
        /// Covariance kernel: brownian-motion, ornstein-uhlenbeck (sigma = 1),
        /// fractional-brownian-motion (H = 0.75), or brownian-bridge.
        #[arg(long, default_value = "brownian-motion")]
        kernel: String,
        /// Dyadic grid levels m; the grid has 2^m + 1 nodes.
        #[arg(long, default_value_t = 7)]
        levels: u32,
        /// Number of sampled paths.
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated tail thresholds.
        #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5")]
        thresholds: Vec<f64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasi-invariance check: translate, reweight, compare, per functional.
    #[command(name = "cm-check")]
    CmCheck {
        #[arg(long, default_value_t = 6)]
        levels: u32,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-by-level Schauder construction with exact sup-norm identities.
    #[command(name = "levy-construct")]
    LevyConstruct {
        /// Highest Schauder level in the partial sum.
        #[arg(long, default_value_t = 9)]
        levels: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The countable-additivity failure table for cylinder measure.
    #[command(name = "additivity-demo")]
    AdditivityDemo {
        /// Number of cubes in the partial sum.
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tail estimates of projected norms over a sliding excluded prefix.
    #[command(name = "measurable-probe")]
    MeasurableProbe {
        /// Norm family: sup (Schauder sup-norm) or hs (diagonal 1/n map).
        #[arg(long, default_value = "sup")]
        suite: String,
        /// Probe window width in levels (sup) or coordinates (hs).
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long, default_value_t = 20_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated norm thresholds epsilon.
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
        thresholds: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quadrature Gram matrix of the normalized Hermite polynomials.
    #[command(name = "chaos-table")]
    ChaosTable {
        /// Largest Hermite degree in the table.
        #[arg(long, default_value_t = 8)]
        kmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derivative/divergence identities under Monte Carlo.
    #[command(name = "malliavin-check")]
    MalliavinCheck {
        #[arg(long, default_value_t = 6)]
        levels: u32,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replicate a payoff by its predictable representation, path by path.
    #[command(name = "clark-ocone-hedge")]
    ClarkOconeHedge {
        /// Payoff: call-on-bm, lookback, or call-on-gbm.
        #[arg(long, default_value = "call-on-bm")]
        payoff: String,
        /// Strike for the call payoffs; ignored by lookback.
        #[arg(long, default_value_t = 1.0)]
        strike: f64,
        #[arg(long, default_value_t = 7)]
        levels: u32,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ornstein-Uhlenbeck semigroup checks with measured slacks.
    #[command(name = "ou-check")]
    OuCheck {
        /// Suite: mehler, poincare, lsi, commutation, or decay.
        #[arg(long, default_value = "mehler")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn to_config(command: Command) -> (ExperimentConfig, Option<PathBuf>) {
    match command {
        Command::FerniqueTail { kernel, levels, paths, seed, thresholds, out } => (
            ExperimentConfig::FerniqueTail { kernel, levels, paths, seed, thresholds },
            out,
        ),
        Command::CmCheck { levels, paths, seed, out } => {
            (ExperimentConfig::CmCheck { levels, paths, seed }, out)
        }
        Command::LevyConstruct { levels, seed, out } => {
            (ExperimentConfig::LevyConstruct { levels, seed }, out)
        }
        Command::AdditivityDemo { kmax, out } => (ExperimentConfig::AdditivityDemo { kmax }, out),
        Command::MeasurableProbe { suite, levels, paths, seed, thresholds, out } => (
            ExperimentConfig::MeasurableProbe { suite, levels, paths, seed, thresholds },
            out,
        ),
        Command::ChaosTable { kmax, out } => (ExperimentConfig::ChaosTable { kmax }, out),
        Command::MalliavinCheck { levels, paths, seed, out } => {
            (ExperimentConfig::MalliavinCheck { levels, paths, seed }, out)
        }
        Command::ClarkOconeHedge { payoff, strike, levels, paths, seed, out } => (
            ExperimentConfig::ClarkOconeHedge { payoff, strike, levels, paths, seed },
            out,
        ),
        Command::OuCheck { suite, seed, out } => (ExperimentConfig::OuCheck { suite, seed }, out),
    }
}

fn fail(error: &CliError) -> ExitCode {
    eprintln!("{}", error.report_line());
    ExitCode::from(error.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                // Help and version are not failures.
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Usage(e.to_string()));
        }
    };
    let (config, out) = to_config(cli.command);
    let report = match run(&config) {
        Ok(report) => report,
        Err(e) => return fail(&e),
    };
    match report.emit(out.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
