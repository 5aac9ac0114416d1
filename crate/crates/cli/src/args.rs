use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailfit::{Distribution, EstimatorId, LomaxParams, PiecewiseParams, PowerLawTail};

#[derive(Debug, Parser)]
#[command(
    name = "tailfit",
    version,
    about = "Fit and simulate power-law tail exponents"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = tailfit::DEFAULT_SEED)]
    pub seed: u64,

    /// Output path (a directory for `grid`). Defaults to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a sample: `pareto:xm,beta`, `piecewise:xm,beta` or `lomax:lambda,beta`.
    Sample {
        dist: DistSpec,
        #[arg(long)]
        n: usize,
    },
    /// Estimate the exponent of the data above a known cutoff.
    Fit {
        data: PathBuf,
        #[arg(long)]
        xm: f64,
        /// MLE1, MLE2, OLS1 or OLS2.
        #[arg(long, default_value = "MLE2")]
        estimator: EstimatorId,
        /// Exponent of the OLS2 bias correction.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Choose the cutoff minimising the KS distance of the fitted tail.
    Cutoff {
        data: PathBuf,
        #[arg(long, default_value_t = tailfit::cutoff::DEFAULT_MIN_TAIL)]
        min_tail: usize,
    },
    /// Simulate the least-squares estimator via exponential order statistics.
    Renyi {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5000)]
        draws: usize,
        #[arg(long, default_value_t = 1.5)]
        beta: f64,
        /// Skip the comparison against directly simulated estimates.
        #[arg(long)]
        no_compare: bool,
    },
    /// Run a Monte-Carlo grid described by a JSON config.
    Grid { config: PathBuf },
    /// Fit the bias-model exponent to a curve of mean OLS1 estimates.
    FitGamma {
        /// CSV with columns `n,mean` (an `estimator` column, if present,
        /// selects the OLS1 rows).
        curve: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        lo: f64,
        #[arg(long, default_value_t = 2.5)]
        hi: f64,
    },
}

/// Distribution given on the command line as `name:p1,p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistSpec(pub Distribution);

impl FromStr for DistSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = s
            .split_once(':')
            .ok_or_else(|| format!("expected NAME:P1,P2, got {s:?}"))?;
        let nums = params
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("bad parameter in {s:?}: {e}"))?;
        let [a, b] = nums[..] else {
            return Err(format!(
                "{name} takes exactly two parameters, got {}",
                nums.len()
            ));
        };
        let dist = match name.to_ascii_lowercase().as_str() {
            "pareto" => PowerLawTail::pareto(a, b).map(Distribution::from),
            "piecewise" => PiecewiseParams::new(a, b).map(Distribution::from),
            "lomax" => LomaxParams::new(a, b).map(Distribution::from),
            _ => return Err(format!("unknown distribution {name:?}")),
        };
        dist.map(DistSpec).map_err(|e| e.to_string())
    }
}
