use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lovasz_bregman::{GeneratorSpec, LbError, TieRule};
use thiserror::Error;

mod commands;
mod report;

use report::Format;

const AFTER_HELP: &str = "\
Generators (--generator):
  cardinality:sqrt          f(X) = sqrt(|X|)
  cardinality:log           f(X) = ln(1 + |X|)
  cardinality:file=<path>   f(X) = g(|X|), gains g(k) - g(k-1) from a JSON array
  cut:uniform               f(X) = |X| * |V \\ X|
  cut:file=<path>           graph cut, symmetric weights from a CSV matrix
  topm:<m>                  f(X) = min(|X|, m)
  max                       f(X) = min(|X|, 1)
  range                     f(X) = 1 if 1 <= |X| <= n-1, else 0
  table:file=<path>         explicit table, JSON object keyed by subset bitmask

Vectors and permutations are comma-separated (\"0.3,0.7\", \"2,1,3\"); items are 1-based.
Score matrices are CSV (one vector per row, optional header) or JSON (.json).

Exit codes: 0 success, 2 usage error, 3 input or output error, 4 computation error.";

#[derive(Parser, Debug)]
#[command(name = "lbdiv", version)]
#[command(about = "Lovász-Bregman divergences between score vectors and permutations")]
#[command(after_help = AFTER_HELP)]
pub struct Cli {
    /// Submodular generator
    #[arg(long, global = true, default_value = "cardinality:sqrt")]
    pub generator: GeneratorSpec,

    /// How ties in score vectors are ordered: lowest-index-first or reject
    #[arg(long, global = true, default_value = "lowest-index-first")]
    pub tie_rule: TieRule,

    /// Seed for sampling and cluster initialisation
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format (grid defaults to csv, everything else to json)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Divergence d(x || sigma) for one vector or every row of a matrix
    Divergence {
        /// Score vector
        #[arg(long, allow_hyphen_values = true, conflicts_with = "input", required_unless_present = "input")]
        x: Option<String>,
        /// Score matrix file (CSV or JSON)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Permutation, item at each rank
        #[arg(long)]
        sigma: String,
    },
    /// Mean-ordering aggregation of the rows of a score matrix
    Aggregate {
        #[arg(long)]
        input: PathBuf,
        /// Nonnegative row weights
        #[arg(long)]
        weights: Option<String>,
        /// Mean vectors with total variation below this are flagged low-confidence
        #[arg(long, default_value_t = 1e-9)]
        confidence_threshold: f64,
    },
    /// k-means clustering of score vectors around representative orderings
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// Stop once the objective decreases by less than this
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Ranking measures
    Eval {
        #[command(subcommand)]
        metric: Metric,
    },
    /// Lovász-Mallows models
    Mallows {
        #[command(subcommand)]
        action: MallowsAction,
    },
    /// Divergence to sigma on a uniform lattice over the unit square or cube
    Grid {
        /// Reference permutation of 2 or 3 items
        #[arg(long)]
        sigma: String,
        /// Points per axis
        #[arg(long, default_value_t = 11)]
        resolution: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Metric {
    /// NDCG loss of sigma against relevance scores
    Ndcg {
        #[arg(long)]
        relevance: String,
        #[arg(long)]
        sigma: String,
        /// Evaluate the top k ranks (defaults to all)
        #[arg(long)]
        cutoff: Option<usize>,
        /// "log2" or a JSON array of discounts
        #[arg(long, default_value = "log2")]
        discount: String,
    },
    /// Fraction of (good, bad) pairs ranked in the wrong order
    Auc {
        #[arg(long)]
        good: String,
        #[arg(long)]
        bad: String,
        #[arg(long)]
        sigma: String,
    },
    /// Kendall tau distance between two permutations
    Kendall {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        pi: String,
    },
    /// Spearman footrule distance between two permutations
    Spearman {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        pi: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum MallowsAction {
    /// Log density of a score vector (unnormalised) or of sigma under the
    /// extended model built from a score matrix
    Density {
        #[arg(long)]
        sigma: String,
        /// Concentration, or one per row with --input
        #[arg(long)]
        theta: String,
        /// Score vector in the unit cube
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        x: Option<String>,
        /// Score matrix for the extended model over permutations
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Monte-Carlo estimate of log Z for the score model
    Logz {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Most probable permutation under the extended model
    Map {
        #[arg(long)]
        input: PathBuf,
        /// Concentration, or one per row
        #[arg(long)]
        theta: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
    #[error(transparent)]
    Compute(LbError),
}

impl From<LbError> for CliError {
    fn from(e: LbError) -> Self {
        match e {
            LbError::Parse(msg) => CliError::Input(msg),
            other => CliError::Compute(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Output(_) => 3,
            CliError::Compute(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
