use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Seed used when neither `--seed` nor `TREEBAG_SEED` is given.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Parser)]
#[command(name = "treebag", version, about = "Spanning-tree counts and loop-erased walks on tree-by-graph products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts a_n, a'_n, t(T̂_n) and the ratios c_n, s_n.
    Count(CountArgs),
    /// Limits c, s, r, K and the bag-distance law q_m.
    ClosedForm(ClosedFormArgs),
    /// Monte Carlo experiments.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Bag count of the loop-erased path between the two central vertices.
    Dist,
    /// Probability that the loop-erased path leaves T_m.
    Escape,
    /// Probability that a trip has a memorable bag outside T_m.
    Memorable,
    /// Escape probabilities over a (w, n) grid.
    Phase,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(short = 'd')]
    pub d: usize,
    /// Bag weight as an integer, fraction or decimal.
    #[arg(short = 'w')]
    pub w: String,
    #[arg(short = 'n')]
    pub n: usize,
    /// Cross-check against the matrix-tree determinant for n <= 3.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    #[arg(short = 'd')]
    pub d: usize,
    #[arg(short = 'w', conflicts_with = "w_grid", required_unless_present = "w_grid")]
    pub w: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub w_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = treebag::closed_form::DEFAULT_M_MAX)]
    pub m_max: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(short = 'd')]
    pub d: usize,
    /// Fiber: K2, K<k>, cycle-<k>, or a path to an edge-list file.
    #[arg(long = "H", default_value = "K2")]
    pub h: String,
    #[arg(short = 'w')]
    pub w: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub w_grid: Option<Vec<String>>,
    #[arg(short = 'n')]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(short = 'm')]
    pub m: Option<usize>,
    /// For `memorable`: report every m in 0..=m_max on shared samples.
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(short = 'N', default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, env = "TREEBAG_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Compare against exact values where they exist; exit 4 on mismatch.
    #[arg(long)]
    pub self_check: bool,
    #[command(flatten)]
    pub output: Output,
}
