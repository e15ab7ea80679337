use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hpmf", version, about = "Color image completion with hierarchical-prior matrix factorization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complete one image and write the recovery plus a metrics row.
    Complete(CompleteArgs),
    /// Complete one image at several sampling ratios, one CSV row each.
    Sweep(SweepArgs),
    /// Print `psnr,rse,ssim` of an estimate against a reference image.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Recovered image (8-bit PNG).
    #[arg(long)]
    pub output: PathBuf,
    /// Metrics CSV; printed to stdout when omitted.
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
    /// Sampling ratio in (0, 1].
    #[arg(long, conflicts_with = "mask", required_unless_present = "mask")]
    pub sr: Option<f64>,
    /// Mask image: pixels darker than 0.5 are missing.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Metrics CSV; printed to stdout when omitted.
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
    /// Comma-separated sampling ratios.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub sr: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub reference: PathBuf,
    pub estimate: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct SolverArgs {
    /// `key = value` file with `HpmfConfig` field names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Singular-value ratio threshold for rank estimation.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fixed ranks, one per mode, e.g. `20,20,3`.
    #[arg(long, value_delimiter = ',')]
    pub rank: Option<Vec<usize>>,
    /// Units of the weights and penalties (255 for the published values).
    #[arg(long)]
    pub intensity_scale: Option<f64>,
    /// Solve the modes of each iteration on separate threads.
    #[arg(long)]
    pub parallel: bool,
    /// Write the per-iteration trace next to the metrics file.
    #[arg(long)]
    pub trace: bool,
    /// Report 0 for all times so outputs are byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}
