use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ils_summ::{BudgetRule, MetricKind};

use crate::error::CliError;
use crate::report::Method;

#[derive(Debug, Parser)]
#[command(name = "ils-summ", version, about = "Knapsack-median shot selection for video summaries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance with a heuristic or the exact solver.
    Solve(SolveArgs),
    /// Compute the optimal total distance of one instance.
    Exact(ExactArgs),
    /// Run several methods over a directory of instances and tabulate.
    Bench(BenchArgs),
    /// Build an instance from frame images and a duration manifest.
    Features(FeaturesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Absolute summary budget in seconds.
    #[arg(long, conflicts_with = "budget_ratio")]
    pub budget_seconds: Option<f64>,
    /// Budget as a fraction of the video length.
    #[arg(long)]
    pub budget_ratio: Option<f64>,
    /// Upper bound on a ratio-derived budget, in seconds.
    #[arg(long, requires = "budget_ratio")]
    pub budget_cap_seconds: Option<f64>,
}

impl BudgetArgs {
    /// Budget override resolved against the given video length.
    pub fn resolve(&self, video_s: impl FnOnce() -> f64) -> Result<Option<f64>, CliError> {
        if let Some(b) = self.budget_seconds {
            return Ok(Some(b));
        }
        let Some(ratio) = self.budget_ratio else {
            return Ok(None);
        };
        let rule = match self.budget_cap_seconds {
            Some(cap_s) => BudgetRule::CapAndRatio { cap_s, ratio },
            None => BudgetRule::Ratio(ratio),
        };
        Ok(Some(ils_summ::derive_budget(video_s(), rule)?))
    }
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance file (JSON, or CSV together with a budget flag).
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Override the instance's distance metric.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<MetricKind>,
    /// Video length in seconds; used for ratio budgets and runtime percentages.
    #[arg(long)]
    pub video_duration_seconds: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Largest perturbation strength.
    #[arg(long, default_value_t = 5)]
    pub m_max: usize,
    /// Move limit per local search.
    #[arg(long, default_value_t = 10_000)]
    pub max_trials: usize,
    /// Price swaps alongside adds instead of only when no add improves.
    #[arg(long)]
    pub full_neighborhood: bool,
    /// Wall-clock limit for the restart baseline (default: the video length).
    #[arg(long)]
    pub time_budget_seconds: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Refuse exact solving above this many shots.
    #[arg(long, default_value_t = 24)]
    pub max_shots: usize,
    /// Run the exact solver regardless of instance size.
    #[arg(long)]
    pub force: bool,
    /// Stop the exact search after this many nodes (result not proved optimal).
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Stop the exact search after this many seconds.
    #[arg(long)]
    pub time_limit_seconds: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InstanceArgs,
    #[arg(long, value_enum, default_value_t = Method::Ils)]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also run the exact solver and report the optimality percentage.
    #[arg(long)]
    pub with_optimum: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub input: InstanceArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Directory of instance files.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ils,local,restart,exact")]
    pub methods: Vec<Method>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Treat the sum of shot durations as the video length for runtime
    /// percentages and the restart time budget.
    #[arg(long)]
    pub shots_cover_video: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Skip optimality columns for instances above this many shots.
    #[arg(long, default_value_t = 24)]
    pub exact_max_shots: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub frames_dir: PathBuf,
    /// CSV of `frame_filename,duration_seconds` in shot order.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 32)]
    pub bins: usize,
    /// Keep raw pixel counts instead of per-channel frequencies.
    #[arg(long)]
    pub raw_counts: bool,
    #[arg(long, value_parser = parse_metric, default_value = "euclidean")]
    pub metric: MetricKind,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_metric(s: &str) -> Result<MetricKind, String> {
    s.parse().map_err(|e: ils_summ::Error| e.to_string())
}
