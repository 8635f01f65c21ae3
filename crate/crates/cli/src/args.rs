use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BUYBACK_LAB_OUT";

#[derive(Debug, Clone, Parser)]
#[command(name = "buyback-lab", version, about = "Share buy-back execution, risk and audit analytics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scenario or audit config file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the scenario's master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths or trials.
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV, default_value = "buyback-out")]
    pub out: PathBuf,
    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Run Monte Carlo fan-outs on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Execute one strategy on one simulated path.
    Simulate(SimulateArgs),
    /// Closed-form and Monte Carlo VaR, residual profile, fan chart.
    Risk(RiskArgs),
    /// Audit a disclosure tape.
    Audit(AuditArgs),
    /// Coin game or benchmark-beat study.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Trust NAV before and after a buy-back.
    Nav(NavArgs),
    /// Regenerate every plot series and reference table.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Twap,
    Pov,
    Adaptive,
    Gated,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Overrides the config's strategy kind.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub pov_rate: Option<f64>,
    #[arg(long)]
    pub ceiling: Option<f64>,
    /// Which path of the seed family to run.
    #[arg(long, default_value_t = 0)]
    pub path_index: u64,
}

#[derive(Debug, Clone, Args)]
pub struct RiskArgs {
    /// Programme value.
    #[arg(long, default_value_t = 870e6)]
    pub value: f64,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    /// Tail probability for the Monte Carlo estimate.
    #[arg(long, default_value_t = 0.05)]
    pub percentile: f64,
    /// Sample paths kept in the fan chart.
    #[arg(long, default_value_t = 20)]
    pub fan_samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Tape CSV; overrides the config's `tape`.
    #[arg(long)]
    pub tape: Option<PathBuf>,
    #[arg(long)]
    pub allowed_days: Option<usize>,
    #[arg(long)]
    pub total_returned: Option<f64>,
    #[arg(long)]
    pub stamp_bps: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum ExperimentCmd {
    /// Fixed-horizon vs optional-stopping coin game.
    Coin(CoinArgs),
    /// Strategy outperformance over many simulated paths.
    Study(StudyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CoinArgs {
    #[arg(long, default_value_t = 100)]
    pub n_min: usize,
    #[arg(long, default_value_t = 150)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    /// Also sweep `fast:trickle` multiplier pairs, e.g. `2:0.15,4:0.15`.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NavArgs {
    #[arg(long, default_value_t = 100e6)]
    pub assets: f64,
    #[arg(long, default_value_t = 10e6)]
    pub shares: f64,
    #[arg(long, default_value_t = 10e6)]
    pub spend: f64,
    /// Execution prices to tabulate.
    #[arg(long, value_delimiter = ',', default_values_t = [7.0, 10.0, 11.0])]
    pub prices: Vec<f64>,
}
