//! Command-line surface. Every system/code parameter has a flag; a config
//! file can preload any of them and the command line wins on conflict.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "relaysec",
    version,
    about = "Secrecy outage and throughput analysis for an AN-aided relay link with random eavesdroppers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate outage probabilities / throughput along a parameter sweep.
    Analytic(SweepArgs),
    /// Monte Carlo estimates along a parameter sweep.
    Montecarlo(SweepArgs),
    /// Jointly maximize secrecy throughput over rates and power splits.
    Optimize(CommonArgs),
    /// Run a named preset experiment.
    Figure(FigureArgs),
    /// Run the reduced oracle-pairing suite; exits nonzero on failure.
    Selftest(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FigureArgs {
    /// Preset name: fig2 | fig3 | fig4 | fig5 | fig6.
    pub name: String,
    /// Add Monte Carlo columns (fig2/fig3).
    #[arg(long)]
    pub mc: bool,
    /// Add asymptotic (large n_s) columns (fig2/fig3).
    #[arg(long)]
    pub asymptotic: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Parameter swept across rows.
    #[arg(long, value_enum, default_value = "tau-e-db")]
    pub sweep: SweepVar,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 2.0)]
    pub step: f64,
    /// Quantity reported in the value column.
    #[arg(long, value_enum, default_value = "p-so")]
    pub metric: Metric,
    /// Add the large-n_s asymptotic column (analytic mode only).
    #[arg(long)]
    pub asymptotic: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Rb,
    Re,
    TauBDb,
    TauEDb,
    BetaS,
    BetaR,
    Lambda,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    PTo,
    PSo,
    TS,
}

/// Flags shared by every subcommand; all optional so that scenario defaults
/// and config files can fill them.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Flat key=value file mirroring these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path (default <subcommand>.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed of all Monte Carlo streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker-thread cap for concurrent sweep points.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Relative tolerance of the secrecy quadratures.
    #[arg(long, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    /// Secrecy outage constraint level for optimization.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Points per power-split axis in the joint optimization grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Simulation disk radius override (Monte Carlo).
    #[arg(long, allow_negative_numbers = true)]
    pub r_sim: Option<f64>,

    #[arg(long)]
    pub ns: Option<usize>,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub nd: Option<usize>,
    #[arg(long)]
    pub ne: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d_sr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d_rd: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2_d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2_i1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2_i2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rb: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_r: Option<f64>,

    /// Average main-link SNR(s) in dB; sets p_s and p_r against unit noise
    /// (figure presets use one value per curve).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gbar_db: Option<Vec<f64>>,
    /// Average eavesdropper SNR(s) in dB at the reference distance; scales
    /// the eavesdropper noise variances.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gbar_e_db: Option<Vec<f64>>,
}
