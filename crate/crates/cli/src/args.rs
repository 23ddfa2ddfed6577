use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "strict-epi", version, about = "Decide whether the epigraph of a function is strictly convex")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one function on an open domain.
    Analyze(AnalyzeArgs),
    /// Affine hull of the points in a CSV file.
    Hull(HullArgs),
    /// Run every engine over a corpus and compare the verdicts.
    Crosscheck(CrosscheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    MainTheorem,
    Oracle,
    Lines,
    All,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::MainTheorem => "main-theorem",
            Mode::Oracle => "oracle",
            Mode::Lines => "lines",
            Mode::All => "all",
        }
    }
}

/// Flags shared by the engine-driving subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct EngineArgs {
    /// Sample size k for the analytic checks [default: 1000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Number of sampled lines for the line engine [default: 64]
    #[arg(long)]
    pub lines: Option<usize>,
    /// Segment trials for the epigraph oracle [default: 2000]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Random seed [default: 42]; STRICT_EPI_SEED overrides it
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Emit JSON instead of the text report
    #[arg(long)]
    pub json: bool,
    /// Record wall time in the report
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ToleranceArgs {
    /// Relative rank cutoff for affine hulls
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Affine membership residual
    #[arg(long)]
    pub tol_aff: Option<f64>,
    /// Orthonormality tolerance
    #[arg(long)]
    pub tol_orth: Option<f64>,
    /// Strict constraint margin
    #[arg(long)]
    pub tol_strict: Option<f64>,
    /// Strict-convexity gap coefficient
    #[arg(long)]
    pub tol_sc: Option<f64>,
    /// Relative equality tolerance
    #[arg(long)]
    pub tol_eq: Option<f64>,
    /// Relative-interior probe radius
    #[arg(long)]
    pub probe_radius: Option<f64>,
    /// Value an approach ladder must reach to count as blow-up
    #[arg(long)]
    pub blowup_threshold: Option<f64>,
    /// Height cap for boundary columns
    #[arg(long)]
    pub height_cap: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Expression in x, y, z (or x1, x2, ...)
    #[arg(long)]
    pub function: Option<String>,
    /// Number of variables
    #[arg(long)]
    pub dim: Option<usize>,
    /// Semicolon-separated constraints g, each meaning g < 0
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Sampling box lo:hi,...; lo == hi pins a coordinate [default: -10:10 each]
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Which engines to run [default: all]
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct HullArgs {
    /// One point per line, comma-separated coordinates
    #[arg(long)]
    pub csv: PathBuf,
    /// Emit JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CrosscheckArgs {
    /// Corpus file [default: the built-in corpus]
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}
