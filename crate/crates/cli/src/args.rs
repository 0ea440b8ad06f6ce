use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "blowup", version, about = "Lifespan bounds and blow-up simulations for u_tt - Δu = |u|^p")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for randomized sample sets.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strauss exponent, γ(n, p) and the predicted lifespan law.
    Exponents(ExponentsArgs),
    /// Constants of the slicing iteration, ε_0 and the lifespan upper bound.
    Bound(BoundArgs),
    /// Check one step of the slicing iteration by quadrature.
    VerifyStep(VerifyStepArgs),
    /// Run the finite-difference solver once.
    Simulate(SimulateArgs),
    /// Run an ε-sweep described by a TOML file.
    Sweep(SweepArgs),
    /// Fit a scaling law to sweep records.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub n: u32,
    /// Power; defaults to p_0(n) for n ≥ 2.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: u32,
    /// Must equal p_0(n); defaults to it.
    #[arg(long)]
    pub p: Option<f64>,
    /// Defaults to R/8 for the data profile.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Lemma constant M.
    #[arg(long = "m", visible_alias = "M", conflicts_with = "estimate_m")]
    pub m: Option<f64>,
    /// Estimate M by quadrature on the default grid (the default when --m is absent).
    #[arg(long = "estimate-m", visible_alias = "estimate-M")]
    pub estimate_m: bool,
    /// Data profile `g0,R,m` for the M estimate.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyStepArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub j: u32,
    /// Number of random sample points in Σ_{j+1} (at least 3); the fixed
    /// default set is used when absent.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0.125)]
    pub delta: f64,
    /// The check does not depend on M or ε; they only label the verdict.
    #[arg(long = "m", visible_alias = "M", default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.5)]
    pub courant: f64,
    #[arg(long, default_value_t = 1e10)]
    pub cap: f64,
    #[arg(long = "tmax", default_value_t = 200.0)]
    pub t_max: f64,
    /// Switch the nonlinearity off.
    #[arg(long)]
    pub linear: bool,
    /// Bump profile `g0,R,m` for g.
    #[arg(long)]
    pub profile: Option<String>,
    /// Cell-centred radial grid instead of a node at the origin.
    #[arg(long)]
    pub staggered: bool,
    /// Halve dx this many times.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    #[arg(long, default_value_t = 10)]
    pub trace_stride: usize,
    /// Write the (t, max|u|) series as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Power,
    Critical,
    LogA,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: Model,
    /// `n,p,moment` for the prediction; read from the records when absent.
    #[arg(long)]
    pub predicted_from: Option<String>,
    /// Relative tolerance (power, log-a) or r² threshold (critical).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Export the fitted points as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
