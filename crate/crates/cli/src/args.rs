use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use relacc::empirics::{OneStepScheme, QuadratureRule};

/// Probability that one approximation method is more accurate than another,
/// exported as CSV.
#[derive(Debug, Parser)]
#[command(name = "relacc", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability curve P(h) over a mesh-size range
    Curve(CurveArgs),
    /// Density of the error difference for fixed bounds
    Density(DensityArgs),
    /// Monte Carlo estimate of the head probability
    Mc(McArgs),
    /// Fit model constants from two error series
    Calibrate(CalibrateArgs),
    /// Generate an error series from a built-in convergence study
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Log,
}

impl From<SpacingArg> for relacc::Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Linear => relacc::Spacing::Linear,
            SpacingArg::Log => relacc::Spacing::Log,
        }
    }
}

impl SpacingArg {
    pub fn name(self) -> &'static str {
        match self {
            SpacingArg::Linear => "linear",
            SpacingArg::Log => "log",
        }
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Degree of the first method
    #[arg(long)]
    pub k1: u32,
    /// Degree of the second method (must exceed --k1)
    #[arg(long)]
    pub k2: u32,
    /// Sobolev order of the error norm
    #[arg(long)]
    pub m: u32,
    /// Lebesgue exponent of the error norm (recorded, not used in formulas)
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub hmin: Option<f64>,
    #[arg(long)]
    pub hmax: Option<f64>,
    /// Number of grid points (kinks are added on top)
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Linear)]
    pub spacing: SpacingArg,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("cap").required(true).args(["lambda", "legacy"])))]
pub struct CurveArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub c1: f64,
    #[arg(long)]
    pub c2: f64,
    /// Cap on both errors
    #[arg(long)]
    pub lambda: Option<f64>,
    /// No cap
    #[arg(long)]
    pub legacy: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub beta1: f64,
    #[arg(long)]
    pub beta2: f64,
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub beta1: f64,
    #[arg(long)]
    pub beta2: f64,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker streams; the estimate does not depend on this
    #[arg(long, default_value_t = 1)]
    pub streams: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Given,
    Infinite,
    Plateau,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// `h,err` series of the first method
    #[arg(long = "in")]
    pub input: PathBuf,
    /// `h,err` series of the second method
    #[arg(long = "in2")]
    pub input2: PathBuf,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = PolicyArg::Plateau)]
    pub lambda_policy: PolicyArg,
    /// Cap used with `--lambda-policy given`
    #[arg(long, required_if_eq("lambda_policy", "given"))]
    pub lambda: Option<f64>,
    /// Also write the fitted parameters here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the calibrated probability curve here
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fem,
    Quad,
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OdeErrorArg {
    Defect,
    Global,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub preset: String,
    /// Finite element degree
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Sobolev order of the finite element error norm
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// midpoint, trapezoid or simpson
    #[arg(long, default_value = "simpson")]
    pub rule: QuadratureRule,
    /// euler, heun or rk4
    #[arg(long, default_value = "rk4")]
    pub scheme: OneStepScheme,
    #[arg(long, value_enum, default_value_t = OdeErrorArg::Global)]
    pub error: OdeErrorArg,
    /// Comma-separated mesh sizes; defaults to a halving sequence
    #[arg(long, value_delimiter = ',')]
    pub h: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}
