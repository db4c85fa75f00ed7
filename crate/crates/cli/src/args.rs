//! Command-line definitions.
//!
//! Every numeric option is optional at the clap level; resolution order is
//! explicit flag, then `--config` file entry (same key without dashes),
//! then the built-in default. Angles are taken in degrees on the command
//! line and converted to radians internally.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "smectic",
    version,
    about = "Jump-energy densities and minimizing layer configurations for smectic-A wall defects"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Tabulate the singular and envelope jump densities over a grid of
    /// interface normals
    Density(DensityArgs),
    /// Minimize the rectangle jump energy and compare with the closed-form
    /// parabola
    Rectangle(RectangleArgs),
    /// Minimize the quarter-disk total energy with mesh continuation
    Quarter(QuarterArgs),
    /// Energies of sawtooth versus flat interfaces between two director
    /// fields
    Zigzag(ZigzagArgs),
    /// Probe BV-ellipticity with piecewise-constant competitor families
    Probe(ProbeArgs),
    /// Run the four-panel quarter-disk sweep (μ × α)
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryFormArg {
    Pointwise,
    Integral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GArg {
    /// g(θ) = 1 − 2θ/π
    Linear,
    /// g(θ) = cos θ
    Cosine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    /// Constant first-stage guess (see --init-value)
    Constant,
    /// Problem default plus seeded uniform noise (see --seed,
    /// --init-amplitude)
    Random,
    /// Resample a profile CSV (see --init-file)
    File,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradModeArg {
    /// Hand-derived analytic gradients (default)
    Analytic,
    /// Central finite differences of the objective
    Fd,
}

/// Options shared by the minimization commands.
#[derive(Args, Clone)]
pub struct SolverArgs {
    /// Elastic constant K₁
    #[arg(long = "K1")]
    pub k1: Option<f64>,
    /// Jump energy scale μ
    #[arg(long)]
    pub mu: Option<f64>,
    /// Jump exponent α, strictly between 0 and 1
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Regularization ε of the interior jump integrand
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Convergence threshold on the gradient inf-norm
    #[arg(long)]
    pub grad_tol: Option<f64>,
    /// Iteration cap per mesh stage
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Boundary jump term form (quarter problem)
    #[arg(long, value_enum)]
    pub boundary_form: Option<BoundaryFormArg>,
    /// Weight function of the integral boundary form
    #[arg(long, value_enum)]
    pub g: Option<GArg>,
    /// First-stage initial guess
    #[arg(long, value_enum)]
    pub init: Option<InitArg>,
    /// Constant value for --init constant (ρ for rectangle, u for quarter)
    #[arg(long)]
    pub init_value: Option<f64>,
    /// Noise amplitude for --init random
    #[arg(long)]
    pub init_amplitude: Option<f64>,
    /// Profile CSV for --init file (theta,value rows; value column is ρ)
    #[arg(long)]
    pub init_file: Option<PathBuf>,
    /// Seed for --init random
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gradient evaluation mode
    #[arg(long, value_enum)]
    pub grad_mode: Option<GradModeArg>,
}

/// Output and configuration-file options.
#[derive(Args, Clone)]
pub struct IoArgs {
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key = value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct DensityArgs {
    /// Director angle β₊ in degrees
    #[arg(long)]
    pub beta_plus: Option<f64>,
    /// Director angle β₋ in degrees
    #[arg(long)]
    pub beta_minus: Option<f64>,
    /// Jump exponent α
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of γ grid points over [0°, 180°]
    #[arg(long)]
    pub gamma_points: Option<usize>,
    /// Bisector tolerance of the singular density
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args)]
pub struct RectangleArgs {
    /// Half-width L of the rectangle
    #[arg(long = "L")]
    pub half_width: Option<f64>,
    /// Height H of the rectangle (must exceed L/2)
    #[arg(long = "H")]
    pub height: Option<f64>,
    /// Final mesh size
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args)]
pub struct QuarterArgs {
    /// First mesh of the continuation schedule
    #[arg(long)]
    pub m_start: Option<usize>,
    /// Final mesh of the continuation schedule
    #[arg(long)]
    pub m_end: Option<usize>,
    /// Mesh increment between stages
    #[arg(long)]
    pub m_step: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args)]
pub struct ZigzagArgs {
    /// Base length of the interface
    #[arg(long)]
    pub b: Option<f64>,
    /// Jump energy scale μ
    #[arg(long)]
    pub mu: Option<f64>,
    /// Jump exponent α
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated tooth counts (0 rows are skipped; the flat
    /// interface is always included)
    #[arg(long)]
    pub teeth: Option<String>,
    /// Director angle β₊ in degrees (above the interface)
    #[arg(long)]
    pub beta_plus: Option<f64>,
    /// Director angle β₋ in degrees (below the interface)
    #[arg(long)]
    pub beta_minus: Option<f64>,
    /// Bisector tolerance of the singular density
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args)]
pub struct ProbeArgs {
    /// Director angle β₊ in degrees
    #[arg(long)]
    pub beta_plus: Option<f64>,
    /// Director angle β₋ in degrees
    #[arg(long)]
    pub beta_minus: Option<f64>,
    /// Interface normal angle γ in degrees
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Jump energy scale μ
    #[arg(long)]
    pub mu: Option<f64>,
    /// Jump exponent α
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Bisector tolerance of the singular density
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Comma-separated μ values
    #[arg(long)]
    pub mu_list: Option<String>,
    /// Comma-separated α values
    #[arg(long)]
    pub alpha_list: Option<String>,
    #[command(flatten)]
    pub quarter: QuarterArgs,
}
