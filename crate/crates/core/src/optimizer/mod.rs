//! Unconstrained quasi-Newton minimization with mesh continuation, and the
//! solvers for the rectangle and quarter-disk problems.
//!
//! The minimizer is a dense-inverse-Hessian BFGS iteration with a strong
//! Wolfe line search. Problems are discretized on a uniform angular grid;
//! the mesh schedule solves on progressively finer grids, warm-starting
//! each stage from the interpolated minimizer of the previous one.

mod bfgs;
mod grad_check;
mod newton;
mod quarter;
mod rectangle;

pub use bfgs::{minimize_bfgs, FdObjective, MinimizeResult, Objective};
pub use grad_check::grad_check;
pub use newton::{polish, polish_with, PolishDiagnostics};
pub use quarter::{solve_quarter, QuarterObjective};
pub use rectangle::{solve_rectangle, RectangleObjective};

use crate::error::Error;
use crate::fields::{ParabolicArcFit, RadialProfile};
use crate::functionals::EnergyBreakdown;
use crate::Result;

/// Line search used inside BFGS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSearch {
    /// Strong Wolfe conditions with parameters 0 < c1 < c2 < 1.
    StrongWolfe { c1: f64, c2: f64 },
    /// Bisection refinement of the directional derivative to high accuracy.
    /// Exact on quadratics; used by the conjugacy tests.
    ExactBisection,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch::StrongWolfe { c1: 1e-4, c2: 0.9 }
    }
}

/// How gradients of the discretized functionals are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMode {
    /// Hand-derived analytic expressions (validated by [`grad_check`]).
    #[default]
    Analytic,
    /// Central finite differences of the objective (fallback mode).
    FiniteDifference,
}

/// First-stage initial guess.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialGuess {
    /// Problem default: ρ ≡ L for the rectangle, u ≡ ln 2 (ρ = 1/2) for
    /// the quarter disk.
    #[default]
    ProblemDefault,
    /// Constant profile in the problem's working variable (ρ for the
    /// rectangle, u for the quarter disk).
    Constant(f64),
    /// Problem default plus uniform noise from `[-amplitude, amplitude]`,
    /// drawn with the given seed.
    Random { seed: u64, amplitude: f64 },
    /// Explicit starting profile, resampled onto each mesh.
    Explicit(RadialProfile),
}

/// Solver configuration shared by both problems.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Strictly increasing mesh sizes; each stage warm-starts from the
    /// previous solution.
    pub mesh_schedule: Vec<usize>,
    /// Convergence threshold on the gradient inf-norm.
    pub grad_tol: f64,
    /// Iteration cap per mesh stage.
    pub max_iters: usize,
    pub line_search: LineSearch,
    pub initial_guess: InitialGuess,
    pub grad_mode: GradientMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mesh_schedule: vec![50, 60, 70, 80, 90, 100],
            grad_tol: 1e-8,
            max_iters: 2000,
            line_search: LineSearch::default(),
            initial_guess: InitialGuess::default(),
            grad_mode: GradientMode::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mesh_schedule.is_empty() {
            return Err(Error::param("mesh_schedule", "schedule must be non-empty"));
        }
        if self.mesh_schedule.iter().any(|m| *m < 3) {
            return Err(Error::param(
                "mesh_schedule",
                "meshes need at least 3 points",
            ));
        }
        if !self.mesh_schedule.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::param(
                "mesh_schedule",
                "schedule must be strictly increasing",
            ));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::param(
                "grad_tol",
                "gradient tolerance must be positive",
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "iteration cap must be positive"));
        }
        if let LineSearch::StrongWolfe { c1, c2 } = self.line_search {
            if !(0.0 < c1 && c1 < c2 && c2 < 1.0) {
                return Err(Error::param(
                    "line_search",
                    format!("Wolfe parameters need 0 < c1 < c2 < 1, got c1 = {c1}, c2 = {c2}"),
                ));
            }
        }
        if let InitialGuess::Random { amplitude, .. } = self.initial_guess {
            if !(amplitude >= 0.0) || !amplitude.is_finite() {
                return Err(Error::param(
                    "initial_guess",
                    "noise amplitude must be nonnegative",
                ));
            }
        }
        Ok(())
    }
}

/// Per-mesh-stage convergence diagnostics.
#[derive(Debug, Clone)]
pub struct StageDiagnostics {
    pub m: usize,
    pub iterations: usize,
    pub func_evals: usize,
    pub grad_evals: usize,
    pub converged: bool,
    pub final_grad_norm: f64,
    pub fallback_steps: usize,
    /// Newton refinement that follows the quasi-Newton iteration.
    pub polish: Option<PolishDiagnostics>,
}

/// Result of a rectangle or quarter-disk solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Converged profile in the ρ representation, on the final mesh.
    pub profile: RadialProfile,
    /// Energy breakdown at the converged profile (the rectangle problem has
    /// no elastic or boundary term; its interior entry is the exact,
    /// unregularized jump energy).
    pub breakdown: EnergyBreakdown,
    /// One entry per mesh stage.
    pub stages: Vec<StageDiagnostics>,
    /// Gradient inf-norm on the final stage.
    pub final_grad_norm: f64,
    /// Whether every stage met the gradient tolerance.
    pub converged: bool,
    /// Quarter problem: whether ρ < 1 everywhere (recorded, not enforced).
    pub admissible: Option<bool>,
    /// Quarter problem: two-parabola fit of the converged curve.
    pub fit: Option<ParabolicArcFit>,
    /// Rectangle problem: L∞ distance to the closed-form minimizer.
    pub closed_form_linf: Option<f64>,
    /// Rectangle problem: L¹ distance to the closed-form minimizer.
    pub closed_form_l1: Option<f64>,
    /// Working variable of the optimization ("rho" or "u").
    pub representation: &'static str,
    /// Regularization actually used inside the optimizer objective.
    pub objective_epsilon: f64,
    /// Whether the final gradient norm belongs to a split-precision
    /// refinement of the reported (rounded) profile.
    pub sub_ulp_refined: bool,
    /// Configuration echo for reproducibility.
    pub config: SolverConfig,
}

impl SolveReport {
    /// Mean radius of the converged profile.
    pub fn mean_rho(&self) -> f64 {
        self.profile.mean_rho()
    }
}

/// Decade rungs from the quasi-Newton smoothing floor down to the target
/// regularization. Each rung keeps the previous minimizer inside the next
/// rung's Newton basin; a zero target is approached through 1e−14.
pub(crate) fn epsilon_ladder(eps_start: f64, target: f64) -> Vec<f64> {
    if target >= eps_start {
        return vec![target];
    }
    let mut rungs = Vec::new();
    let mut e = eps_start;
    while e * 0.1 > target.max(1e-14) {
        e *= 0.1;
        rungs.push(e);
    }
    rungs.push(target);
    rungs
}

/// Linear resampling of grid samples onto a finer uniform grid with the
/// same span.
pub(crate) fn resample_linear(values: &[f64], m_new: usize) -> Vec<f64> {
    let m_old = values.len();
    if m_old == m_new {
        return values.to_vec();
    }
    let mut out = Vec::with_capacity(m_new);
    for j in 0..m_new {
        let t = j as f64 * (m_old - 1) as f64 / (m_new - 1) as f64;
        let k = (t.floor() as usize).min(m_old - 2);
        let frac = t - k as f64;
        out.push(values[k] * (1.0 - frac) + values[k + 1] * frac);
    }
    out
}
