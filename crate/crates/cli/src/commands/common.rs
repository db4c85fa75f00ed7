//! Shared resolution of solver options and report serialization.

use crate::args::{BoundaryFormArg, GArg, GradModeArg, InitArg, SolverArgs};
use crate::config_file::ConfigFile;
use crate::output::RunMetadata;
use serde::Serialize;
use smectic_core::fields::RadialProfile;
use smectic_core::functionals::{BoundaryTermForm, EnergyBreakdown, GWeight, ModelParams};
use smectic_core::jump_energy::Alpha;
use smectic_core::optimizer::{GradientMode, InitialGuess, LineSearch, SolveReport, SolverConfig};
use std::path::PathBuf;

/// Command outcome mapped to the process exit code.
pub enum Outcome {
    Success,
    NonConvergence,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values, or parameter ranges (exit code 2).
    Usage(String),
    /// I/O or internal failure (exit code 1).
    Failure(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

pub type CmdResult = Result<Outcome, CliError>;

pub fn usage_err(e: smectic_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Per-problem defaults for the shared solver options.
pub struct SolverDefaults {
    pub k1: f64,
    pub mu: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

pub struct ResolvedSolver {
    pub params: ModelParams,
    pub config: SolverConfig,
    pub form: BoundaryTermForm,
}

/// Applies flag > config file > default precedence and validates ranges.
/// The resolved values are recorded in the metadata.
pub fn resolve_solver(
    args: &SolverArgs,
    file: &ConfigFile,
    defaults: SolverDefaults,
    mesh_schedule: Vec<usize>,
    meta: &mut RunMetadata,
) -> Result<ResolvedSolver, CliError> {
    let k1 = file
        .resolve(args.k1, "K1", defaults.k1)
        .map_err(CliError::Usage)?;
    let mu = file
        .resolve(args.mu, "mu", defaults.mu)
        .map_err(CliError::Usage)?;
    let alpha_raw = file
        .resolve(args.alpha, "alpha", defaults.alpha)
        .map_err(CliError::Usage)?;
    let alpha = Alpha::new(alpha_raw).map_err(usage_err)?;
    let epsilon = file
        .resolve(args.epsilon, "epsilon", defaults.epsilon)
        .map_err(CliError::Usage)?;
    let params = ModelParams::new(k1, mu, alpha, epsilon).map_err(usage_err)?;

    let grad_tol = file
        .resolve(args.grad_tol, "grad-tol", 1e-8)
        .map_err(CliError::Usage)?;
    let max_iters = file
        .resolve(args.max_iters, "max-iters", 2000)
        .map_err(CliError::Usage)?;

    let form_arg = match args.boundary_form {
        Some(f) => f,
        None => match file.get("boundary-form") {
            Some("pointwise") => BoundaryFormArg::Pointwise,
            Some("integral") | None => BoundaryFormArg::Integral,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "config key `boundary-form`: expected pointwise or integral, got `{other}`"
                )))
            }
        },
    };
    let g_arg = match args.g {
        Some(g) => g,
        None => match file.get("g") {
            Some("cosine") => GArg::Cosine,
            Some("linear") | None => GArg::Linear,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "config key `g`: expected linear or cosine, got `{other}`"
                )))
            }
        },
    };
    let g_weight = match g_arg {
        GArg::Linear => GWeight::Linear,
        GArg::Cosine => GWeight::Cosine,
    };
    let form = match form_arg {
        BoundaryFormArg::Pointwise => BoundaryTermForm::Pointwise,
        BoundaryFormArg::Integral => BoundaryTermForm::Integral(g_weight),
    };

    let init_arg = match args.init {
        Some(i) => Some(i),
        None => match file.get("init") {
            Some("constant") => Some(InitArg::Constant),
            Some("random") => Some(InitArg::Random),
            Some("file") => Some(InitArg::File),
            Some(other) => {
                return Err(CliError::usage(format!(
                    "config key `init`: expected constant, random or file, got `{other}`"
                )))
            }
            None => None,
        },
    };
    let seed = file
        .resolve(args.seed, "seed", 0u64)
        .map_err(CliError::Usage)?;
    let initial_guess = match init_arg {
        None => InitialGuess::ProblemDefault,
        Some(InitArg::Constant) => {
            let value = file
                .resolve_opt(args.init_value, "init-value")
                .map_err(CliError::Usage)?
                .ok_or_else(|| CliError::usage("--init constant requires --init-value"))?;
            InitialGuess::Constant(value)
        }
        Some(InitArg::Random) => {
            let amplitude = file
                .resolve(args.init_amplitude, "init-amplitude", 0.3)
                .map_err(CliError::Usage)?;
            InitialGuess::Random { seed, amplitude }
        }
        Some(InitArg::File) => {
            let path: PathBuf = match &args.init_file {
                Some(p) => p.clone(),
                None => file
                    .get("init-file")
                    .map(PathBuf::from)
                    .ok_or_else(|| CliError::usage("--init file requires --init-file"))?,
            };
            InitialGuess::Explicit(read_profile_csv(&path)?)
        }
    };

    let grad_mode = match args.grad_mode {
        Some(GradModeArg::Fd) => GradientMode::FiniteDifference,
        Some(GradModeArg::Analytic) => GradientMode::Analytic,
        None => match file.get("grad-mode") {
            Some("fd") => GradientMode::FiniteDifference,
            Some("analytic") | None => GradientMode::Analytic,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "config key `grad-mode`: expected analytic or fd, got `{other}`"
                )))
            }
        },
    };

    if epsilon == 0.0 {
        eprintln!(
            "warning: epsilon = 0 leaves the jump integrand non-differentiable \
             where the bisector mismatch vanishes; minimization may not reach \
             tight gradient tolerances"
        );
    }

    let config = SolverConfig {
        mesh_schedule,
        grad_tol,
        max_iters,
        line_search: LineSearch::default(),
        initial_guess,
        grad_mode,
    };
    config.validate().map_err(usage_err)?;

    meta.set("K1", k1);
    meta.set("mu", mu);
    meta.set("alpha", alpha_raw);
    meta.set("epsilon", epsilon);
    meta.set("grad_tol", grad_tol);
    meta.set("max_iters", max_iters);
    meta.set(
        "boundary_form",
        match form {
            BoundaryTermForm::Pointwise => "pointwise".to_string(),
            BoundaryTermForm::Integral(GWeight::Linear) => "integral(linear)".to_string(),
            BoundaryTermForm::Integral(GWeight::Cosine) => "integral(cosine)".to_string(),
        },
    );
    meta.set("seed", seed);
    meta.set(
        "init",
        match &config.initial_guess {
            InitialGuess::ProblemDefault => "problem-default".to_string(),
            InitialGuess::Constant(c) => format!("constant({c})"),
            InitialGuess::Random { seed, amplitude } => {
                format!("random(seed {seed}, amplitude {amplitude})")
            }
            InitialGuess::Explicit(_) => "file".to_string(),
        },
    );
    meta.set(
        "grad_mode",
        match grad_mode {
            GradientMode::Analytic => "analytic",
            GradientMode::FiniteDifference => "fd",
        },
    );
    meta.set("mesh_schedule", format!("{:?}", config.mesh_schedule));
    meta.set("line_search", "strong Wolfe (c1 = 1e-4, c2 = 0.9)");

    Ok(ResolvedSolver {
        params,
        config,
        form,
    })
}

/// Reads a two-column (theta, rho) CSV written by this tool.
fn read_profile_csv(path: &std::path::Path) -> Result<RadialProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))?;
    let mut thetas = Vec::new();
    let mut rhos = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let mut cols = line.split(',');
        let (Some(t), Some(r)) = (cols.next(), cols.next()) else {
            return Err(CliError::usage(format!(
                "{}: line {} needs at least two columns",
                path.display(),
                i + 1
            )));
        };
        thetas.push(
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        );
        rhos.push(
            r.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        );
    }
    if thetas.len() < 3 {
        return Err(CliError::usage(format!(
            "{}: profile needs at least 3 rows",
            path.display()
        )));
    }
    RadialProfile::from_rho(thetas[0], *thetas.last().unwrap(), rhos).map_err(usage_err)
}

#[derive(Serialize)]
pub struct EnergyJson {
    pub elastic: f64,
    pub jump_interior: f64,
    pub jump_boundary: f64,
    pub total: f64,
}

impl From<&EnergyBreakdown> for EnergyJson {
    fn from(b: &EnergyBreakdown) -> Self {
        EnergyJson {
            elastic: b.elastic,
            jump_interior: b.jump_interior,
            jump_boundary: b.jump_boundary,
            total: b.total,
        }
    }
}

#[derive(Serialize)]
pub struct StageJson {
    pub mesh: usize,
    pub iterations: usize,
    pub func_evals: usize,
    pub grad_evals: usize,
    pub converged: bool,
    pub final_grad_norm: f64,
    pub fallback_steps: usize,
    pub polish_steps: usize,
}

#[derive(Serialize)]
pub struct FitJson {
    pub a: f64,
    pub b: f64,
    pub max_deviation: f64,
}

#[derive(Serialize)]
pub struct ReportJson {
    pub converged: bool,
    pub final_grad_norm: f64,
    pub representation: &'static str,
    pub objective_epsilon: f64,
    pub sub_ulp_refined: bool,
    pub mean_rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_linf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_l1: Option<f64>,
    pub energy: EnergyJson,
    pub stages: Vec<StageJson>,
}

impl From<&SolveReport> for ReportJson {
    fn from(r: &SolveReport) -> Self {
        ReportJson {
            converged: r.converged,
            final_grad_norm: r.final_grad_norm,
            representation: r.representation,
            objective_epsilon: r.objective_epsilon,
            sub_ulp_refined: r.sub_ulp_refined,
            mean_rho: r.mean_rho(),
            admissible: r.admissible,
            fit: r.fit.as_ref().map(|f| FitJson {
                a: f.a,
                b: f.b,
                max_deviation: f.max_deviation,
            }),
            closed_form_linf: r.closed_form_linf,
            closed_form_l1: r.closed_form_l1,
            energy: EnergyJson::from(&r.breakdown),
            stages: r
                .stages
                .iter()
                .map(|s| StageJson {
                    mesh: s.m,
                    iterations: s.iterations,
                    func_evals: s.func_evals,
                    grad_evals: s.grad_evals,
                    converged: s.converged,
                    final_grad_norm: s.final_grad_norm,
                    fallback_steps: s.fallback_steps,
                    polish_steps: s.polish.as_ref().map(|p| p.steps).unwrap_or(0),
                })
                .collect(),
        }
    }
}

/// Parses a comma-separated list of values.
pub fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| CliError::usage(format!("cannot parse {what} entry `{s}`")))
        })
        .collect()
}
