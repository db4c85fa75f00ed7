//! `sweep`: the four-panel μ × α sweep of the quarter problem, run
//! concurrently with one output directory per panel.

use super::common::{parse_list, resolve_solver, CliError, CmdResult, Outcome, SolverDefaults};
use super::quarter::{quarter_schedule, write_quarter_outputs};
use crate::args::SweepArgs;
use crate::config_file::ConfigFile;
use crate::output::{prepare_out_dir, write_json, RunMetadata};
use serde::Serialize;
use smectic_core::functionals::ModelParams;
use smectic_core::optimizer::solve_quarter;
use std::path::PathBuf;

#[derive(Serialize, Clone)]
struct PanelSummary {
    mu: f64,
    alpha: f64,
    directory: String,
    converged: bool,
    final_grad_norm: f64,
    mean_rho: f64,
    fit_deviation: f64,
    total_energy: f64,
}

#[derive(Serialize)]
struct SweepSummary {
    panels: Vec<PanelSummary>,
    /// Mean radius strictly decreases when μ grows, at every fixed α.
    shrinks_with_mu: bool,
    /// Largest α-induced change of the mean radius at fixed μ is smaller
    /// than the smallest μ-induced change at fixed α.
    alpha_effect_weaker_than_mu: bool,
}

fn panel_dir_name(mu: f64, alpha: f64) -> String {
    format!("mu{mu}_alpha{alpha}")
}

pub fn run(args: &SweepArgs) -> CmdResult {
    let file = match &args.quarter.io.config {
        Some(path) => ConfigFile::load(path).map_err(CliError::Usage)?,
        None => ConfigFile::default(),
    };
    let mu_raw = file
        .resolve(args.mu_list.clone(), "mu-list", "1,2".to_string())
        .map_err(CliError::Usage)?;
    let alpha_raw = file
        .resolve(args.alpha_list.clone(), "alpha-list", "0.2,0.5".to_string())
        .map_err(CliError::Usage)?;
    let mus: Vec<f64> = parse_list(&mu_raw, "mu-list")?;
    let alphas: Vec<f64> = parse_list(&alpha_raw, "alpha-list")?;
    if mus.is_empty() || alphas.is_empty() {
        return Err(CliError::usage("mu-list and alpha-list must be non-empty"));
    }
    let schedule = quarter_schedule(&args.quarter, &file)?;
    let out_dir = file
        .resolve(
            args.quarter.io.out.clone(),
            "out",
            PathBuf::from("runs/sweep"),
        )
        .map_err(CliError::Usage)?;
    let out = prepare_out_dir(&out_dir)?;

    // Resolve the shared solver options once per panel (μ and α vary).
    struct Panel {
        mu: f64,
        alpha: f64,
        params: ModelParams,
        meta: RunMetadata,
    }
    let mut panels = Vec::new();
    let mut resolved_form = None;
    let mut resolved_config = None;
    for &mu in &mus {
        for &alpha in &alphas {
            let mut meta = RunMetadata::new("sweep/quarter");
            let mut solver_args = args.quarter.solver.clone();
            solver_args.mu = Some(mu);
            solver_args.alpha = Some(alpha);
            let resolved = resolve_solver(
                &solver_args,
                &file,
                SolverDefaults {
                    k1: 2.0,
                    mu,
                    alpha,
                    epsilon: 1e-12,
                },
                schedule.clone(),
                &mut meta,
            )?;
            resolved_form = Some(resolved.form);
            resolved_config = Some(resolved.config.clone());
            panels.push(Panel {
                mu,
                alpha,
                params: resolved.params,
                meta,
            });
        }
    }
    let form = resolved_form.expect("at least one panel");
    let config = resolved_config.expect("at least one panel");

    // Independent solves run concurrently; each panel owns its directory.
    let results: Vec<Result<PanelSummary, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = panels
            .iter()
            .map(|panel| {
                let config = config.clone();
                let out = &out;
                scope.spawn(move || {
                    let report = solve_quarter(&panel.params, &config, form)
                        .map_err(|e| CliError::Failure(e.to_string()))?;
                    let dir_name = panel_dir_name(panel.mu, panel.alpha);
                    let panel_out = out.subdir(&dir_name)?;
                    write_quarter_outputs(&panel_out, &report, &panel.meta)?;
                    let fit = report.fit.as_ref().expect("quarter fit");
                    Ok(PanelSummary {
                        mu: panel.mu,
                        alpha: panel.alpha,
                        directory: dir_name,
                        converged: report.converged,
                        final_grad_norm: report.final_grad_norm,
                        mean_rho: report.mean_rho(),
                        fit_deviation: fit.max_deviation,
                        total_energy: report.breakdown.total,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("panel thread panicked"))
            .collect()
    });

    let mut summaries = Vec::new();
    for result in results {
        summaries.push(result?);
    }

    let mean_of = |mu: f64, alpha: f64| {
        summaries
            .iter()
            .find(|p| p.mu == mu && p.alpha == alpha)
            .map(|p| p.mean_rho)
    };
    let mut shrinks_with_mu = true;
    let mut max_alpha_effect = 0.0f64;
    let mut min_mu_effect = f64::INFINITY;
    for &alpha in &alphas {
        let means: Vec<f64> = mus.iter().filter_map(|&mu| mean_of(mu, alpha)).collect();
        for w in means.windows(2) {
            shrinks_with_mu &= w[1] < w[0];
            min_mu_effect = min_mu_effect.min((w[0] - w[1]).abs());
        }
    }
    for &mu in &mus {
        let means: Vec<f64> = alphas.iter().filter_map(|&a| mean_of(mu, a)).collect();
        for w in means.windows(2) {
            max_alpha_effect = max_alpha_effect.max((w[0] - w[1]).abs());
        }
    }
    let summary = SweepSummary {
        panels: summaries.clone(),
        shrinks_with_mu,
        alpha_effect_weaker_than_mu: max_alpha_effect < min_mu_effect,
    };
    write_json(&out.path("sweep_summary.json"), &summary)?;

    let mut meta = RunMetadata::new("sweep");
    meta.set("mu_list", &mu_raw);
    meta.set("alpha_list", &alpha_raw);
    meta.set("mesh_schedule", format!("{schedule:?}"));
    write_json(&out.path("metadata.json"), &meta)?;

    for p in &summaries {
        println!(
            "panel mu={} alpha={}: converged {} | mean rho {:.4} | fit deviation {:.3e}",
            p.mu, p.alpha, p.converged, p.mean_rho, p.fit_deviation
        );
    }
    println!(
        "mean radius shrinks with mu: {} | alpha effect weaker than mu effect: {}",
        summary.shrinks_with_mu, summary.alpha_effect_weaker_than_mu
    );
    println!("wrote {}", out.display());

    if summaries.iter().all(|p| p.converged) {
        Ok(Outcome::Success)
    } else {
        eprintln!("some panels did not converge; diagnostics written");
        Ok(Outcome::NonConvergence)
    }
}
