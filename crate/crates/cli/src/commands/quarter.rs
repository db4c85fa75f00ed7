//! `quarter`: minimize the quarter-disk total energy with mesh
//! continuation and compare the jump set with the two-parabola curve.

use super::common::{resolve_solver, CliError, CmdResult, Outcome, ReportJson, SolverDefaults};
use crate::args::QuarterArgs;
use crate::config_file::ConfigFile;
use crate::output::{fmt_f64, prepare_out_dir, write_csv, write_json, OutDir, RunMetadata};
use smectic_core::fields::two_arc_x1;
use smectic_core::optimizer::{solve_quarter, SolveReport};
use std::path::PathBuf;

pub fn quarter_schedule(args: &QuarterArgs, file: &ConfigFile) -> Result<Vec<usize>, CliError> {
    let m_start = file
        .resolve(args.m_start, "m-start", 50usize)
        .map_err(CliError::Usage)?;
    let m_end = file
        .resolve(args.m_end, "m-end", 100usize)
        .map_err(CliError::Usage)?;
    let m_step = file
        .resolve(args.m_step, "m-step", 10usize)
        .map_err(CliError::Usage)?;
    if m_step == 0 {
        return Err(CliError::usage("m-step must be positive"));
    }
    if m_end < m_start {
        return Err(CliError::usage("m-end must not be below m-start"));
    }
    let mut schedule: Vec<usize> = (m_start..=m_end).step_by(m_step).collect();
    if *schedule.last().unwrap() != m_end {
        schedule.push(m_end);
    }
    Ok(schedule)
}

pub fn write_quarter_outputs(
    out: &OutDir,
    report: &SolveReport,
    meta: &RunMetadata,
) -> Result<(), CliError> {
    let profile = &report.profile;
    let mut profile_rows = Vec::with_capacity(profile.len());
    let mut jumpset_rows = Vec::with_capacity(profile.len());
    for (j, rho) in profile.rho_samples().iter().enumerate() {
        let theta = profile.theta(j);
        profile_rows.push(vec![fmt_f64(theta), fmt_f64(*rho)]);
        jumpset_rows.push(vec![fmt_f64(rho * theta.cos()), fmt_f64(rho * theta.sin())]);
    }
    write_csv(&out.path("profile.csv"), &["theta", "rho"], profile_rows)?;
    write_csv(&out.path("jumpset.csv"), &["x1", "x2"], jumpset_rows)?;

    if let Some(fit) = &report.fit {
        let n = 401;
        let rows = (0..n).map(|k| {
            let x2 = 0.5 * fit.b * k as f64 / (n - 1) as f64;
            vec![fmt_f64(two_arc_x1(fit.a, fit.b, x2)), fmt_f64(x2)]
        });
        write_csv(&out.path("fitted_arcs.csv"), &["x1", "x2"], rows)?;
    }
    write_json(
        &out.path("energy.json"),
        &super::common::EnergyJson::from(&report.breakdown),
    )?;
    write_json(&out.path("report.json"), &ReportJson::from(report))?;
    write_json(&out.path("metadata.json"), meta)?;
    Ok(())
}

pub fn run(args: &QuarterArgs) -> CmdResult {
    let file = match &args.io.config {
        Some(path) => ConfigFile::load(path).map_err(CliError::Usage)?,
        None => ConfigFile::default(),
    };
    let schedule = quarter_schedule(args, &file)?;
    let out_dir = file
        .resolve(args.io.out.clone(), "out", PathBuf::from("runs/quarter"))
        .map_err(CliError::Usage)?;

    let mut meta = RunMetadata::new("quarter");
    let resolved = resolve_solver(
        &args.solver,
        &file,
        SolverDefaults {
            k1: 2.0,
            mu: 1.0,
            alpha: 0.5,
            epsilon: 1e-12,
        },
        schedule,
        &mut meta,
    )?;

    let report = solve_quarter(&resolved.params, &resolved.config, resolved.form)
        .map_err(|e| CliError::Failure(e.to_string()))?;

    let out = prepare_out_dir(&out_dir)?;
    write_quarter_outputs(&out, &report, &meta)?;

    let fit = report.fit.as_ref().expect("quarter reports carry a fit");
    println!(
        "quarter: converged {} | gradient inf-norm {:.3e} | energy {:.8} (elastic {:.6}, interior {:.6}, boundary {:.6})",
        report.converged,
        report.final_grad_norm,
        report.breakdown.total,
        report.breakdown.elastic,
        report.breakdown.jump_interior,
        report.breakdown.jump_boundary,
    );
    println!(
        "quarter: two-parabola fit a = {:.6}, b = {:.6}, max deviation {:.3e} | admissible (rho < 1): {}",
        fit.a,
        fit.b,
        fit.max_deviation,
        report.admissible.unwrap_or(false),
    );
    println!("wrote {}", out.display());
    if report.converged {
        Ok(Outcome::Success)
    } else {
        eprintln!("quarter solve did not reach the gradient tolerance; diagnostics written");
        Ok(Outcome::NonConvergence)
    }
}
