//! `probe`: BV-ellipticity probing report for both densities.

use super::common::{usage_err, CliError, CmdResult, Outcome};
use crate::args::ProbeArgs;
use crate::config_file::ConfigFile;
use crate::output::{prepare_out_dir, write_json, RunMetadata};
use serde::Serialize;
use smectic_core::bv_probe::{default_families, probe, ProbeReport, ProbeSetup};
use smectic_core::functionals::ModelParams;
use smectic_core::jump_energy::{Alpha, DensityKind, JumpCost};
use smectic_core::qtensor::{DirectorAngle, QTensor, UnitVector};
use std::path::PathBuf;

#[derive(Serialize)]
struct CompetitorJson {
    label: String,
    /// Energy, "inf", or null when the member is not representable inside
    /// the probe square.
    cost: Option<String>,
}

#[derive(Serialize)]
struct KindReportJson {
    density: &'static str,
    flat_cost: String,
    verdict: String,
    family_minimum: String,
    competitors: Vec<CompetitorJson>,
}

#[derive(Serialize)]
struct ProbeJson {
    singular: KindReportJson,
    envelope: KindReportJson,
}

fn cost_string(c: &JumpCost) -> String {
    match c {
        JumpCost::Finite(v) => crate::output::fmt_f64(*v),
        JumpCost::Infinite => "inf".into(),
    }
}

fn to_json(kind: &'static str, report: &ProbeReport) -> KindReportJson {
    KindReportJson {
        density: kind,
        flat_cost: cost_string(&report.flat_cost),
        verdict: match &report.beaten_by {
            Some(label) => format!("beaten_by({label})"),
            None => "flat_optimal_within_family".into(),
        },
        family_minimum: cost_string(&report.family_minimum),
        competitors: report
            .competitors
            .iter()
            .map(|c| CompetitorJson {
                label: c.label.clone(),
                cost: c.cost.as_ref().map(cost_string),
            })
            .collect(),
    }
}

pub fn run(args: &ProbeArgs) -> CmdResult {
    let file = match &args.io.config {
        Some(path) => ConfigFile::load(path).map_err(CliError::Usage)?,
        None => ConfigFile::default(),
    };
    let beta_plus_deg = file
        .resolve(args.beta_plus, "beta-plus", 0.0)
        .map_err(CliError::Usage)?;
    let beta_minus_deg = file
        .resolve(args.beta_minus, "beta-minus", 90.0)
        .map_err(CliError::Usage)?;
    let gamma_deg = file
        .resolve(args.gamma, "gamma", 90.0)
        .map_err(CliError::Usage)?;
    let mu = file.resolve(args.mu, "mu", 1.0).map_err(CliError::Usage)?;
    let alpha_raw = file
        .resolve(args.alpha, "alpha", 0.5)
        .map_err(CliError::Usage)?;
    let alpha = Alpha::new(alpha_raw).map_err(usage_err)?;
    let tol = file
        .resolve(args.tol, "tol", 1e-9)
        .map_err(CliError::Usage)?;
    let out_dir = file
        .resolve(args.io.out.clone(), "out", PathBuf::from("runs/probe"))
        .map_err(CliError::Usage)?;

    let params = ModelParams::new(1.0, mu, alpha, 0.0).map_err(usage_err)?;
    let setup = ProbeSetup::new(
        QTensor::from_angle(DirectorAngle::new(beta_plus_deg.to_radians())),
        QTensor::from_angle(DirectorAngle::new(beta_minus_deg.to_radians())),
        UnitVector::from_angle(gamma_deg.to_radians()),
    );
    let families = default_families(&setup);
    let singular = probe(&setup, &families, &params, DensityKind::Singular, tol)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let envelope = probe(&setup, &families, &params, DensityKind::Envelope, tol)
        .map_err(|e| CliError::Failure(e.to_string()))?;

    let mut meta = RunMetadata::new("probe");
    meta.set("beta_plus_deg", beta_plus_deg);
    meta.set("beta_minus_deg", beta_minus_deg);
    meta.set("gamma_deg", gamma_deg);
    meta.set("mu", mu);
    meta.set("alpha", alpha_raw);
    meta.set("tol", tol);
    meta.set("families", families.len());

    println!(
        "singular density: flat = {}, verdict: {}",
        cost_string(&singular.flat_cost),
        singular
            .beaten_by
            .clone()
            .map(|l| format!("beaten_by({l})"))
            .unwrap_or_else(|| "flat_optimal_within_family".into()),
    );
    println!(
        "envelope density: flat = {}, verdict: {}",
        cost_string(&envelope.flat_cost),
        envelope
            .beaten_by
            .clone()
            .map(|l| format!("beaten_by({l})"))
            .unwrap_or_else(|| "flat_optimal_within_family".into()),
    );

    let out = prepare_out_dir(&out_dir)?;
    write_json(
        &out.path("probe.json"),
        &ProbeJson {
            singular: to_json("singular", &singular),
            envelope: to_json("envelope", &envelope),
        },
    )?;
    write_json(&out.path("metadata.json"), &meta)?;
    println!("wrote {}", out.display());
    Ok(Outcome::Success)
}
