//! `density`: tabulate ζ_α and φ_α over a grid of interface normals.

use super::common::{usage_err, CliError, CmdResult, Outcome};
use crate::args::DensityArgs;
use crate::config_file::ConfigFile;
use crate::output::{
    fmt_cost, fmt_f64, prepare_out_dir, print_table, write_csv, write_json, RunMetadata,
};
use smectic_core::jump_energy::{phi, zeta, Alpha, JumpTriple};
use smectic_core::qtensor::{DirectorAngle, QTensor, UnitVector};
use std::path::PathBuf;

pub fn run(args: &DensityArgs) -> CmdResult {
    let file = match &args.io.config {
        Some(path) => ConfigFile::load(path).map_err(CliError::Usage)?,
        None => ConfigFile::default(),
    };
    let beta_plus_deg = file
        .resolve(args.beta_plus, "beta-plus", 90.0)
        .map_err(CliError::Usage)?;
    let beta_minus_deg = file
        .resolve(args.beta_minus, "beta-minus", 0.0)
        .map_err(CliError::Usage)?;
    let alpha_raw = file
        .resolve(args.alpha, "alpha", 0.5)
        .map_err(CliError::Usage)?;
    let alpha = Alpha::new(alpha_raw).map_err(usage_err)?;
    let points = file
        .resolve(args.gamma_points, "gamma-points", 9usize)
        .map_err(CliError::Usage)?;
    if points < 2 {
        return Err(CliError::usage("gamma-points must be at least 2"));
    }
    let tol = file
        .resolve(args.tol, "tol", 1e-9)
        .map_err(CliError::Usage)?;
    let out_dir = file
        .resolve(args.io.out.clone(), "out", PathBuf::from("runs/density"))
        .map_err(CliError::Usage)?;

    let mut meta = RunMetadata::new("density");
    meta.set("beta_plus_deg", beta_plus_deg);
    meta.set("beta_minus_deg", beta_minus_deg);
    meta.set("alpha", alpha_raw);
    meta.set("gamma_points", points);
    meta.set("tol", tol);

    let q_plus = QTensor::from_angle(DirectorAngle::new(beta_plus_deg.to_radians()));
    let q_minus = QTensor::from_angle(DirectorAngle::new(beta_minus_deg.to_radians()));

    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let gamma_deg = 180.0 * k as f64 / (points - 1) as f64;
        let nu = UnitVector::from_angle(gamma_deg.to_radians());
        let triple = JumpTriple::new(q_plus, q_minus, nu);
        let z = zeta(&triple, alpha, tol);
        let p = phi(&triple, alpha);
        rows.push(vec![fmt_f64(gamma_deg), fmt_cost(&z), fmt_f64(p)]);
    }

    let header = ["gamma_deg", "zeta", "phi"];
    let display_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| {
                    c.parse::<f64>()
                        .map(|v| format!("{v:.6}"))
                        .unwrap_or_else(|_| c.clone())
                })
                .collect()
        })
        .collect();
    print_table(&header, &display_rows);

    let out = prepare_out_dir(&out_dir)?;
    write_csv(&out.path("density.csv"), &header, rows)?;
    write_json(&out.path("metadata.json"), &meta)?;
    println!("wrote {}", out.display());
    Ok(Outcome::Success)
}
