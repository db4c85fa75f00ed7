//! `zigzag`: sawtooth versus flat interface energies under both densities.

use super::common::{parse_list, usage_err, CliError, CmdResult, Outcome};
use crate::args::ZigzagArgs;
use crate::config_file::ConfigFile;
use crate::output::{
    fmt_cost, fmt_f64, prepare_out_dir, print_table, write_csv, write_json, RunMetadata,
};
use smectic_core::fields::make_zigzag;
use smectic_core::functionals::{partition_energy, ModelParams};
use smectic_core::jump_energy::{Alpha, DensityKind};
use smectic_core::qtensor::{DirectorAngle, QTensor};
use std::path::PathBuf;

pub fn run(args: &ZigzagArgs) -> CmdResult {
    let file = match &args.io.config {
        Some(path) => ConfigFile::load(path).map_err(CliError::Usage)?,
        None => ConfigFile::default(),
    };
    let b = file.resolve(args.b, "b", 1.0).map_err(CliError::Usage)?;
    let mu = file.resolve(args.mu, "mu", 1.0).map_err(CliError::Usage)?;
    let alpha_raw = file
        .resolve(args.alpha, "alpha", 0.5)
        .map_err(CliError::Usage)?;
    let alpha = Alpha::new(alpha_raw).map_err(usage_err)?;
    let teeth_raw = file
        .resolve(args.teeth.clone(), "teeth", "1,4,16,64".to_string())
        .map_err(CliError::Usage)?;
    let teeth: Vec<usize> = parse_list(&teeth_raw, "teeth")?;
    let beta_plus_deg = file
        .resolve(args.beta_plus, "beta-plus", 0.0)
        .map_err(CliError::Usage)?;
    let beta_minus_deg = file
        .resolve(args.beta_minus, "beta-minus", 90.0)
        .map_err(CliError::Usage)?;
    let tol = file
        .resolve(args.tol, "tol", 1e-9)
        .map_err(CliError::Usage)?;
    let out_dir = file
        .resolve(args.io.out.clone(), "out", PathBuf::from("runs/zigzag"))
        .map_err(CliError::Usage)?;

    let params = ModelParams::new(1.0, mu, alpha, 0.0).map_err(usage_err)?;
    let q_plus = QTensor::from_angle(DirectorAngle::new(beta_plus_deg.to_radians()));
    let q_minus = QTensor::from_angle(DirectorAngle::new(beta_minus_deg.to_radians()));

    let mut meta = RunMetadata::new("zigzag");
    meta.set("b", b);
    meta.set("mu", mu);
    meta.set("alpha", alpha_raw);
    meta.set("teeth", &teeth_raw);
    meta.set("beta_plus_deg", beta_plus_deg);
    meta.set("beta_minus_deg", beta_minus_deg);
    meta.set("tol", tol);

    // Flat interface first (n_teeth = 0), then the requested tooth counts.
    let mut rows = Vec::new();
    let mut counts = vec![0usize];
    counts.extend(teeth.iter().copied().filter(|n| *n > 0));
    for n in counts {
        let config = make_zigzag(b, n, q_plus, q_minus).map_err(usage_err)?;
        let z = partition_energy(&config, &params, DensityKind::Singular, tol);
        let p = partition_energy(&config, &params, DensityKind::Envelope, tol);
        rows.push(vec![
            n.to_string(),
            fmt_f64(config.interface_length()),
            fmt_cost(&z),
            fmt_cost(&p),
        ]);
    }

    let header = ["n_teeth", "interface_length", "zeta_energy", "phi_energy"];
    let display: Vec<Vec<String>> = rows
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
    print_table(&header, &display);

    let out = prepare_out_dir(&out_dir)?;
    write_csv(&out.path("zigzag.csv"), &header, rows)?;
    write_json(&out.path("metadata.json"), &meta)?;
    println!("wrote {}", out.display());
    Ok(Outcome::Success)
}
