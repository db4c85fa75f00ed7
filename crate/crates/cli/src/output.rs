//! CSV and JSON writers with deterministic formatting.
//!
//! CSV numbers use 17 significant digits (round-trip exact for f64); JSON
//! uses serde_json's shortest-round-trip float encoding. No timestamps or
//! wall-clock values are written anywhere, so reruns with an identical
//! configuration produce byte-identical files.

use serde::Serialize;
use smectic_core::jump_energy::JumpCost;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// 17 significant digits: exact round trip for 64-bit floats.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

pub fn fmt_cost(c: &JumpCost) -> String {
    match c {
        JumpCost::Finite(v) => fmt_f64(*v),
        JumpCost::Infinite => "inf".into(),
    }
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)
}

/// Resolved run description written next to every output set.
#[derive(Serialize)]
pub struct RunMetadata {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Fully resolved configuration (flags over config file over defaults).
    pub parameters: BTreeMap<String, String>,
    /// Discretization conventions baked into this build.
    pub numerics: BTreeMap<String, String>,
}

impl RunMetadata {
    pub fn new(command: &str) -> RunMetadata {
        let mut numerics = BTreeMap::new();
        numerics.insert(
            "curve_geometry".into(),
            "second-order central differences, one-sided second-order at endpoints".into(),
        );
        numerics.insert(
            "rectangle_functional".into(),
            "nodal trapezoid rule with the curve-geometry stencil".into(),
        );
        numerics.insert(
            "quarter_functional".into(),
            "staggered cells: midpoint quadrature, central differences at cell midpoints".into(),
        );
        numerics.insert(
            "csv_floats".into(),
            "17 significant digits (exact f64 round trip)".into(),
        );
        RunMetadata {
            artifact: "smectic",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            parameters: BTreeMap::new(),
            numerics,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }
}

/// Creates the output directory and returns a path builder for it.
pub fn prepare_out_dir(dir: &Path) -> std::io::Result<OutDir> {
    fs::create_dir_all(dir)?;
    Ok(OutDir {
        dir: dir.to_path_buf(),
    })
}

pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn subdir(&self, name: &str) -> std::io::Result<OutDir> {
        let sub = self.dir.join(name);
        fs::create_dir_all(&sub)?;
        Ok(OutDir { dir: sub })
    }

    pub fn display(&self) -> std::path::Display<'_> {
        self.dir.display()
    }
}

/// Prints an aligned table to stdout.
pub fn print_table(header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<String>| {
        let mut out = String::new();
        for (w, cell) in widths.iter().zip(cells) {
            out.push_str(&format!("{cell:>w$}  ", w = w));
        }
        println!("{}", out.trim_end());
    };
    line(header.iter().map(|s| s.to_string()).collect());
    for row in rows {
        line(row.clone());
    }
}
