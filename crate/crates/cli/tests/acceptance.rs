//! Acceptance: byte-identical reruns and exit-code behavior of the
//! command-line front end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_smectic")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("smectic-acceptance").join(name);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).expect("clean scratch dir");
    }
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("spawn smectic")
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in std::fs::read_dir(&current).expect("read dir") {
            let path = entry.expect("entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .expect("relative path")
                    .to_string_lossy()
                    .into_owned();
                files.insert(rel, std::fs::read(&path).expect("read file"));
            }
        }
    }
    files
}

#[test]
fn criterion_10_reruns_are_byte_identical() {
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("density", vec!["density", "--alpha", "0.5"]),
        ("zigzag", vec!["zigzag", "--teeth", "1,4,16,64"]),
        ("probe", vec!["probe"]),
        ("rectangle", vec!["rectangle", "--m", "80"]),
        (
            "quarter",
            vec!["quarter", "--m-start", "50", "--m-end", "60"],
        ),
        (
            "sweep",
            vec![
                "sweep",
                "--m-start",
                "50",
                "--m-end",
                "60",
                "--mu-list",
                "1,2",
                "--alpha-list",
                "0.2,0.5",
            ],
        ),
    ];
    for (name, args) in cases {
        let dir_a = scratch(&format!("{name}-a"));
        let dir_b = scratch(&format!("{name}-b"));
        for dir in [&dir_a, &dir_b] {
            let mut full = args.clone();
            let out_str = dir.to_string_lossy().into_owned();
            full.push("--out");
            let out_owned = out_str.clone();
            full.push(Box::leak(out_owned.into_boxed_str()));
            let output = run(&full);
            assert!(
                output.status.success(),
                "{name}: exit {:?}\nstderr: {}",
                output.status.code(),
                String::from_utf8_lossy(&output.stderr)
            );
        }
        let a = snapshot(&dir_a);
        let b = snapshot(&dir_b);
        assert_eq!(
            a.keys().collect::<Vec<_>>(),
            b.keys().collect::<Vec<_>>(),
            "{name}: file sets differ"
        );
        for (file, bytes) in &a {
            assert_eq!(
                bytes, &b[file],
                "{name}: {file} differs between identical reruns"
            );
        }
        assert!(!a.is_empty(), "{name}: no outputs written");
        println!(
            "criterion 10 PASS ({name}): {} files byte-identical",
            a.len()
        );
    }
}

#[test]
fn alpha_outside_open_interval_is_a_usage_error() {
    let out = run(&["density", "--alpha", "1.0"]);
    assert_eq!(out.status.code(), Some(2), "alpha = 1.0 must exit 2");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("(0, 1)"),
        "error must name the open-interval constraint, got: {stderr}"
    );

    let dir = scratch("alpha-ok");
    let out = run(&["density", "--alpha", "0.99", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "alpha = 0.99 is inside (0, 1)");
}

#[test]
fn unparseable_flag_is_a_usage_error() {
    let out = run(&["quarter", "--mu", "not-a-number"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3_with_diagnostics() {
    let dir = scratch("nonconv");
    let out = run(&[
        "quarter",
        "--m-start",
        "50",
        "--m-end",
        "50",
        "--max-iters",
        "1",
        "--grad-tol",
        "1e-30",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "unreachable tolerance must exit 3"
    );
    // Diagnostics are still written.
    assert!(dir.join("report.json").exists());
    let report = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("\"converged\": false"));
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let dir = scratch("config");
    let config_path = dir.join("run.conf");
    std::fs::write(
        &config_path,
        "alpha = 0.25\nbeta-plus = 90\nbeta-minus = 0\n",
    )
    .unwrap();
    let out_a = dir.join("a");
    let out = run(&[
        "density",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let meta = std::fs::read_to_string(out_a.join("metadata.json")).unwrap();
    assert!(
        meta.contains("\"alpha\": \"0.25\""),
        "config value used: {meta}"
    );

    let out_b = dir.join("b");
    let out = run(&[
        "density",
        "--config",
        config_path.to_str().unwrap(),
        "--alpha",
        "0.75",
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let meta = std::fs::read_to_string(out_b.join("metadata.json")).unwrap();
    assert!(
        meta.contains("\"alpha\": \"0.75\""),
        "flag overrides config: {meta}"
    );
}
