//! CLI behavior: argument handling, config-file precedence, exit codes,
//! and artifact headers.

use std::path::PathBuf;
use std::process::{Command, Output};

fn specinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specinv"))
        .args(args)
        .output()
        .expect("spawn specinv")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("specinv-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_prints_the_energy() {
    let out = specinv(&["solve", "--shape", "hulthen", "--v", "4", "--n", "1", "--ell", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("E = -2.2499"), "stdout: {text}");
}

#[test]
fn bad_shape_spec_exits_2_with_error_json() {
    let out = specinv(&["solve", "--shape", "banana", "--v", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(err.trim()).expect("error JSON");
    assert_eq!(parsed["error"]["kind"], "parse");
    assert_eq!(parsed["error"]["exit_code"], 2);
}

#[test]
fn missing_bound_state_exits_3() {
    let out = specinv(&["solve", "--shape", "hulthen", "--v", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no_bound_state"), "stderr: {err}");
}

#[test]
fn boundary_extremum_exits_4() {
    // A sampled curve over a narrow window cannot represent s far above
    // its image; the maximization hits the window edge.
    let dir = tmp("boundary");
    let out = specinv(&[
        "kinetic",
        "--shape",
        "coulomb_plus linear 1 0.5",
        "--vgrid",
        "1:4:12",
        "--sgrid",
        "50:100:4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_preset_is_rejected() {
    let dir = tmp("preset");
    let out = specinv(&["invert", "--preset", "nope", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_values_and_flags_win() {
    let dir = tmp("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "shape=hulthen\nv=4\nn=1\nell=0\n").unwrap();

    let from_file = specinv(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success());
    let text = String::from_utf8_lossy(&from_file.stdout);
    assert!(text.starts_with("E = -2.2499"), "stdout: {text}");

    // an explicit flag overrides the file: v=9 gives E = -(8/2)^2 = -16
    let overridden = specinv(&["solve", "--config", cfg.to_str().unwrap(), "--v", "9"]);
    assert!(overridden.status.success());
    let text2 = String::from_utf8_lossy(&overridden.stdout);
    assert!(text2.starts_with("E = -15.999") || text2.starts_with("E = -16"), "stdout: {text2}");
}

#[test]
fn solve_writes_diagnostics_json() {
    let dir = tmp("solvejson");
    let out = specinv(&[
        "solve", "--shape", "coulomb", "--v", "2", "--n", "1", "--ell", "0",
        "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("solve.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((parsed["energy"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert_eq!(parsed["nodes"], 0);
    assert!(parsed["mesh"]["n_log"].as_u64().unwrap() > 0);
    assert!(parsed["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn preset_first_iterate_column_matches_the_closed_form() {
    let dir = tmp("presetf1");
    let out = specinv(&[
        "invert", "--preset", "hulthen-fig1", "--iterations", "1",
        "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("figure.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let (ri, f1i) = (
        header.iter().position(|c| *c == "r").unwrap(),
        header.iter().position(|c| *c == "f1").unwrap(),
    );
    let mut worst: f64 = 0.0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (r, f1) = (cells[ri], cells[f1i]);
        let expect = -0.5 * ((4.0 / (r * r) + 1.0).sqrt() - 1.0);
        worst = worst.max((f1 - expect).abs());
    }
    assert!(worst < 1e-6, "f1 column deviates by {worst:.2e}");
}

#[test]
fn artifacts_carry_version_and_config_hash_header() {
    let dir = tmp("header");
    let out = specinv(&[
        "curve",
        "--shape",
        "coulomb",
        "--vgrid",
        "1:4:6",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("curve.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# specinv "), "header: {first}");
    assert!(first.contains("config="), "header: {first}");
}

#[test]
fn csv_shape_round_trips_through_invert_target() {
    // Generate a Hulthén curve, feed it back as a CSV target.
    let dir = tmp("csvtarget");
    let gen = specinv(&[
        "curve",
        "--shape",
        "hulthen",
        "--vgrid",
        "1.5:50:24",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let inv = specinv(&[
        "invert",
        "--target-csv",
        dir.join("curve.csv").to_str().unwrap(),
        "--v1",
        "1",
        "--n",
        "1",
        "--iterations",
        "1",
        // the curve is sampled from v = 1.5, so it only encodes the shape
        // out to radii where K(r) stays above s(1.5)
        "--rwindow",
        "0.05:1.5:60",
        "--out",
        dir.join("run").to_str().unwrap(),
    ]);
    assert!(
        inv.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&inv.stderr)
    );
    assert!(dir.join("run").join("iterate_001.csv").exists());
    assert!(dir.join("run").join("manifest.json").exists());
}
