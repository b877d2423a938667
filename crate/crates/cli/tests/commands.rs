//! End-to-end runs of every subcommand against the bundled geometries.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_concentra")
}

fn geometries() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../geometries")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("concentra-cli-tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn summary(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("summary.json")).expect("summary exists");
    serde_json::from_str(&text).expect("summary parses")
}

#[test]
fn constants_command_emits_ratios() {
    let out = tmp("constants");
    let status = Command::new(bin())
        .args(["constants", "--n-dims", "7,8", "--out-dir", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("constants.csv")).unwrap();
    assert!(csv.starts_with("n_dim,c1,c2,c3,c4"));
    assert_eq!(csv.lines().count(), 3);
    let s = summary(&out);
    assert_eq!(s["compute_constants_pass"], true);
}

#[test]
fn eigenpair_command_reports_lambda0() {
    let out = tmp("eigenpair");
    let status = Command::new(bin())
        .args([
            "eigenpair",
            "--n-dim",
            "7",
            "--r-out",
            "30",
            "--radial-m",
            "1024",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let s = summary(&out);
    let lambda0 = s["compute_eigenpair_lambda0"].as_f64().unwrap();
    assert!((lambda0 - 7.786934361650).abs() < 1e-5);
    assert_eq!(s["tail_slope_pass"], true);
}

#[test]
fn attractive_solve_on_bundled_problem() {
    let out = tmp("attractive");
    let status = Command::new(bin())
        .args([
            "attractive-solve",
            "--problem",
            geometries()
                .join("problem_attractive_cosine.json")
                .to_str()
                .unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let s = summary(&out);
    assert_eq!(s["nondegenerate"], true);
    assert_eq!(s["integral_identity_pass"], true);
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(csv.starts_with("node,y,u,residual"));
}

#[test]
fn repulsive_solve_feasible_and_infeasible() {
    let out = tmp("repulsive-ok");
    let status = Command::new(bin())
        .args([
            "repulsive-solve",
            "--problem",
            geometries()
                .join("problem_repulsive_constant.json")
                .to_str()
                .unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let s = summary(&out);
    assert_eq!(s["nondegenerate"], true);

    // Infeasible data: nonzero exit with the reason recorded in the summary.
    let out = tmp("repulsive-bad");
    let status = Command::new(bin())
        .args([
            "repulsive-solve",
            "--problem",
            geometries()
                .join("problem_repulsive_infeasible.json")
                .to_str()
                .unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(!status.success());
    let s = summary(&out);
    assert_eq!(s["repulsive_feasibility"], false);
    let msg = s["error"].as_str().unwrap();
    assert!(msg.contains("min alpha"), "summary reason: {msg}");
}

#[test]
fn jacobi_command_on_curved_torus() {
    let out = tmp("jacobi");
    let status = Command::new(bin())
        .args([
            "jacobi",
            "--geometry",
            geometries().join("torus_curved.json").to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let s = summary(&out);
    assert_eq!(s["jacobi_degenerate"], false);
    assert_eq!(s["is_minimal"], true);
}

#[test]
fn construct_command_emits_fields_and_profiles() {
    let out = tmp("construct");
    let status = Command::new(bin())
        .args([
            "construct",
            "--geometry",
            geometries().join("circle_cosine.json").to_str().unwrap(),
            "--eps",
            "1e-2",
            "--radial-m",
            "1024",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let s = summary(&out);
    assert_eq!(s["v1_below_v0"], true);
    for f in ["fields.csv", "w1_profiles.csv", "residual_norms.csv"] {
        assert!(out.join(f).exists(), "missing artifact {f}");
    }
}

#[test]
fn scaling_command_pass_flags() {
    let out = tmp("scaling");
    let status = Command::new(bin())
        .args([
            "scaling",
            "--geometry",
            geometries().join("circle_constant.json").to_str().unwrap(),
            "--version",
            "both",
            "--radial-m",
            "1024",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let s = summary(&out);
    assert_eq!(s["slope_v1_pass"], true);
    assert_eq!(s["v1_constant_below_v0"], true);
}

#[test]
fn invalid_flags_are_usage_errors() {
    let out = tmp("usage");
    let status = Command::new(bin())
        .args([
            "construct",
            "--geometry",
            geometries().join("circle_constant.json").to_str().unwrap(),
            "--sign",
            "sideways",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(!status.success());
}
