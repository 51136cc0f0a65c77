//! End-to-end runs of the binary against the shipped scenario files.

use std::path::{Path, PathBuf};
use std::process::Command;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn out_root(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("granex-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn granex(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_granex"))
        .args(args)
        .env_remove("GRANEX_OUT")
        .output()
        .expect("binary runs")
}

#[test]
fn dist_mode_reports_the_dilog_roots() {
    let out = out_root("dist");
    let config = scenarios().join("dist_catalog.json");
    let result = granex(&[
        "dist",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("dist.json")).unwrap()).unwrap();
    let bose = doc["roots"]["bose"].as_f64().unwrap();
    let fermi = doc["roots"]["fermi"].as_f64().unwrap();
    assert!((bose + 0.814651).abs() < 1e-5, "{bose}");
    assert!((fermi - 1.405050).abs() < 1e-5, "{fermi}");

    // one table per requested family plus histogram and the two reports
    for family in ["canonical_0", "power_law_1", "bose_like_6", "fermi_like_7"] {
        assert!(out.join(format!("table_{family}.csv")).exists());
    }
    assert!(out.join("histogram.csv").exists());
    assert!(out.join("report.json").exists());
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn simulate_mode_passes_conservation_and_balance_checks() {
    let out = out_root("simulate");
    let config = scenarios().join("simulate_spring_pair.json");
    let result = granex(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let drift = checks
        .iter()
        .find(|c| c["name"] == "conservation_drift")
        .expect("conservation check present");
    assert_eq!(drift["passed"], true);
    assert!(drift["value"].as_f64().unwrap() < 1e-6);
    let residual = checks
        .iter()
        .find(|c| c["name"] == "balance_residual_max")
        .unwrap();
    assert!(residual["value"].as_f64().unwrap() < 1e-10);

    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10_002);
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn closure_mode_matches_the_isotropic_closed_form() {
    let out = out_root("closure");
    let config = scenarios().join("closure_isotropic.json");
    let result = granex(&[
        "closure",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );

    let csv = std::fs::read_to_string(out.join("closure.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let t_col = header.iter().position(|&h| h == "t").unwrap();
    let b11 = header.iter().position(|&h| h == "b11").unwrap();
    let y11 = header.iter().position(|&h| h == "y11").unwrap();
    let h11 = header.iter().position(|&h| h == "h11").unwrap();
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let s = 1.0 + fields[t_col];
        assert!((fields[b11] - 1.0 / s).abs() < 1e-6);
        assert!((fields[y11] - s * s).abs() < 1e-6);
        assert!((fields[h11] - 1.0 / (s * s)).abs() < 1e-6);
    }
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn fit_mode_emits_the_energy_split() {
    let out = out_root("fit");
    let config = scenarios().join("fit_three_mass.json");
    let result = granex(&[
        "fit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    // orthogonal velocity field: no affine part, all energy in agitation
    let agitation = doc["affine"]["energy"]["agitation"].as_f64().unwrap();
    assert!((agitation - 1.0).abs() < 1e-12);
    let h11 = doc["affine"]["reynolds"][1][1].as_f64().unwrap();
    assert!((h11 - 2.0).abs() < 1e-12);
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn identical_runs_are_byte_identical() {
    let out_a = out_root("det-a");
    let out_b = out_root("det-b");
    let config = scenarios().join("dist_catalog.json");
    for out in [&out_a, &out_b] {
        let result = granex(&[
            "dist",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "99",
        ]);
        assert!(result.status.success());
    }
    for name in ["dist.json", "histogram.csv", "table_canonical_0.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    std::fs::remove_dir_all(out_a).ok();
    std::fs::remove_dir_all(out_b).ok();
}

#[test]
fn empty_check_list_still_exits_zero() {
    let dir = out_root("empty");
    let config = dir.join("empty_dist.json");
    std::fs::write(
        &config,
        r#"{ "schema": 1, "mode": "dist", "dist": { "families": [] } }"#,
    )
    .unwrap();
    let result = granex(&[
        "dist",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 0);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn exit_codes_follow_the_contract() {
    // usage error
    let result = granex(&["fit"]);
    assert_eq!(result.status.code(), Some(2));

    // unknown mode
    let result = granex(&["explode", "--config", "x.json"]);
    assert_eq!(result.status.code(), Some(2));

    // missing config file
    let result = granex(&["fit", "--config", "/nonexistent/path.json"]);
    assert_eq!(result.status.code(), Some(2));

    // config with an unknown key
    let bad = std::env::temp_dir().join(format!("granex-bad-{}.json", std::process::id()));
    std::fs::write(&bad, r#"{ "schema": 1, "mode": "fit", "dampng": 1 }"#).unwrap();
    let result = granex(&["fit", "--config", bad.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("dampng"), "{stderr}");
    std::fs::remove_file(&bad).ok();

    // mode mismatch between CLI and scenario
    let config = scenarios().join("fit_three_mass.json");
    let result = granex(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn coarse_step_fails_the_conservation_check_with_exit_one() {
    let out = out_root("coarse");
    let config = scenarios().join("simulate_spring_pair.json");
    let result = granex(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--dt",
        "0.35",
        "--steps",
        "4000",
    ]);
    assert_eq!(
        result.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn blowup_exits_with_divergence_code() {
    let dir = out_root("blowup");
    let config = dir.join("stiff.json");
    std::fs::write(
        &config,
        r#"{
            "schema": 1,
            "mode": "simulate",
            "cloud": { "inline": [
                { "mass": 1e-6, "position": [1.0, 0.0, 0.0], "velocity": [0, 0, 0] },
                { "mass": 1e-6, "position": [-1.0, 0.0, 0.0], "velocity": [0, 0, 0] }
            ] },
            "forces": [ { "type": "pair_spring", "pairs": [[0, 1]], "stiffness": 1e9, "rest_length": 0.1 } ],
            "integration": { "dt": 10.0, "steps": 2000 }
        }"#,
    )
    .unwrap();
    let result = granex(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(
        result.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn env_var_overrides_the_out_flag() {
    let flag_dir = out_root("flag");
    let env_dir = out_root("env");
    let config = scenarios().join("fit_three_mass.json");
    let result = Command::new(env!("CARGO_BIN_EXE_granex"))
        .args([
            "fit",
            "--config",
            config.to_str().unwrap(),
            "--out",
            flag_dir.to_str().unwrap(),
        ])
        .env("GRANEX_OUT", env_dir.to_str().unwrap())
        .output()
        .unwrap();
    assert!(result.status.success());
    assert!(env_dir.join("fit.json").exists());
    assert!(!flag_dir.join("fit.json").exists());
    std::fs::remove_dir_all(flag_dir).ok();
    std::fs::remove_dir_all(env_dir).ok();
}
