use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sigmak(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigmak"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn artifact(dir: &Path, stem: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{stem}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn cone_info_reports_mu_plus() {
    let tmp = TempDir::new().unwrap();
    let out = sigmak(tmp.path(), &["cone", "info", "--family", "gamma_k", "--n", "5", "--k", "2"]);
    assert!(out.status.success());
    let v = artifact(tmp.path(), "cone-info");
    assert!((v["result"]["mu_plus"].as_f64().unwrap() - 1.5).abs() < 1e-10);
    for key in ["tool_version", "seed", "config_echo"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
}

#[test]
fn exact_family_is_on_the_boundary() {
    let tmp = TempDir::new().unwrap();
    let out = sigmak(
        tmp.path(),
        &["greens", "exact", "--n", "5", "--k", "2", "--m", "0.5", "--c1", "1", "--c2", "1", "--grid", "0.01:10:50"],
    );
    assert!(out.status.success());
    let v = artifact(tmp.path(), "greens-exact");
    let verdicts = v["result"]["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 50);
    assert!(verdicts.iter().all(|x| x == "Boundary"));
    let csv = std::fs::read_to_string(tmp.path().join("greens-exact.csv")).unwrap();
    assert!(csv.starts_with("r,u\n"));
    assert_eq!(csv.lines().count(), 51);
    assert!(!csv.contains('\r'));
}

#[test]
fn identity_decomposes_into_one_permutation() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("id4.json");
    std::fs::write(&input, "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]").unwrap();
    let out = sigmak(tmp.path(), &["bvn", "decompose", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let v = artifact(tmp.path(), "bvn-decompose");
    let items = v["result"]["items"].as_array().unwrap();
    assert_eq!(items.len(), 1);
    assert_eq!(items[0]["weight"].as_f64().unwrap(), 1.0);
    assert_eq!(items[0]["permutation"], serde_json::json!([1, 2, 3, 4]));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        let out = sigmak(dir, &["bvn", "hullcheck", "--n", "4", "--seed", "11"]);
        assert!(out.status.success());
    }
    let read = |d: &Path| std::fs::read(d.join("bvn-hullcheck.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\n[volcomp.volume]\nn = 2\nkcurv = 1.0\nradius = 1.0\n").unwrap();
    let out = sigmak(tmp.path(), &["volcomp", "volume", "--config", cfg.to_str().unwrap(), "--radius", "2.0"]);
    assert!(out.status.success());
    let v = artifact(tmp.path(), "volcomp-volume");
    assert_eq!(v["seed"], 5);
    assert_eq!(v["config_echo"]["radius"].as_f64(), Some(2.0));
    let want = 2.0 * std::f64::consts::PI * (1.0 - 2.0f64.cos());
    assert!((v["result"]["volume"].as_f64().unwrap() - want).abs() < 1e-10);
}

#[test]
fn unknown_command_exits_64() {
    let tmp = TempDir::new().unwrap();
    let out = sigmak(tmp.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn validation_error_exits_1() {
    let tmp = TempDir::new().unwrap();
    let out = sigmak(tmp.path(), &["cone", "info", "--n", "5", "--k", "9"]);
    assert_eq!(out.status.code(), Some(1));
    let out = sigmak(tmp.path(), &["volcomp", "volume"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_2() {
    let tmp = TempDir::new().unwrap();
    // a single coefficient that is far too small for the barrier to be interior
    let out = sigmak(tmp.path(), &["barrier", "check", "--a", "1e-6"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn barrier_search_finds_a_coefficient() {
    let tmp = TempDir::new().unwrap();
    let out = sigmak(tmp.path(), &["barrier", "check"]);
    assert!(out.status.success());
    let v = artifact(tmp.path(), "barrier-check");
    assert_eq!(v["result"]["report"]["all_interior"], true);
    assert!(v["config_echo"]["a"].as_f64().is_some());
}

#[test]
fn solver_writes_profile() {
    let tmp = TempDir::new().unwrap();
    let out = sigmak(tmp.path(), &["greens", "solve", "--epsilon", "0.1", "--grid-size", "400", "--precision", "double"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = artifact(tmp.path(), "greens-solve");
    assert_eq!(v["result"]["converged"], true);
    let csv = std::fs::read_to_string(tmp.path().join("greens-solve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 401);
}

#[test]
fn remaining_subcommands_succeed() {
    let tmp = TempDir::new().unwrap();
    let runs: &[&[&str]] = &[
        &["cone", "check", "--lambda", "1,1,1,1,-0.5"],
        &["defining", "build", "--samples", "50"],
        &["defining", "probe", "--lambda", "1,1,1,1,1"],
        &["barrier", "glue"],
        &["greens", "bubble"],
        &["greens", "continue", "--ladder", "0.1,0.05", "--grid-size", "400", "--precision", "double"],
        &["greens", "mass"],
        &["bvn", "decompose", "--n", "3"],
        &["tensorid", "div", "--k", "1"],
        &["tensorid", "curl"],
        &["tensorid", "order", "--field", "power_offset", "--k", "2"],
        &["volcomp", "infconv", "--epsilon", "0.1"],
        &["volcomp", "ricci", "--factor", "sphere"],
        &["volcomp", "ratio", "--factor", "log_one_plus_sq", "--kcurv", "0"],
    ];
    for args in runs {
        let out = sigmak(tmp.path(), args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let stem = format!("{}-{}", args[0], args[1]);
        let v = artifact(tmp.path(), &stem);
        assert_eq!(v["command"], format!("{} {}", args[0], args[1]));
    }
}
