//! End-to-end checks of the command-line binary: artifact shapes, cache
//! behavior, exit codes, and byte-stable output.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmoments"))
        .args(args)
        .env_remove("QMOMENTS_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).expect("utf8")
}

#[test]
fn moments_phi2_csv() {
    let out = run(&["moments", "--operator", "phi2", "--n-max", "4", "--format", "csv"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,connected,full");
    assert_eq!(lines[1], "0,1/1,1/1");
    assert_eq!(lines[3], "2,2/1,2/1");
    assert_eq!(lines[4], "3,48/1,48/1");
    assert_eq!(lines[5], "4,1728/1,1740/1");
}

#[test]
fn moments_rho_em_json() {
    let out = run(&["moments", "--operator", "rhoEM", "--n-max", "3"]);
    let text = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(&text).expect("json");
    assert_eq!(doc["operator"], "rhoEM");
    assert_eq!(doc["p"], 3);
    let full: Vec<&str> = doc["full"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(full, ["1/1", "0/1", "3/1", "420/1"]);
}

#[test]
fn repeated_runs_are_byte_identical_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["moments", "--operator", "rhoS", "--n-max", "6", "--cache-dir", cache];
    let first = stdout(&run(&args));
    // cache now holds both the base moments and the finished table
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(entries.len() >= 2, "cache files written");
    let second = stdout(&run(&args));
    assert_eq!(first, second);
}

#[test]
fn lower_bound_small_range() {
    let out = run(&["lower-bound", "--operator", "phi2", "--N", "2..4", "--digits", "40"]);
    let text = stdout(&out);
    assert!(text.contains("2,0.0830459735945720682828392668"), "{text}");
    assert!(text.contains("3,0.1108552882"), "{text}");
}

#[test]
fn lower_bound_with_extrapolation_report() {
    let out = run(&[
        "lower-bound", "--operator", "phi2", "--N", "2..8",
        "--extrapolate", "0,1,2", "--window", "3:8",
    ]);
    let text = stdout(&out);
    assert!(text.contains("y_infinity,"), "{text}");
}

#[test]
fn accelerate_preserves_header_shape() {
    let out = run(&["accelerate", "--operator", "phi2", "--N", "2..6", "--ks", "1"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,accelerated");
    assert_eq!(lines.len(), 5); // N = 2..5 after one application
}

#[test]
fn gamma_moments_match_phi2() {
    let out = run(&[
        "gamma-moments", "--params", "1/6,1/72,1/12", "--n-max", "4", "--format", "csv",
    ]);
    let text = stdout(&out);
    assert!(text.contains("3,48/1"));
    assert!(text.contains("4,1740/1"));
}

#[test]
fn brain_exponent_order_of_magnitude() {
    let out = run(&["brain", "--mass", "1kg", "--size", "10cm", "--time", "0.3s"]);
    let text = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(&text).expect("json");
    let exp = doc["exponent"].as_str().unwrap();
    // the round-number constants give 8.7e25; the quoted scale is 1e26
    assert!(exp.contains("e25") || exp.contains("e26"), "exponent {exp}");
}

#[test]
fn nucleation_solves_reference_mass() {
    let out = run(&["nucleation", "--vt-planck", "1e142", "--count", "1"]);
    let text = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(&text).expect("json");
    let mass: f64 = doc["mass_planck"].as_str().unwrap().parse::<f64>().unwrap_or_else(|_| {
        // canonical form like 4.01...e2
        let s = doc["mass_planck"].as_str().unwrap();
        s.replace('e', "E").parse().expect("number")
    });
    assert!((mass / 400.0 - 1.0).abs() < 0.10, "mass {mass}");
    let a0 = doc["a0"].as_str().unwrap();
    assert!(a0.starts_with("5.2"), "a0 {a0}");
}

#[test]
fn unknown_operator_exits_2() {
    let out = run(&["moments", "--operator", "nope", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn insufficient_depth_exits_3() {
    let out = run(&["tail", "--operator", "rhoEM", "--n-pair", "64,65", "--n-max", "8"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fit_emits_moment_errors_and_density_grid() {
    let out = run(&["fit", "--n-max", "3", "--grid", "-0.04:0.5:10"]);
    let text = stdout(&out);
    assert!(text.starts_with("n,model_moment,fractional_error"));
    assert!(text.contains("\nx,P_fit\n"));
    // 11 grid samples
    let grid_lines = text.split("x,P_fit\n").nth(1).unwrap().lines().count();
    assert_eq!(grid_lines, 11);
}

#[test]
fn cdf_bound_grid_shape() {
    let out = run(&[
        "cdf-bound", "--operator", "rhoEM", "--lambda-grid", "1e2:1e4:4", "--n-max", "12",
    ]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,moment_bound,asymptotic_bound");
    assert_eq!(lines.len(), 6);
}
