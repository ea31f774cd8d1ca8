use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ucp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucp"))
        .args(args)
        .env_remove("UCP_GRID")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn sample(dir: &Path, name: &str, kind: &str) -> String {
    let p = dir.join(name);
    let out = ucp(&["sample", "--kind", kind, "--save", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    p.to_str().unwrap().to_string()
}

#[test]
fn faris_constant_at_quarter() {
    // K(1/4, 1) = 9√2
    let v = json(&ucp(&["faris-k", "--alpha", "0.25", "--d", "1"]));
    let k = v["K"].as_f64().unwrap();
    assert!((k - 9.0 * 2f64.sqrt()).abs() < 1e-9, "{v}");
}

#[test]
fn shapiro_hermite_rows_are_extremal() {
    let v = json(&ucp(&["shapiro", "--n", "2"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let last = &rows[2];
    assert!((last["lhs"].as_f64().unwrap() - 9.0 / (2.0 * PI)).abs() < 1e-9);
    assert!((last["rhs"].as_f64().unwrap() - 9.0 / (2.0 * PI)).abs() < 1e-12);
    assert!(rows.iter().all(|r| r["equality_flag"] == true));
}

#[test]
fn zero_state_evolves_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let z = sample(dir.path(), "z.fn", "zero");
    let v = json(&ucp(&["evolve", "--equation", "heat", "--t", "0.5,1", "--input", &z]));
    for row in v["rows"].as_array().unwrap() {
        assert_eq!(row["norm"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn dissipation_rows_with_negative_interval_literals() {
    let dir = tempfile::tempdir().unwrap();
    let b = sample(dir.path(), "b.fn", "band:1");
    let out = ucp(&[
        "evolve", "--equation", "schrodinger", "--t", "0.1,1,10", "--input", &b, "--S", "-1,1", "--Sigma", "-1,1",
    ]);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn annihilate_methods_agree() {
    let grid = ["--grid", "8,512"];
    let dense = json(&ucp(&[&grid[..], &["annihilate", "--S", "-1,1", "--Sigma", "-1,1"]].concat()));
    let power = json(&ucp(&[&grid[..], &["annihilate", "--S", "-1,1", "--Sigma", "-1,1", "--method", "power"]].concat()));
    let (a, b) = (dense["report"]["d"].as_f64().unwrap(), power["report"]["d"].as_f64().unwrap());
    assert!(a > 0.0 && a < 1.0);
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn invalid_flag_value_exits_2_and_names_flag() {
    let out = ucp(&["faris-k", "--alpha", "0.7", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--alpha"), "{}", stderr(&out));

    let out = ucp(&["annihilate", "--S", "1,0", "--Sigma", "-1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--S"));

    let dir = tempfile::tempdir().unwrap();
    let g = sample(dir.path(), "g.fn", "gaussian");
    let out = ucp(&["evolve", "--equation", "heat", "--t", "-1", "--input", &g]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--t"));
}

#[test]
fn unresolvable_window_exits_3() {
    let out = ucp(&["--grid", "4,64", "hermite", "--k", "30"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--k"));

    let dir = tempfile::tempdir().unwrap();
    let g = sample(dir.path(), "g.fn", "gaussian");
    let out = ucp(&["bargmann", "--input", &g, "--z", "15,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_output_parses() {
    let out = ucp(&["--format", "csv", "hermite", "--k", "4"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(rdr.headers().unwrap(), vec!["k", "eigenvalue", "norm"]);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let norm: f64 = r[2].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["--seed", "7", "rayleigh-ritz", "--dim", "5"];
    let a = ucp(&args);
    let b = ucp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn grid_from_environment_and_flag_precedence() {
    let env_run = Command::new(env!("CARGO_BIN_EXE_ucp"))
        .args(["hermite", "--k", "2"])
        .env("UCP_GRID", "8,512")
        .output()
        .unwrap();
    let v = json(&env_run);
    assert_eq!(v["grid"]["n"], 512);

    let flag_run = Command::new(env!("CARGO_BIN_EXE_ucp"))
        .args(["--grid", "8,256", "hermite", "--k", "2"])
        .env("UCP_GRID", "8,512")
        .output()
        .unwrap();
    assert_eq!(json(&flag_run)["grid"]["n"], 256);

    let bad = Command::new(env!("CARGO_BIN_EXE_ucp"))
        .args(["faris-k", "--alpha", "0.2", "--d", "1"])
        .env("UCP_GRID", "8,511")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("UCP_GRID"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("k.json");
    let out = ucp(&["--output", p.to_str().unwrap(), "faris-k", "--alpha", "0.25", "--d", "1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&p).unwrap(), ucp(&["faris-k", "--alpha", "0.25", "--d", "1"]).stdout);
}
