use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_nls-scatter");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .env_remove("ZS_SCATTER_CONFIG")
        .args(["--set", "grid.n=2048"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn scatter_json_and_csv() {
    let out = run(&["scatter", "--potential", "sech:A=0.5", "--n-lambda", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["lambda"].as_array().unwrap().len(), 3);
    // |b(0)| = sinh(pi/2)
    let b0 = &v["b"][1];
    let abs = b0[0].as_f64().unwrap().hypot(b0[1].as_f64().unwrap());
    assert!((abs - std::f64::consts::FRAC_PI_2.sinh()).abs() < 1e-8, "{abs}");
    assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("free.csv");
    let out = run(&["--format", "csv", "--out", path.to_str().unwrap(), "scatter", "--potential", "zero", "--n-lambda", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,re_a,im_a,re_b,im_b"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn divisor_is_contained() {
    let out = run(&["divisor", "--potential", "chirped_sech:A=0.5,c=1", "--x", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["containment_excess"].as_f64().unwrap() <= 1e-9);
    assert!(!v["h"].as_array().unwrap().is_empty());
}

#[test]
fn suite_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["--set", "potentials=zero;sech", "--out", path.to_str().unwrap(), "suite", "scattering"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let recs = v["records"].as_array().unwrap();
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r["pass"].as_bool() == Some(true)));

    // a tolerance no computation can meet turns the run red
    let out = run(&["--set", "potentials=sech", "--set", "tol.unitarity=1e-30", "suite", "scattering"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL scattering/unitarity/defect/sech"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["--set", "nope=1", "suite", "scattering"][..],
        &["--set", "grid.n=2", "scatter"][..],
        &["scatter", "--potential", "box:bogus=1"][..],
        &["scatter", "--lambda-min", "2", "--lambda-max", "1"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    // clap usage errors share the code
    assert_eq!(run(&["suite", "everything"]).status.code(), Some(2));
}
