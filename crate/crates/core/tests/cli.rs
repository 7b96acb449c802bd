use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tubeap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubeap")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const ONE_TERM: &str = r#"{"dimension":1,"terms":[{"lambda":[1.0],"re":1.0,"im":0.0}]}"#;
const OCTANT: &str = r#"{"kind":"polyhedral","dimension":3,"generators":[[1,0,0],[0,1,0],[0,0,1]]}"#;

#[test]
fn eval_one_term_gives_inverse_e() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let out = tubeap(&["eval", "--sum", &sum, "--x", "0", "--y", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["re"].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn eval_accepts_negative_coordinates() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let out = tubeap(&["eval", "--sum", &sum, "--x", "-1.5", "--y", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["modulus"].as_f64().unwrap() - 1.0f64.exp()).abs() < 1e-14);
}

#[test]
fn octant_is_self_dual() {
    let dir = TempDir::new().unwrap();
    let cone = write(&dir, "octant.json", OCTANT);
    let out = tubeap(&["dual", "--cone", &cone]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dual = tubeap::cones::Cone::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let octant = tubeap::cones::Cone::orthant(3).unwrap();
    assert!(dual.approx_eq(&octant, 1e-12, 1e-12));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = tubeap(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = tubeap(&["eval", "--sum", "/nonexistent/sum.json", "--x", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_vector_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    assert_eq!(tubeap(&["eval", "--sum", &sum, "--x", "zero"]).status.code(), Some(2));
    assert_eq!(tubeap(&["eval", "--sum", &sum, "--x", "0,1"]).status.code(), Some(2));
}

#[test]
fn fejer_emits_damped_sum() {
    let dir = TempDir::new().unwrap();
    let sum = write(
        &dir,
        "pair.json",
        r#"{"dimension":1,"terms":[{"lambda":[1.0],"re":1.0,"im":0.0},{"lambda":[2.0],"re":1.0,"im":0.0}]}"#,
    );
    let out = tubeap(&["fejer", "--sum", &sum, "--q", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let sigma = tubeap::ExponentialSum::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(sigma.coefficient_at(&[1.0], 0.0).re, 0.75);
    assert_eq!(sigma.coefficient_at(&[2.0], 0.0).re, 0.5);

    let out = tubeap(&["fejer", "--sum", &sum, "--q", "inf"]);
    let sigma = tubeap::ExponentialSum::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(sigma.coefficient_at(&[1.0], 0.0).re, 1.0);
}

#[test]
fn mean_recovers_coefficient() {
    let dir = TempDir::new().unwrap();
    let sum = write(
        &dir,
        "pair.json",
        r#"{"dimension":1,"terms":[{"lambda":[1.0],"re":0.5,"im":0.0},{"lambda":[3.0],"re":1.0,"im":0.0}]}"#,
    );
    let out = tubeap(&["mean", "--sum", &sum, "--lambda", "1", "--n", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["re"].as_f64().unwrap() - 0.5).abs() <= 1.0 / 2000.0);

    let out = tubeap(&["mean", "--sum", &sum, "--lambda", "1", "--n", "10", "--sampled", "4000"]);
    let v = stdout_json(&out);
    assert!(v["error_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn smooth_rejects_inadmissible_width() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let ok = tubeap(&["smooth", "--sum", &sum, "--width", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = tubeap(&["smooth", "--sum", &sum, "--width", &std::f64::consts::TAU.to_string()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn almost_periods_of_a_periodic_sum() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let out = tubeap(&[
        "almost-periods",
        "--sum",
        &sum,
        "--epsilon",
        "1e-6",
        "--window",
        "7",
        "--step",
        "0.0062831853071795865",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let taus = v["taus"].as_array().unwrap();
    assert!(taus
        .iter()
        .any(|t| (t[0].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-9));
}

#[test]
fn indicator_of_one_term() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let out = tubeap(&["indicator", "--sum", &sum, "--y", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["slope"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(v["oracle"].as_f64().unwrap(), -1.0);
}

#[test]
fn verify_writes_report_and_exit_code() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let half_line = write(&dir, "half.json", r#"{"kind":"polyhedral","dimension":1,"generators":[[1]]}"#);
    let out = tubeap(&["verify", "max-modulus", "--sum", &sum, "--cone", &half_line, "--y", "0", "--y", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let report = &v[0];
    for field in ["check", "status", "max_violation", "tolerance", "instance_digest", "grid_provenance"] {
        assert!(report.get(field).is_some(), "missing {field}");
    }
    assert_eq!(report["status"], "pass");

    // spectrum outside the cone: precondition failure is an input error
    let neg = write(&dir, "neg.json", r#"{"kind":"polyhedral","dimension":1,"generators":[[-1]]}"#);
    let out = tubeap(&["verify", "max-modulus", "--sum", &sum, "--cone", &neg, "--y", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_ray_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let half_line = write(&dir, "half.json", r#"{"kind":"polyhedral","dimension":1,"generators":[[1]]}"#);
    let args = |t_max: &'static str| {
        [
            "verify", "extension-limit", "--sum", &sum, "--cone", &half_line, "--cone-prime", &half_line,
            "--direction", "1", "--t-max", t_max,
        ]
        .map(str::to_string)
    };
    // the majorant e^{-t} is still far above the limit at t = 1
    let out = Command::new(env!("CARGO_BIN_EXE_tubeap")).args(args("1")).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)[0]["status"], "fail");
    let out = Command::new(env!("CARGO_BIN_EXE_tubeap")).args(args("40")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    let dir = TempDir::new().unwrap();
    let sum = write(&dir, "one.json", ONE_TERM);
    let ok = tubeap(&["verify", "coefficient-bound", "--sum", &sum, "--y", "0"]);
    assert_eq!(ok.status.code(), Some(0));
    let out = tubeap(&["--tol", "-1", "verify", "coefficient-bound", "--sum", &sum, "--y", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fejer_check_on_commensurable_sum() {
    let dir = TempDir::new().unwrap();
    let sum = write(
        &dir,
        "pair.json",
        r#"{"dimension":1,"terms":[{"lambda":[1.0],"re":1.0,"im":0.0},{"lambda":[-2.0],"re":0.3,"im":0.4}]}"#,
    );
    let out = tubeap(&["verify", "fejer", "--sum", &sum, "--grid", "400"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn csv_report_schema() {
    let out = tubeap(&["suite", "--instances", "1", "--format", "csv"]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["check", "status", "reason", "max_violation", "tolerance", "instance_digest", "grid_provenance"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let v = &row[3];
        assert!(v.contains('e'), "{v}");
        let mantissa = v.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    }
}

#[test]
fn suite_output_is_reproducible_and_reparses() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = tubeap(&["suite", "--seed", "7", "--instances", "1", "--out", path.to_str().unwrap()]);
        assert!(out.stdout.is_empty());
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let reports: Vec<tubeap::verify::VerificationReport> = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&reports).unwrap() + "\n", a);
}

#[test]
fn suite_config_file() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "config.json",
        r#"{"seed":3,"instances":2,"dimensions":[1],"checks":["fejer_convergence","smoothing_identity"]}"#,
    );
    let out = tubeap(&["suite", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 4);

    let bad = write(&dir, "bad.json", r#"{"seed":3,"bogus":1}"#);
    assert_eq!(tubeap(&["suite", "--config", &bad]).status.code(), Some(2));
    assert!(Path::new(&bad).exists());
}
