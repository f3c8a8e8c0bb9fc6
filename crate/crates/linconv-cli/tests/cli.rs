//! End-to-end tests of the `linconv` binary: exit-code contract, report
//! determinism, and the wire formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BALL_SPEC: &str = r#"{
  "family": "ball",
  "params": {"radius": 1.0},
  "bounding_radius": 1.5,
  "shell_width": 0.2,
  "anchor": [0, 0, 0, 0]
}
"#;

const MODEL_SPEC: &str = r#"{
  "family": "modelE",
  "params": {"c": 1.0, "r": 0.5},
  "bounding_radius": 0.5,
  "shell_width": 0.2,
  "anchor": [-0.1, 0, 0, 0]
}
"#;

// Flat face meeting a sphere: tangential defect exactly 0 on the face.
const LENS_SPEC: &str = r#"{
  "family": "custom",
  "constraints": ["x1", "x1^2 + y1^2 + x2^2 + y2^2 - 1"],
  "bounding_radius": 1.2,
  "shell_width": 0.3,
  "anchor": [-0.5, 0, 0, 0]
}
"#;

const CANONICAL_SYSTEM: &str = r#"{
  "center": [[0, 0], [0, 0]],
  "discs": [
    {"direction": [[1, 0], [0, 0]], "radius": 1.0},
    {"direction": [[0, 0], [1, 0]], "radius": 1.0}
  ]
}
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linconv"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_passes_on_the_ball_and_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "ball.json", BALL_SPEC);
    let json1 = dir.path().join("run1.json");
    let json2 = dir.path().join("run2.json");

    for json in [&json1, &json2] {
        let out = bin()
            .args(["check"])
            .arg(&spec)
            .args(["--samples", "200", "--seed", "3", "--workers", "2"])
            .arg("--json")
            .arg(json)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stdout(&out));
    }
    let a = fs::read(&json1).unwrap();
    let b = fs::read(&json2).unwrap();
    assert_eq!(a, b, "reports differ between reruns");

    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert!(parsed["tool_version"].is_string());
    assert_eq!(parsed["config"]["samples"], 200);
    let reports = parsed["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 8);
    for r in reports {
        assert_eq!(r["verdict"], "pass", "{r}");
        assert!(r["elapsed_ms"].is_null());
    }
}

#[test]
fn check_fails_on_the_model_domain() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "model.json", MODEL_SPEC);
    let out = bin()
        .args(["check"])
        .arg(&spec)
        .args(["--criteria", "defect,hull,chord", "--samples", "200", "--workers", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn worker_count_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "ball.json", BALL_SPEC);
    let mut outputs = Vec::new();
    for workers in ["1", "2"] {
        let json = dir.path().join(format!("w{workers}.json"));
        let out = bin()
            .args(["check"])
            .arg(&spec)
            .args(["--criteria", "gauge,hor16", "--samples", "150", "--workers", workers])
            .arg("--json")
            .arg(&json)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stdout(&out));
        let parsed: serde_json::Value =
            serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
        // The config echo records the workers flag; the reports themselves
        // (verdicts, margins, witnesses) must match exactly.
        outputs.push(parsed["reports"].clone());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn missing_and_invalid_specs_exit_2() {
    let out = bin().args(["check", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(code(&out), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"family": "ball""#);
    let out = bin().args(["check"]).arg(&bad).output().unwrap();
    assert_eq!(code(&out), 2);

    // Unknown criterion token.
    let spec = write(dir.path(), "ball.json", BALL_SPEC);
    let out = bin()
        .args(["check"])
        .arg(&spec)
        .args(["--criteria", "gauge,bogus"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);

    // Unusable output path → I/O failure.
    let out = bin()
        .args(["check"])
        .arg(&spec)
        .args(["--criteria", "defect", "--samples", "200"])
        .args(["--json", "/nonexistent-dir/report.json"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
}

#[test]
fn pipeline_exit_codes_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", MODEL_SPEC);
    let ball = write(dir.path(), "ball.json", BALL_SPEC);

    let json1 = dir.path().join("pipe1.json");
    let json2 = dir.path().join("pipe2.json");
    for json in [&json1, &json2] {
        let out = bin()
            .args(["pipeline"])
            .arg(&model)
            .args(["--samples", "150", "--seed", "7", "--workers", "2"])
            .arg("--json")
            .arg(json)
            .output()
            .unwrap();
        assert_eq!(code(&out), 1, "{}", stdout(&out));
    }
    assert_eq!(fs::read(&json1).unwrap(), fs::read(&json2).unwrap());
    let parsed: serde_json::Value = serde_json::from_slice(&fs::read(&json1).unwrap()).unwrap();
    assert_eq!(parsed["verdict"], "fail");
    assert!(parsed["frame"]["c"].as_f64().unwrap() >= 1.0);
    assert_eq!(parsed["discs"].as_array().unwrap().len(), 2);
    assert_eq!(parsed["hull_report"]["verdict"], "fail");

    let out = bin()
        .args(["pipeline"])
        .arg(&ball)
        .args(["--samples", "100", "--workers", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("no violation"));
}

#[test]
fn pipeline_is_inconclusive_on_a_flat_face() {
    let dir = tempfile::tempdir().unwrap();
    let lens = write(dir.path(), "lens.json", LENS_SPEC);
    let out = bin()
        .args(["pipeline"])
        .arg(&lens)
        .args(["--samples", "100", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", stdout(&out));
}

#[test]
fn defect_subcommand_classifies_boundary_points() {
    let dir = tempfile::tempdir().unwrap();
    let ball = write(dir.path(), "ball.json", BALL_SPEC);
    let out = bin()
        .args(["defect"])
        .arg(&ball)
        .args(["--point", "1,0,0,0"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("+5.0000"));

    let model = write(dir.path(), "model.json", MODEL_SPEC);
    let out = bin()
        .args(["defect"])
        .arg(&model)
        .args(["--point", "0,0,0,0"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1, "{}", stdout(&out));

    // Flat lens face: defect 0 → inconclusive.
    let lens = write(dir.path(), "lens.json", LENS_SPEC);
    let out = bin()
        .args(["defect"])
        .arg(&lens)
        .args(["--point", "0,0.2,0.3,0.1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", stdout(&out));
}

#[test]
fn discs_subcommand_reports_margins_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("profile.csv");
    let out = bin()
        .args(["discs", "--c", "1", "--delta", "0.05"])
        .arg("--csv")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("-0.790000000000"));
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "theta,x,rho_c_over_delta,quadratic");
    for line in lines {
        let rho: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(rho < 0.0, "{line}");
    }

    // Too-large delta: construction invalid.
    let out = bin().args(["discs", "--c", "1", "--delta", "0.5"]).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("INVALID"));
}

#[test]
fn hull_subcommand_answers_membership_queries() {
    let dir = tempfile::tempdir().unwrap();
    let system = write(dir.path(), "system.json", CANONICAL_SYSTEM);

    let out = bin()
        .args(["hull", "--system"])
        .arg(&system)
        .args(["--query", "0.5,0,0.5,0"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("convex hull member:   true"));
    assert!(text.contains("bipolar hull member:  true"));

    let out = bin()
        .args(["hull", "--system"])
        .arg(&system)
        .args(["--query", "0.8,0,0.5,0"])
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("convex hull member:   false"));
    assert!(text.contains("sup_value 1.3"));
}

#[test]
fn csv_margins_flatten_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "ball.json", BALL_SPEC);
    let csv_path = dir.path().join("margins.csv");
    let out = bin()
        .args(["check"])
        .arg(&spec)
        .args(["--criteria", "gauge", "--samples", "50"])
        .arg("--csv")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("criterion,sample,margin\n"));
    assert_eq!(csv.lines().count(), 51);
}
