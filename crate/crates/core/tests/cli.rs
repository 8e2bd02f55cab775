use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use kmn_core::deformation::predicted_kmn;
use kmn_core::registry::{self, NS_MU};

fn kmn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmn")).args(args).output().expect("kmn runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn sasakian_with(from: &str, to: &str) -> String {
    let text = registry::SASAKIAN_R3;
    assert!(text.contains(from), "fixture text drifted");
    text.replacen(from, to, 1)
}

#[test]
fn verify_flat_space_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = kmn(&["verify", "euclidean-r3", "--grid", "3", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = read_json(&json);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["manifest"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn json_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = kmn(&["verify", "ns-0.5", "--grid", "3", "--json", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn deform_then_extract() {
    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("ns.toml");
    std::fs::write(&source, registry::NS_HALF).unwrap();
    let emitted = dir.path().join("ns-a2.toml");
    let out = kmn(&["deform", source.to_str().unwrap(), "--a", "2", "--grid", "3", "--emit", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let json = dir.path().join("k.json");
    let out = kmn(&["extract", emitted.to_str().unwrap(), "--grid", "3", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let want = predicted_kmn(0.75, NS_MU, 0.0, 2.0);
    assert_eq!(want.kappa, 0.9375);
    let report = read_json(&json);
    let kmn_section = report["sections"].as_array().unwrap().iter().find(|s| s["name"] == "kmn").unwrap();
    let points = kmn_section["details"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 27);
    for p in points {
        assert!((p["kappa"].as_f64().unwrap() - want.kappa).abs() < 1e-6);
        assert!((p["mu"].as_f64().unwrap() - want.mu).abs() < 1e-6);
        assert!((p["nu"].as_f64().unwrap() - want.nu).abs() < 1e-6);
    }
}

#[test]
fn asymmetric_metric_is_a_manifest_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, sasakian_with(r#"["0", "1/4", "0"]"#, r#"["0.1", "1/4", "0"]"#)).unwrap();
    let out = kmn(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("chart.metric") && err.contains("at ["), "{err}");
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, sasakian_with("1/4 + y^2/4", "1/4 + y^^2/4")).unwrap();
    let out = kmn(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("chart.metric[0][0]") && err.contains("at byte 8"), "{err}");
}

#[test]
fn missing_manifest_exits_2() {
    let out = kmn(&["verify", "/nonexistent/manifest.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/manifest.toml"));
}

#[test]
fn non_positive_deformation_is_rejected() {
    let out = kmn(&["deform", "ns-0.5", "--a", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn examples_lists_the_registry() {
    let out = kmn(&["examples"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for entry in registry::registry() {
        assert!(text.contains(&entry.name), "{} missing", entry.name);
    }
}

#[test]
fn fit_and_conformal_run() {
    for cmd in ["fit", "conformal"] {
        let out = kmn(&[cmd, "su2-sasakian", "--grid", "3"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stderr(&out));
    }
}
