use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn compass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compass"))
        .args(args)
        .env_remove("COMPASS_WEIGHTS")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn assess_json_report() {
    let f = fixtures();
    let out = compass(&[
        "assess",
        "--protein",
        path_str(&f.join("complex_protein.pdb")),
        "--ligand",
        path_str(&f.join("complex_ligand.sdf")),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "compass.report/1");
    assert!(v["triple"]["binding_affinity"].is_f64());
    assert!(v["triple"]["clash_count"].is_u64());
    assert_eq!(v["provenance"]["protein_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn assess_missing_ligand_is_usage_error() {
    let out = compass(&["assess", "--protein", "p.pdb"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn assess_corrupt_sdf_names_stage() {
    let f = fixtures();
    let out = compass(&[
        "assess",
        "--protein",
        path_str(&f.join("audit/pair_09/protein.pdb")),
        "--ligand",
        path_str(&f.join("audit/pair_09/ligand.sdf")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse stage"));
}

#[test]
fn weights_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let (protein, ligand) = (f.join("complex_protein.pdb"), f.join("complex_ligand.sdf"));
    let args = ["assess", "--protein", path_str(&protein), "--ligand", path_str(&ligand)];
    let missing = dir.path().join("missing.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_compass"))
        .args(args)
        .env("COMPASS_WEIGHTS", &missing)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "env weights path is honoured");

    let fitted = dir.path().join("fitted.txt");
    std::fs::write(&fitted, compass_core::aa_score::default_weights().scaled(2.0).to_text()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_compass"))
        .args(args)
        .args(["--weights", path_str(&fitted), "--format", "json"])
        .env("COMPASS_WEIGHTS", &missing)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["weights_fitted"], true);
}

#[test]
fn audit_writes_summary_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let mut summaries = Vec::new();
    for jobs in ["1", "8"] {
        let summary = dir.path().join(format!("summary_{jobs}.json"));
        let csv = dir.path().join(format!("triples_{jobs}.csv"));
        let out = compass(&[
            "audit",
            "--dir",
            path_str(&f.join("audit")),
            "--jobs",
            jobs,
            "--out",
            path_str(&summary),
            "--csv",
            path_str(&csv),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let csv_text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(csv_text.lines().count(), 1 + 9);
        summaries.push(std::fs::read_to_string(&summary).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
    let v: Value = serde_json::from_str(&summaries[0]).unwrap();
    assert_eq!(v["schema"], "compass.audit/1");
    assert_eq!(v["n_scored"], 9);
}

#[test]
fn audit_empty_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = compass(&["audit", "--dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn score_identity_and_mismatch() {
    let out = compass(&["score", "--pred", "10", "--truth", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["lan_mse"], 0.0);

    let out = compass(&["score", "--pred", "1,2", "--truth", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn score_total_on_exemplar_triples() {
    let out = compass(&[
        "score",
        "--pred=-6.46,0.16,3,-3.13,11.9,19",
        "--truth=-11.33,7.31,6,3505.32,20.65,205",
        "--feature",
        "total",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let total = v["total"].as_f64().unwrap();
    assert!(total.is_finite() && total > 0.0);
    let mean = (v["affinity"].as_f64().unwrap() + v["strain"].as_f64().unwrap() + v["clash"].as_f64().unwrap()) / 3.0;
    assert!((total - mean).abs() < 1e-12);
}

/// Writes an executable that ignores its request and prints `response`.
#[cfg(unix)]
fn mock_backend(dir: &Path, response: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let body = dir.join("response.json");
    std::fs::write(&body, response).unwrap();
    let script = dir.join("dock.sh");
    std::fs::write(
        &script,
        format!("#!/bin/sh\ncat > /dev/null\ncat '{}'\n", body.display()),
    )
    .unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    script
}

#[cfg(unix)]
fn redock(dir: &Path, backend: &Path, extra: &[&str]) -> (Output, PathBuf, PathBuf) {
    let f = fixtures();
    let complex = dir.join("complex.pdb");
    let trace = dir.join("trace.json");
    let spec = format!("cmd:{}", backend.display());
    let (protein, ligand) = (f.join("complex_protein.pdb"), f.join("complex_ligand.sdf"));
    let mut args = vec![
        "redock",
        "--protein",
        path_str(&protein),
        "--ligand",
        path_str(&ligand),
        "--backend",
        &spec,
        "--out",
        path_str(&complex),
        "--trace",
        path_str(&trace),
    ];
    args.extend_from_slice(extra);
    (compass(&args), complex, trace)
}

#[cfg(unix)]
fn echo_ligand_response() -> String {
    let sdf = std::fs::read_to_string(fixtures().join("complex_ligand.sdf")).unwrap();
    serde_json::json!({ "ligand_sdf_posed": sdf }).to_string()
}

#[cfg(unix)]
#[test]
fn redock_favorable_first_pose() {
    let dir = tempfile::tempdir().unwrap();
    let backend = mock_backend(dir.path(), &echo_ligand_response());
    let (out, complex, trace) = redock(dir.path(), &backend, &["--max-iter", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(v["verdict"], "favorable");
    assert_eq!(v["trace"].as_array().unwrap().len(), 1);
    assert!(std::fs::read_to_string(complex).unwrap().contains("HETATM"));
}

#[cfg(unix)]
#[test]
fn redock_exhausts_within_max_iter() {
    let dir = tempfile::tempdir().unwrap();
    let backend = mock_backend(dir.path(), &echo_ligand_response());
    // nothing is favorable under this threshold, so the loop keeps asking
    let config = dir.path().join("strict.toml");
    std::fs::write(&config, "[thresholds]\nmax_affinity = -1000.0\n").unwrap();
    let (out, _, trace) = redock(
        dir.path(),
        &backend,
        &["--max-iter", "5", "--config", path_str(&config)],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(v["verdict"], "exhausted");
    let steps = v["trace"].as_array().unwrap();
    assert_eq!(steps.len(), 5);
    assert_eq!(steps[4]["seed"], 3);
}

#[cfg(unix)]
#[test]
fn redock_bad_backend_json_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let backend = mock_backend(dir.path(), "not json");
    let config = dir.path().join("strict.toml");
    std::fs::write(&config, "[thresholds]\nmax_affinity = -1000.0\n").unwrap();
    let (out, _, _) = redock(dir.path(), &backend, &["--config", path_str(&config)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("backend"));
}

#[test]
fn redock_unknown_backend_spec_is_usage_error() {
    let f = fixtures();
    let (protein, ligand) = (f.join("complex_protein.pdb"), f.join("complex_ligand.sdf"));
    let out = compass(&[
        "redock",
        "--protein",
        path_str(&protein),
        "--ligand",
        path_str(&ligand),
        "--backend",
        "diffdock",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
