//! End-to-end tests of the `glueq` binary: exit codes, report files,
//! determinism of the exported matrices, and the shape-evaluation path.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn glueq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glueq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn info_reports_cells_and_cusps() {
    let out = glueq(&["info", &corpus("m004.json")]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["name"], "m004");
    assert_eq!(v["tetrahedra"], 2);
    assert_eq!(v["cells"]["edges"], 2);
    assert_eq!(v["boundary"]["components"], 1);
    assert_eq!(v["h1_manifold"]["rank"], 1);
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report_path: PathBuf = dir.path().join("report.json");
    let out = glueq(&[
        "verify",
        &corpus("m004.json"),
        "-n",
        "2..3",
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "verify failed: {}{}",
        stdout(&out),
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let reports = report.as_array().expect("array of reports");
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["triangulation"], "m004");
        assert_eq!(r["pass"], true);
        let checks = r["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        for c in checks {
            assert_eq!(c["status"], "pass", "failing check in report: {c}");
            assert!(c["id"].is_string() && c["ref"].is_string() && c["details"].is_string());
        }
    }
}

#[test]
fn matrices_output_is_deterministic() {
    for format in ["json", "csv"] {
        let a = glueq(&["matrices", &corpus("m129.json"), "-n", "3", "--format", format]);
        let b = glueq(&["matrices", &corpus("m129.json"), "-n", "3", "--format", format]);
        assert!(a.status.success() && b.status.success());
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "non-deterministic {format} output");
    }
}

#[test]
fn cusp_matrices_emit_rows_per_curve_and_level() {
    let out = glueq(&["cusp-matrices", &corpus("m129.json"), "-n", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Two cusps, two curves each, n−1 = 2 levels: 8 rows.
    assert_eq!(v["cusp"]["A"]["rows"], 8);
}

#[test]
fn homology_range_runs() {
    let out = glueq(&["homology", &corpus("m004.json"), "-n", "2..3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v["homology"].as_array().expect("array per n");
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["n"], 2);
    assert_eq!(entries[0]["groups"]["H4"]["torsion"][0], "2");
    assert_eq!(entries[1]["groups"]["H4"]["torsion"][0], "3");
}

#[test]
fn eval_accepts_complete_solution() {
    let out = glueq(&[
        "eval",
        &corpus("m004.json"),
        &corpus("m004_n2_complete_shapes.json"),
        "-n",
        "2",
    ]);
    assert!(
        out.status.success(),
        "eval failed: {}{}",
        stdout(&out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn eval_rejects_non_solution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shapes.json");
    std::fs::write(&path, r#"{"0,0000": [0.3, 0.9], "1,0000": [0.5, 0.7]}"#).unwrap();
    let out = glueq(&["eval", &corpus("m004.json"), path.to_str().unwrap(), "-n", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = glueq(&["info", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = glueq(&["info", "/nonexistent/file.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn snf_reads_exported_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"rows": 2, "cols": 2, "triplets": [[0, 0, "2"], [0, 1, "4"], [1, 1, "8"]]}"#,
    )
    .unwrap();
    let out = glueq(&["snf", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("rank"), "snf output: {text}");
}
