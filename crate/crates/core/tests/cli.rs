use std::path::{Path, PathBuf};
use std::process::Command;

use qns_capacity::capacity::snap_floor;
use qns_capacity::cli::{run, ReportJson, EXIT_INPUT, EXIT_OK};

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qnscap").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_spec(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn compute_json(path: &Path, extra: &[&str]) -> (i32, ReportJson, String) {
    let mut args = vec!["compute", path.to_str().unwrap(), "--json"];
    args.extend_from_slice(extra);
    let (code, out, err) = run_cli(&args);
    let parsed = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} / {err}"));
    (code, parsed, out)
}

#[test]
fn compute_two_term_pauli() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "p.json", r#"{"type": "pauli", "probs": [0.5, 0.0, 0.0, 0.5]}"#);
    let (code, r, _) = compute_json(&p, &[]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.upsilon, 2.0);
    assert_eq!(r.m0_qns, 2);
    assert_eq!(r.dim_s, 2);
    assert_eq!(r.m0_se, Some(2));
    assert_eq!(r.c0_se_bits, Some(1.0));
    assert!(r.unital && r.certified);
    assert!(r.discrepancies.is_empty());
}

#[test]
fn compute_nonunital_extremal() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "e.json", r#"{"type": "extremal", "theta": 0.7, "phi": 0.3}"#);
    let (code, r, _) = compute_json(&p, &[]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.upsilon, 1.0);
    assert_eq!(r.m0_qns, 1);
    assert!(!r.unital);
    assert_eq!(r.choi_rank, 2);
}

#[test]
fn compute_two_copies_of_dephasing() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "d.json", r#"{"type": "pauli", "probs": [0.7, 0.0, 0.0, 0.3]}"#);
    let (code, r, _) = compute_json(&p, &["--copies", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.c0_qns_finite_n, vec![(2, 1.0)]);
}

#[test]
fn compute_kraus_and_choi_specs_agree() {
    let dir = tempfile::tempdir().unwrap();
    // Identity channel written both ways.
    let k = write_spec(
        dir.path(),
        "k.json",
        r#"{"type": "kraus", "operators": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#,
    );
    let c = write_spec(
        dir.path(),
        "c.json",
        r#"{"type": "choi", "matrix": [
            [[1,0],[0,0],[0,0],[1,0]],
            [[0,0],[0,0],[0,0],[0,0]],
            [[0,0],[0,0],[0,0],[0,0]],
            [[1,0],[0,0],[0,0],[1,0]]]}"#,
    );
    let (_, rk, _) = compute_json(&k, &[]);
    let (_, rc, _) = compute_json(&c, &[]);
    assert_eq!(rk, rc);
    assert_eq!(rk.upsilon, 4.0);
    assert_eq!(rk.m0_qns, 4);
}

#[test]
fn compute_generalized_pauli() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(
        dir.path(),
        "g.json",
        r#"{"type": "generalized_pauli", "d": 3, "probs": [[0.5, 0.5, 0], [0, 0, 0], [0, 0, 0]]}"#,
    );
    let (code, r, _) = compute_json(&p, &[]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.upsilon, 4.5);
    assert_eq!(r.m0_qns, 4);
    assert_eq!(r.m0_se, None);
}

#[test]
fn json_round_trip_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "p.json", r#"{"type": "pauli", "probs": [0.4, 0.3, 0.3, 0.0]}"#);
    let (_, r, text) = compute_json(&p, &[]);
    assert_eq!(snap_floor(r.upsilon), r.m0_qns);
    let again = serde_json::to_string_pretty(&r).unwrap();
    assert_eq!(again, text.trim_end());
}

#[test]
fn table_output_lists_fields() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "p.json", r#"{"type": "pauli", "probs": [1, 0, 0, 0]}"#);
    let (code, out, _) = run_cli(&["compute", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    for key in ["upsilon", "m0_qns", "dim_s", "m0_se", "certified", "gap"] {
        assert!(out.lines().any(|l| l.starts_with(key)), "{key} missing in\n{out}");
    }
}

#[test]
fn verify_is_deterministic() {
    let (c1, a, _) = run_cli(&["verify", "--seed", "11", "--json"]);
    let (c2, b, _) = run_cli(&["verify", "--seed", "11", "--json"]);
    assert_eq!(c1, EXIT_OK);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(dir.path(), "bad.json", r#"{"type": "pauli", "probs": [0.5, 0.5]}"#);
    let sum = write_spec(dir.path(), "sum.json", r#"{"type": "pauli", "probs": [0.5, 0.6, 0, 0]}"#);
    let unknown = write_spec(dir.path(), "u.json", r#"{"type": "erasure"}"#);
    let good = write_spec(dir.path(), "g.json", r#"{"type": "pauli", "probs": [1, 0, 0, 0]}"#);
    let missing = dir.path().join("nope.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["compute", bad.to_str().unwrap()],
        vec!["compute", sum.to_str().unwrap()],
        vec!["compute", unknown.to_str().unwrap()],
        vec!["compute", missing.to_str().unwrap()],
        vec!["compute", good.to_str().unwrap(), "--copies", "0"],
        vec!["compute", good.to_str().unwrap(), "--copies", "5"],
        vec!["compute", good.to_str().unwrap(), "--gap-tol", "-1"],
        vec!["sweep", bad.to_str().unwrap()],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (code, _, err) = run_cli(&args);
        assert_eq!(code, EXIT_INPUT, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn sweep_extremal_grid() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(
        dir.path(),
        "s.json",
        r#"{"family": "extremal", "grid": {"theta": [0.4, 0.9], "phi": {"start": 0.4, "stop": 0.9, "step": 0.5}}}"#,
    );
    let (code, out, _) = run_cli(&["sweep", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "theta,phi,upsilon,m0_qns,dim_s,certified");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let (theta, phi): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let ups: f64 = f[2].parse().unwrap();
        let expected = if theta == phi { 2.0 } else { 1.0 };
        assert!((ups - expected).abs() < 1e-6, "{line}");
        assert_eq!(f[5], "true");
    }
}

#[test]
fn sweep_pauli_edge_includes_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(
        dir.path(),
        "s.json",
        r#"{"family": "pauli_edge", "grid": {"t": {"start": 0.0, "stop": 1.0, "step": 0.25}}}"#,
    );
    let (code, out, _) = run_cli(&["sweep", p.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<String>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    let m0: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(m0, ["4", "2", "2", "2", "4"]);
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_qnscap");
    let dir = tempfile::tempdir().unwrap();
    let p = write_spec(dir.path(), "p.json", r#"{"type": "pauli", "probs": [0.25, 0.25, 0.25, 0.25]}"#);
    let ok = Command::new(exe).args(["compute", p.to_str().unwrap(), "--json"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let r: ReportJson = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(r.upsilon, 1.0);
    let bad = Command::new(exe).args(["compute", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
    let help = Command::new(exe).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_OK));
}
