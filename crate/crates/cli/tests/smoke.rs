//! End-to-end smoke tests for the `plasma` binary: command output, cache
//! behavior, and the documented exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn plasma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plasma"))
        .args(args)
        .output()
        .expect("spawn plasma")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn expand_with_bruteforce_check() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let out = plasma(&[
        "expand",
        "--N",
        "3",
        "--gamma",
        "4",
        "--check-bruteforce",
        "--cache-dir",
        cache,
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("count=5"), "{text}");
    assert!(text.contains("oracle check PASS"), "{text}");
    assert!(Path::new(cache).join("vdm_N3_G4.txt").exists());
    // Second run loads the cache and still passes the oracle check.
    let again = plasma(&[
        "expand",
        "--N",
        "3",
        "--gamma",
        "4",
        "--check-bruteforce",
        "--cache-dir",
        cache,
    ]);
    assert!(again.status.success());
    assert_eq!(stdout(&again), text);
}

#[test]
fn sphere_moments_csv_matches_reference() {
    let out = plasma(&[
        "sphere-moments",
        "--gamma",
        "4",
        "--n-list",
        "2",
        "--N-range",
        "2..3",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "N,I4\n2,-1.06666666666667\n3,-0.73469387755102\n"
    );
}

#[test]
fn disk_moments_json_mirrors_csv() {
    let out = plasma(&[
        "disk-moments",
        "--gamma",
        "4",
        "--n-list",
        "2",
        "--N-range",
        "2..2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let records: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(records[0]["N"], "2");
    assert_eq!(records[0]["M4"], "0.8125");
}

#[test]
fn diagrams_percent_error_column() {
    let out = plasma(&["diagrams", "--gamma", "2", "--N-range", "2..2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[0], "2");
    let err: f64 = cells[3].parse().unwrap();
    assert!((err - 5.236).abs() < 1e-3, "I4 error column {err}");
}

#[test]
fn fit_reproduces_reference_row() {
    let out = plasma(&[
        "fit",
        "--target",
        "sphere",
        "--gamma",
        "4",
        "--n",
        "2",
        "--N-range",
        "2..5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let cells: Vec<&str> = last.split(',').collect();
    let a: f64 = cells[2].parse().unwrap();
    let b: f64 = cells[3].parse().unwrap();
    assert!((a - 0.076709).abs() < 1e-5, "fit_a {a}");
    assert!((b + 2.81362).abs() < 1e-4, "fit_b {b}");
}

#[test]
fn verify_passes_on_small_grid() {
    let out = plasma(&["verify", "--gamma", "4", "--N-range", "2..3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("verify: all invariants hold"));
}

#[test]
fn exit_codes() {
    // Flag errors -> 64.
    let out = plasma(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(64));
    let out = plasma(&["expand", "--N", "3", "--gamma", "3"]);
    assert_eq!(out.status.code(), Some(64), "odd gamma is a usage error");
    // Resource limit -> 3.
    let out = plasma(&[
        "expand",
        "--N",
        "14",
        "--gamma",
        "4",
        "--member-limit",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Help -> 0.
    let out = plasma(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = plasma(&[
            "sphere-moments",
            "--gamma",
            "4",
            "--n-list",
            "2,3",
            "--N-range",
            "2..5",
            "--fit",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
}
