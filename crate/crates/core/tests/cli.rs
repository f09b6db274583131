//! Runs the `bvkit` binary and checks exit codes and report formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bvkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvkit")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn code(args: &[&str]) -> i32 {
    bvkit(args).status.code().unwrap()
}

#[test]
fn kernel_passes_and_small_dimensions_are_invalid() {
    assert_eq!(code(&["kernel", "--dim", "4"]), 0);
    assert_eq!(code(&["kernel", "--dim-range", "4..6"]), 0);
    assert_eq!(code(&["kernel", "--dim", "3"]), 2);
    assert_eq!(code(&["kernel", "--dim-range", "6..4"]), 2);
    assert_eq!(code(&["epsilon", "--dim-range", "4..=6"]), 0);
}

#[test]
fn quadform_exit_codes() {
    assert_eq!(code(&["quadform", "--dim", "4"]), 0);
    // trace-block determinants disagree with the reference from N = 5 on
    assert_eq!(code(&["quadform", "--dim", "5"]), 1);
}

#[test]
fn fixtures() {
    for (cmd, file, expected) in [
        ("qme-check", "trivial_bv.json", 0),
        ("qme-check", "qme_model.json", 0),
        ("qme-check", "anomalous.json", 1),
        ("relaxed-check", "one_pair_relaxed.json", 0),
        ("relaxed-check", "chain_relaxed.json", 0),
        ("relaxed-check", "corrupted_boundary.json", 1),
    ] {
        assert_eq!(code(&[cmd, "--input", &fixture(file)]), expected, "{cmd} {file}");
    }
    assert_eq!(code(&["qme-check", "--input", "/nonexistent.json"]), 2);
}

#[test]
fn pushforward_demo() {
    assert_eq!(code(&["pushforward-demo", "--dim", "4", "--lambda", "3/2", "--base-action"]), 0);
    assert_eq!(code(&["pushforward-demo", "--dim", "4", "--lambda", "0"]), 2);
}

#[test]
fn output_is_deterministic_in_every_format() {
    for format in ["json", "csv", "text"] {
        let args = ["quadform", "--dim", "4", "--seed", "9", "--format", format];
        let a = bvkit(&args);
        let b = bvkit(&args);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
    let json: serde_json::Value = serde_json::from_slice(&bvkit(&["kernel", "--dim", "5"]).stdout).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["results"][0]["dim"], 5);
    let csv = String::from_utf8(bvkit(&["kernel", "--dim-range", "4..5", "--format", "csv"]).stdout).unwrap();
    assert!(csv.lines().count() >= 3);
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bvkit(&["epsilon", "--dim", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"][0]["details"]["constant"], 2);
}
