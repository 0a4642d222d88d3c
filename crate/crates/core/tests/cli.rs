use std::fs;
use std::process::Command;

use supnorm::bounds::BoundReport;
use supnorm::cli::{main_with_args, EXIT_INPUT, EXIT_KERNEL, EXIT_OK, EXIT_UNSUPPORTED};
use supnorm::verifier::VerificationReport;
use tempfile::tempdir;

const GENUS2: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/genus2.json");

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("supnorm").chain(args.iter().copied()))
}

#[test]
fn bounds_json_round_trip() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("bounds.json");
    assert_eq!(run(&["bounds", "--k-min", "2", "--k-max", "30", "--format", "json", "--out", out.to_str().unwrap()]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    let report = BoundReport::from_json(&text).unwrap();
    assert_eq!(report.rows.len(), 58);
    assert_eq!(BoundReport::from_json(&report.to_json().unwrap()).unwrap(), report);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert_eq!(run(&["bounds", "--k-min", "2", "--k-max", "60", "--out", p.to_str().unwrap()]), EXIT_OK);
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert!(String::from_utf8(text).unwrap().starts_with("k,region,upper,lower,source\n"));
}

#[test]
fn single_weight_on_a_compact_quotient() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("g2.csv");
    assert_eq!(run(&["bounds", "--domain", GENUS2, "--k-min", "2", "--k-max", "2", "--out", out.to_str().unwrap()]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.contains("cocompact-exponential"));
}

#[test]
fn constants_ledger_marks_absent_fields() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("c.csv");
    assert_eq!(run(&["constants", "--domain", GENUS2, "--out", out.to_str().unwrap()]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.starts_with("B_Y0,absent")), "{text}");
}

#[test]
fn curves_write_one_file_per_region() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("curves");
    assert_eq!(run(&["curves", "--k-min", "2", "--k-max", "40", "--out", out.to_str().unwrap()]), EXIT_OK);
    for f in ["compact.csv", "cusp1.csv"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        assert!(text.starts_with("k,bound\n"));
        assert_eq!(text.lines().count(), 40);
    }
}

#[test]
fn verify_small_grid() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("v.json");
    assert_eq!(run(&["verify", "--weights", "12,16", "--grid", "30", "--format", "json", "--out", out.to_str().unwrap()]), EXIT_OK);
    let report = VerificationReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.all_passed());
    assert_eq!(report.weights.len(), 2);
}

#[test]
fn input_errors() {
    assert_eq!(run(&["constants", "--domain", "/nonexistent.json"]), EXIT_INPUT);
    assert_eq!(run(&["constants", "--Y0", "2", "--Y", "4.2"]), EXIT_INPUT);
    assert_eq!(run(&["constants", "--Y0=-1"]), EXIT_INPUT);
    assert_eq!(run(&["bounds", "--k-min", "9", "--k-max", "3"]), EXIT_INPUT);
    assert_eq!(run(&["verify", "--weights", "14"]), EXIT_INPUT);
    assert_eq!(run(&["frobnicate"]), EXIT_INPUT);
    assert_eq!(run(&["constants", "--Y0", "2", "--Y", "4.131182235954578"]), EXIT_OK);
}

#[test]
fn unsupported_verification() {
    assert_eq!(run(&["verify", "--domain", GENUS2]), EXIT_UNSUPPORTED);
}

#[test]
fn kernel_check_exit_codes() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("k.txt");
    assert_eq!(run(&["kernel-check", "--out", out.to_str().unwrap()]), EXIT_OK);
    assert_eq!(run(&["kernel-check", "--transform-tol", "1e-16", "--out", out.to_str().unwrap()]), EXIT_KERNEL);
    assert!(fs::read_to_string(&out).unwrap().contains("FAIL"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_supnorm");
    let status = Command::new(bin).args(["constants", "--domain", "/nonexistent.json"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&status.stderr).contains("error"));
    let ok = Command::new(bin).args(["bounds", "--k-min", "6", "--k-max", "6"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).lines().count(), 3);
}
