//! End-to-end tests of the `qwigner` binary: artifact reproducibility, exit
//! codes, and the JSON contracts of the query subcommands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qwigner_core::{AtomicMeasure, GridField};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwigner"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should launch")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

#[test]
fn compute_exact_artifacts_are_byte_identical_across_runs() {
    let measure = data("measure_two_point.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = run(&[
            "compute-exact",
            "--matrix",
            "classical:1",
            "--measure",
            measure.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "compute-exact failed: {out:?}");
    }
    let read = |dir: &tempfile::TempDir| std::fs::read(dir.path().join("chirp_sum.json")).unwrap();
    assert_eq!(
        read(&dirs[0]),
        read(&dirs[1]),
        "chirp_sum.json should be bit-reproducible"
    );
}

#[test]
fn detect_prints_the_shared_right_route() {
    let out = run(&[
        "detect",
        "--matrix",
        data("matrix_shared_right.json").to_str().unwrap(),
        "--measure",
        data("measure_two_point.json").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "detect failed: {out:?}");
    let text = stdout_str(&out);
    assert!(
        text.contains("route-2"),
        "expected route-2 in detect output, got:\n{text}"
    );
    assert!(
        text.contains("[satisfied]"),
        "expected satisfied conditions, got:\n{text}"
    );
}

#[test]
fn malformed_input_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"d\": 1, \"atoms\": \"nope\"}").unwrap();
    let out = run(&[
        "detect",
        "--matrix",
        "classical:1",
        "--measure",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "malformed JSON should exit 1: {out:?}"
    );
}

#[test]
fn usage_error_exits_one_and_help_exits_zero() {
    let out = run(&["detect", "--matrix", "classical:1"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "missing required flag should exit 1"
    );
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0), "--help should exit 0");
}

#[test]
fn singular_matrix_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let singular = dir.path().join("singular.json");
    std::fs::write(
        &singular,
        "{\"d\":1,\"A0\":[[1.0]],\"B0\":[[1.0]],\"C0\":[[1.0]],\"D0\":[[1.0]]}",
    )
    .unwrap();
    let out = run(&["dual", "--matrix", singular.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "singular matrix should exit 2: {out:?}"
    );
}

#[test]
fn counterexample_scan_reports_rationality_and_windows() {
    let out = run(&[
        "counterexample",
        "--slope=-1.4142135623730951",
        "--shift",
        "0.5",
    ]);
    assert!(out.status.success(), "counterexample failed: {out:?}");
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(
        value["windows"].as_array().unwrap().len(),
        10,
        "expected ten scan windows"
    );
    assert_eq!(
        value["slope_rationality"]["is_rational"],
        serde_json::json!(false)
    );
    assert_eq!(
        value["shift_rationality"]["is_rational"],
        serde_json::json!(true)
    );
    assert_eq!(value["accumulation"], serde_json::json!(true));
}

#[test]
fn compute_grid_output_loads_as_a_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "compute-grid",
        "--matrix",
        "classical:1",
        "--signal",
        data("signal_gaussian.json").to_str().unwrap(),
        "--x-half",
        "1.0",
        "--x-step",
        "0.25",
        "--omega-half",
        "1.0",
        "--omega-step",
        "0.25",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "compute-grid failed: {out:?}");
    let field = GridField::load(&dir.path().join("wigner.json")).unwrap();
    assert_eq!(field.shape(), &[9, 9], "expected a 9×9 output grid");
    assert!(
        field.max_imag_abs() < 1e-9,
        "Wigner field of a real signal should be real, max imag {}",
        field.max_imag_abs()
    );
}

#[test]
fn generate_qc_measure_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "generate-qc",
        "--spec",
        data("qc_half_shift.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "generate-qc failed: {out:?}");
    let text = std::fs::read_to_string(dir.path().join("measure.json")).unwrap();
    let mu: AtomicMeasure = serde_json::from_str(&text).unwrap();
    assert_eq!(
        mu.len(),
        17,
        "window [-4,4] holds 9 integers and 8 half-shifted points"
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], serde_json::json!("generate-qc"));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 1);
}

#[test]
fn pair_with_matrix_reports_a_tiny_discrepancy() {
    let out = run(&[
        "pair",
        "--measure",
        data("measure_two_point.json").to_str().unwrap(),
        "--matrix",
        "classical:1",
    ]);
    assert!(out.status.success(), "pair failed: {out:?}");
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let disc = value["relation"]["discrepancy"].as_f64().unwrap();
    assert!(
        disc < 1e-10,
        "pairing and transform-side value should agree, discrepancy {disc}"
    );
}

#[test]
fn run_scenario_respects_overrides_and_rejects_unknown_commands() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    std::fs::write(
        &scenario,
        format!(
            "{{\"command\":\"compute-exact\",\"matrix\":\"classical:1\",\"measure\":{:?}}}",
            data("measure_two_point.json").to_str().unwrap()
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("artifacts");
    let out = run(&[
        "run",
        "--config",
        scenario.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "run with --out override failed: {out:?}"
    );
    assert!(
        out_dir.join("chirp_sum.json").exists(),
        "override output dir should be used"
    );

    let bogus = dir.path().join("bogus.json");
    std::fs::write(&bogus, "{\"command\":\"no-such-thing\"}").unwrap();
    let out = run(&["run", "--config", bogus.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "unknown scenario command should exit 1: {out:?}"
    );
}
