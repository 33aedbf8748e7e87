// Copyright 2026 qmarkov Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs of the `qmc` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qmarkov::golden::GoldenFile;
use qmarkov::report::VerificationReport;

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(format!("{name}.model"))
}

fn qmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmc"))
        .args(args)
        .output()
        .expect("qmc runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Runs with `--json-out` into a temp dir and parses the report.
fn json_run(args: &[&str]) -> (i32, VerificationReport) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--json-out", p]);
    let out = qmc(&all);
    let text = std::fs::read_to_string(&path).expect("report written");
    (
        code(&out),
        serde_json::from_str(&text).expect("report parses"),
    )
}

#[test]
fn verify_bit_flip_agrees() {
    let m = model("bitflip_p05");
    let (c, r) = json_run(&["verify", m.to_str().unwrap(), "-o", "P0"]);
    assert_eq!(c, 0);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.expectations.len(), 3);
    for e in &r.expectations {
        assert!((e.value - 1.0).abs() < 1e-9, "{e:?}");
    }
    assert!(r.deltas.iter().all(|d| d.agree));
}

#[test]
fn verify_signed_observable() {
    let m = model("bitflip_p05");
    let (c, r) = json_run(&["verify", m.to_str().unwrap(), "-o", "Z"]);
    assert_eq!(c, 0);
    for e in &r.expectations {
        assert!((e.value - 1.0).abs() < 1e-9);
    }
}

#[test]
fn verify_single_method() {
    let m = model("bitflip_p05");
    let (c, r) = json_run(&[
        "verify",
        m.to_str().unwrap(),
        "-o",
        "P1",
        "--method",
        "spectral",
    ]);
    assert_eq!(c, 0);
    assert_eq!(r.expectations.len(), 1);
    assert!(r.expectations[0].value.abs() < 1e-12);
}

#[test]
fn loose_tail_disagrees() {
    let m = model("bitflip_p05");
    let out = qmc(&[
        "verify",
        m.to_str().unwrap(),
        "-o",
        "P0",
        "--tail-tol",
        "0.1",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn loose_agreement_tolerance_accepts() {
    let m = model("bitflip_p05");
    let (c, r) = json_run(&[
        "verify",
        m.to_str().unwrap(),
        "-o",
        "P0",
        "--tail-tol",
        "0.1",
        "--tol",
        "0.5",
    ]);
    assert_eq!(c, 0);
    assert_eq!(r.options.series.tail_tol, 0.1);
    assert_eq!(r.options.agreement_tol, 0.5);
}

#[test]
fn step_budget_override_is_recorded() {
    let m = model("bitflip_p05");
    let (_, r) = json_run(&[
        "verify",
        m.to_str().unwrap(),
        "-o",
        "P0",
        "--n-max",
        "5",
        "--eps-unit",
        "1e-6",
    ]);
    assert_eq!(r.options.series.n_max, 5);
    assert_eq!(r.options.tolerances.eps_unit, 1e-6);
}

#[test]
fn stuck_program_is_reported() {
    let m = model("bitflip_p1");
    assert_eq!(code(&qmc(&["verify", m.to_str().unwrap(), "-o", "P0"])), 4);
    let out = qmc(&["terminate", m.to_str().unwrap(), "--scope", "scheme"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn malformed_model_is_rejected() {
    let out = qmc(&["verify", model("malformed").to_str().unwrap(), "-o", "P0"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("kraus"), "{err}");
}

#[test]
fn unknown_observable_and_bad_flags_are_rejected() {
    let m = model("bitflip_p05");
    assert_eq!(
        code(&qmc(&["verify", m.to_str().unwrap(), "-o", "nope"])),
        2
    );
    assert_eq!(
        code(&qmc(&[
            "verify",
            m.to_str().unwrap(),
            "-o",
            "P0",
            "--tail-tol",
            "0"
        ])),
        2
    );
    assert_eq!(code(&qmc(&["runtime", "/nonexistent.model"])), 2);
    assert_eq!(code(&qmc(&["frobnicate"])), 2);
}

#[test]
fn running_times() {
    let (c, r) = json_run(&["runtime", model("bitflip_p05").to_str().unwrap()]);
    assert_eq!(c, 0);
    for e in &r.running_times {
        assert!((e.value.finite().unwrap() - 3.0).abs() < 1e-6);
    }
    let (c, r) = json_run(&["runtime", model("m1zero").to_str().unwrap()]);
    assert_eq!(c, 0);
    assert!(r
        .running_times
        .iter()
        .all(|e| e.value.finite() == Some(1.0)));
    let (_, r) = json_run(&["runtime", model("bitflip_p1").to_str().unwrap()]);
    assert!(r.running_times.iter().all(|e| e.value.finite().is_none()));
}

#[test]
fn scheme_termination() {
    let (c, r) = json_run(&[
        "terminate",
        model("xflip_scheme").to_str().unwrap(),
        "--scope",
        "scheme",
    ]);
    assert_eq!(c, 0);
    let v = r.termination.unwrap().verdict;
    assert!(v.terminates);
    assert_eq!(v.terminates_at, Some(2));
}

#[test]
fn spectrum_and_simulate() {
    let m = model("bitflip_p05");
    let (c, r) = json_run(&["spectrum", m.to_str().unwrap()]);
    assert_eq!(c, 0);
    let s = r.spectrum.unwrap();
    assert!((s.spectral_radius - 0.5).abs() < 1e-12);
    let (c, r) = json_run(&["simulate", m.to_str().unwrap(), "--steps", "5"]);
    assert_eq!(c, 0);
    assert_eq!(r.steps.len(), 5);
    assert!((r.steps[1].p_n - 0.5).abs() < 1e-12);
}

#[test]
fn reports_are_deterministic() {
    let m = model("bitflip_p05");
    let args = ["verify", m.to_str().unwrap(), "-o", "P0"];
    let (_, a) = json_run(&args);
    let (_, b) = json_run(&args);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert_eq!(qmc(&args).stdout, qmc(&args).stdout);
}

#[test]
fn regenerated_goldens_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g.json");
    let m = model("bitflip_p05");
    let out = qmc(&[
        "regen-goldens",
        "--out",
        out_path.to_str().unwrap(),
        "--model",
        m.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file = GoldenFile::load(&out_path).unwrap();
    let bit = file
        .records
        .iter()
        .find(|r| r.name.contains("bitflip_p05"))
        .unwrap();
    assert!((bit.expectation - 1.0).abs() < 1e-9);
    assert!(qmarkov::golden::compare(&file, 1e-7).unwrap().is_empty());
}
