use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn invariant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invariant"))
        .args(args)
        .env_remove("QHI_SEED_GRID")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn rl_report_has_the_schema_fields() {
    let out = invariant(&["--word", "RL", "--N", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "qhi/1");
    assert_eq!(v["word"], "RL");
    assert_eq!(v["N"], 3);
    assert_eq!(v["passed"], true);
    assert_eq!(v["C"].as_array().unwrap().len(), 3);
    for key in [
        "weights",
        "roots",
        "spectrumRatios",
        "charPoly",
        "conditionNumber",
        "residuals",
        "thresholds",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn periodic_word_is_rejected() {
    let out = invariant(&["--word", "RR"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "NotPseudoAnosov");
    assert_eq!(v["error"]["stage"], "word");
}

#[test]
fn matrix_input_resolves_to_a_word() {
    let out = invariant(&["--matrix", "2,1,1,1", "--N", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["word"], "RL");

    let out = invariant(&["--matrix", "-2,-1,-1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["negativeTrace"], true);

    let out = invariant(&["--matrix", "2,1,1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "NotUnimodular");
}

#[test]
fn stored_report_verifies_and_tampering_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let out = invariant(&[
        "--surface",
        "sphere",
        "--word",
        "RRL",
        "--N",
        "3",
        "--output",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let out = invariant(&["--verify-only", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);

    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let entry = &mut v["C"][0][1][0];
    *entry = Value::from(entry.as_f64().unwrap() + 0.25);
    fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let out = invariant(&["--verify-only", p]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);

    fs::write(&path, "{").unwrap();
    assert_eq!(invariant(&["--verify-only", p]).status.code(), Some(2));
}

#[test]
fn tabulate_writes_one_row_per_run() {
    let out = invariant(&["tabulate", "--words", "RL,RR,RRL", "--N", "3,5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("schema,surface,word,N,k,"));
    assert_eq!(lines.len(), 7);
    assert!(lines.iter().any(|l| l.contains("NotPseudoAnosov")));
}

#[test]
fn seed_grid_comes_from_the_environment() {
    let run = |grid: &str| {
        Command::new(env!("CARGO_BIN_EXE_invariant"))
            .args(["--word", "RL", "--N", "3"])
            .env("QHI_SEED_GRID", grid)
            .output()
            .unwrap()
    };
    let out = run("3,4,0.5,2.0");
    assert_eq!(out.status.code(), Some(0));
    let coarse = json(&out)["solutionsFound"].as_u64().unwrap();
    assert!(coarse >= 1);

    let out = run("bad");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "InvalidSeedGrid");
}

#[test]
fn manual_weights_skip_the_solver() {
    let w = "-0.5,0.8660254037844386,-0.5,0.8660254037844386";
    let out = invariant(&["--word", "RL", "--N", "3", "--weights", w]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);

    let out = invariant(&["--word", "RL", "--weights", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "InvalidWeights");

    // A non-periodic start fails the residual checks.
    let out = invariant(&["--word", "RL", "--N", "3", "--weights", "0.3,0.2,1.7,-0.4"]);
    assert_ne!(out.status.code(), Some(0));
}
