use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mrgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrgrid")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn enumerate_lists_two_types_for_four_rows() {
    let out = mrgrid(&["enumerate", "--m", "4", "--b", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["types"].as_array().unwrap().len(), 2);
}

#[test]
fn enumerate_empty_for_two_rows() {
    let out = mrgrid(&["enumerate", "--m", "2", "--b", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["types"], serde_json::json!([]));
}

#[test]
fn bounds_kmg_poly() {
    let out = mrgrid(&["bounds", "--name", "kmg_poly", "--m", "2", "--b", "1", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["value"], "2401");
    let out = mrgrid(&["bounds", "--name", "gopalan_general", "--param", "m=2", "--param", "b=1", "--param", "n=3"]);
    assert_eq!(json(&out)["report"]["value"], "228");
}

#[test]
fn bounds_missing_constant_is_an_error() {
    let out = mrgrid(&["bounds", "--name", "t4_upper", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "MissingConstant");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mrgrid(&["enumerate", "--m", "4"]).status.code(), Some(2));
    assert_eq!(mrgrid(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mrgrid(&["bounds", "--name", "nope"]).status.code(), Some(2));
}

#[test]
fn csv_output_has_header() {
    let out = mrgrid(&["--format", "csv", "enumerate", "--m", "3", "--b", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u,v,mask");
    assert_eq!(lines.len(), 2);
}

#[test]
fn search_certify_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    let args = ["search", "--m", "4", "--b", "2", "--n", "6", "--q-max", "64", "--out", path(&code)];
    let a = mrgrid(&args);
    let b = mrgrid(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let progress = v["progress"].as_array().unwrap();
    assert_eq!(progress.last().unwrap()["outcome"], "certified");
    assert!(progress[..progress.len() - 1].iter().all(|p| p["outcome"] == "not_found"));

    let out = mrgrid(&["certify", "--code", path(&code)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["verdict"], "certified");
}

#[test]
fn search_not_found_exits_one() {
    let out = mrgrid(&["search", "--m", "4", "--b", "2", "--n", "6", "--q-max", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["code"], Value::Null);
}

#[test]
fn attack_counterexample_refails_certification() {
    let dir = tempfile::tempdir().unwrap();
    // 13 Vandermonde columns over GF(16)
    let h_row: Vec<Vec<u32>> = vec![vec![1; 13], (1..14).collect()];
    let code = serde_json::json!({
        "field": {"p": 2, "k": 4, "modulus": 19},
        "m": 4, "n": 13, "a": 1, "b": 2,
        "h_col": {"rows": 1, "cols": 4, "field": {"p": 2, "k": 4, "modulus": 19}, "data": [[1, 1, 1, 1]]},
        "h_row": {"rows": 2, "cols": 13, "field": {"p": 2, "k": 4, "modulus": 19}, "data": h_row},
    });
    let file = dir.path().join("code.json");
    std::fs::write(&file, code.to_string()).unwrap();

    let out = mrgrid(&["attack", "--code", path(&file), "--topology", "t4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["rank"].as_u64().unwrap() < 12);
    let pattern: mrgrid::ErasurePattern = serde_json::from_value(v["pattern"].clone()).unwrap();
    let back: mrgrid::ErasurePattern =
        serde_json::from_str(&serde_json::to_string(&pattern).unwrap()).unwrap();
    assert_eq!(back, pattern);

    let out = mrgrid(&["certify", "--code", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let report = &json(&out)["report"];
    assert_eq!(report["verdict"], "failed_pattern");

    let parsed: mrgrid::TensorCode = serde_json::from_str(&code.to_string()).unwrap();
    assert!(!parsed.is_correctable_by(&pattern).unwrap());
    let ce: mrgrid::ErasurePattern = serde_json::from_value(report["counterexample"].clone()).unwrap();
    assert!(!parsed.is_correctable_by(&ce).unwrap());

    let wrong = mrgrid(&["attack", "--code", path(&file), "--topology", "t3"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn decode_roundtrip_and_uncorrectable() {
    let dir = tempfile::tempdir().unwrap();
    let field = serde_json::json!({"p": 7, "k": 1});
    let code = serde_json::json!({
        "field": field, "m": 2, "n": 3, "a": 1, "b": 1,
        "h_col": {"rows": 1, "cols": 2, "field": field, "data": [[1, 1]]},
        "h_row": {"rows": 1, "cols": 3, "field": field, "data": [[1, 1, 1]]},
    });
    let code_file = dir.path().join("code.json");
    std::fs::write(&code_file, code.to_string()).unwrap();

    // codeword [[1, 2, 4], [6, 5, 3]]
    let word = serde_json::json!({"entries": [[1, null, 4], [6, 5, null]]});
    let word_file = dir.path().join("word.json");
    std::fs::write(&word_file, word.to_string()).unwrap();
    let out = mrgrid(&["decode", "--code", path(&code_file), "--word", path(&word_file)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["grid"], serde_json::json!([[1, 2, 4], [6, 5, 3]]));

    let bad = serde_json::json!({"entries": [[null, null, 4], [null, null, 3]]});
    std::fs::write(&word_file, bad.to_string()).unwrap();
    let out = mrgrid(&["decode", "--code", path(&code_file), "--word", path(&word_file)]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Uncorrectable");
}

#[test]
fn threads_flag_and_env_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.json");
    mrgrid(&["search", "--m", "3", "--b", "3", "--n", "7", "--q-max", "256", "--out", path(&code)]);
    let one = mrgrid(&["--threads", "1", "certify", "--code", path(&code)]);
    let many = Command::new(env!("CARGO_BIN_EXE_mrgrid"))
        .env("MRGRID_THREADS", "4")
        .args(["certify", "--code", path(&code)])
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}
