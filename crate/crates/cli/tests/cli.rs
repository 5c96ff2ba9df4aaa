use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orbifrob::frobenius::{milnor_univariate, write_algebra};
use orbifrob::exact::Scalar;

fn orbifrob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbifrob")).args(args).env_remove("ORBIFROB_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const NON_ASSOCIATIVE: &str = r#"{
  "name": "broken",
  "dim": 3,
  "labels": ["1", "x", "y"],
  "unit": ["1", "0", "0"],
  "mult": [
    [0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "1"], [0, 2, 2, "1"],
    [2, 0, 2, "1"], [1, 1, 2, "1"], [1, 2, 0, "1"]
  ],
  "metric": [[0, 2, "1"], [2, 0, "1"], [1, 1, "1"]]
}"#;

#[test]
fn series_gives_partition_numbers() {
    let o = orbifrob(&["series", "trunc:1", "--n", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("coefficients: [1, 1, 2, 3, 5, 7]"));
    assert!(stdout(&o).contains("MATCH"));
}

#[test]
fn series_for_two_dimensional_base() {
    let o = orbifrob(&["--format", "json", "series", "trunc:2", "--n", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!([1, 2, 5, 10]));
    assert_eq!(v["verdict"], "MATCH");
}

#[test]
fn series_at_level_zero() {
    let o = orbifrob(&["--format", "json", "series", "trunc:3", "--n", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!([1]));
}

#[test]
fn milnor_input_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a3.json");
    let a = milnor_univariate(&[0, 0, 0, 0, 1].map(Scalar::from_int)).unwrap();
    fs::write(&path, write_algebra(&a)).unwrap();
    let o = orbifrob(&["verify", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn corrupted_triple_is_a_parse_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, NON_ASSOCIATIVE.replace("[1, 2, 0, \"1\"]", "[1, 2, 9, \"1\"]")).unwrap();
    let o = orbifrob(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 8"), "{}", stderr(&o));
}

#[test]
fn json_syntax_error_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"name\": \"x\",\n  \"dim\": 2,,\n}").unwrap();
    let o = orbifrob(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn broken_associativity_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, NON_ASSOCIATIVE).unwrap();
    let o = orbifrob(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL associativity"));
    assert!(stdout(&o).contains("witness"));
}

fn artifacts(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn sympow_writes_five_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbifrob(&["sympow", "trunc:2", "--n", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(artifacts(dir.path()), ["algebra.json", "defects.csv", "ls_compare.txt", "trace.json", "verify.txt"]);
    let verify = orbifrob(&["verify", dir.path().join("algebra.json").to_str().unwrap()]);
    assert!(verify.status.success());
}

#[test]
fn sympow_level_zero_is_the_ground_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbifrob(&["sympow", "trunc:2", "--n", "0", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("total dim 1"));
}

#[test]
fn sympow_with_k3_sign_twist_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = orbifrob(&["sympow", "trunc:2", "--n", "3", "--parity", "1", "--torsion", "k3sign", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn sympow_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    orbifrob(&["--workers", "1", "sympow", "trunc:3", "--n", "2", "--out", a.path().to_str().unwrap()]);
    orbifrob(&["--workers", "3", "sympow", "trunc:3", "--n", "2", "--out", b.path().to_str().unwrap()]);
    for name in artifacts(a.path()) {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn feasibility_cap_refuses_large_builds() {
    let o = orbifrob(&["series", "trunc:3", "--n", "6", "--cap", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exceeds the cap"));
    let o = Command::new(env!("CARGO_BIN_EXE_orbifrob"))
        .args(["sympow", "trunc:2", "--n", "4"])
        .env("ORBIFROB_CAP", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("120"));
}

#[test]
fn ineligible_base_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, NON_ASSOCIATIVE).unwrap();
    let o = orbifrob(&["sympow", path.to_str().unwrap(), "--n", "2", "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not eligible"));
}

#[test]
fn defect_table_lists_every_joint_orbit() {
    let o = orbifrob(&["defect-table", "--n", "3"]);
    let text = stdout(&o);
    assert!(text.starts_with("sigma,sigma_prime,block,defect\n"));
    assert!(text.contains("\"(1 2 3)\",\"(1 2 3)\",\"1 2 3\",1"));
    assert!(text.contains("\"(1 2)\",\"(1 2)\",\"1 2\",0"));
}

#[test]
fn schur_cocycle_checks_pass() {
    let o = orbifrob(&["schur-cocycle", "--n", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS ε = −1 on disjoint transpositions"));
}

#[test]
fn twist_and_normalize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    orbifrob(&["sympow", "trunc:2", "--n", "3", "--out", out.to_str().unwrap()]);
    let algebra = out.join("algebra.json");
    let twisted = dir.path().join("twisted.json");
    let o = orbifrob(&["--out", twisted.to_str().unwrap(), "twist", algebra.to_str().unwrap(), "--torsion", "schur"]);
    assert!(o.status.success());
    assert!(orbifrob(&["verify", twisted.to_str().unwrap()]).status.success());
    let o = orbifrob(&["normalize", algebra.to_str().unwrap(), "--seed", "11"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("seed 11"));
}
