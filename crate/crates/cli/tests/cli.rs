//! Golden-file regression and exit-status tests for the `frobrep` binary.
//! Set UPDATE_GOLDEN=1 to rewrite the stored outputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn frobrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobrep")).args(args).output().expect("binary runs")
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

const CASES: &[(&str, &[&str])] = &[
    ("dims_p3_n1_r1.csv", &["dims", "--p", "3", "--n", "1", "--r", "1", "--lambda-max", "6", "--format", "csv"]),
    ("dims_p3_n2_r1.json", &["dims", "--p", "3", "--n", "2", "--r", "1", "--lambda-max", "6"]),
    ("dims_p2_n1_r2.csv", &["dims", "--p", "2", "--n", "1", "--r", "2", "--lambda-max", "8", "--format", "csv"]),
    ("cohomology_p2_n2_r1.json", &["cohomology", "--p", "2", "--n", "2", "--r", "1"]),
    ("cohomology_p3_n1_r2.csv", &["cohomology", "--p", "3", "--n", "1", "--r", "2", "--format", "csv"]),
    ("kernel_p2_n1_r1.json", &["kernel", "--p", "2", "--n", "1", "--r", "1"]),
    ("verify-socle_p3_n2_r1.json", &["verify-socle", "--p", "3", "--n", "2", "--r", "1", "--lambda", "1,0"]),
    ("verify-socle_p5_n1_r2.json", &["verify-socle", "--p", "5", "--n", "1", "--r", "2", "--lambda", "3"]),
    ("character_p3_n2_r1.json", &["character", "--p", "3", "--n", "2", "--r", "1", "--lambda", "2,1"]),
    ("group-check_p2_n1_r2.json", &["group-check", "--p", "2", "--n", "1", "--r", "2", "--samples", "20", "--seed", "5"]),
];

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for (file, args) in CASES {
        let out = frobrep(args);
        assert!(out.status.success(), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        let path = golden_dir().join(file);
        if update {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let stored = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {file}"));
        if stored != out.stdout {
            mismatches.push(*file);
        }
    }
    assert!(mismatches.is_empty(), "outputs differ from golden files: {mismatches:?}");
}

#[test]
fn same_seed_same_bytes() {
    let args = ["group-check", "--p", "3", "--n", "2", "--r", "1", "--samples", "10", "--seed", "42"];
    assert_eq!(frobrep(&args).stdout, frobrep(&args).stdout);
    let other = ["group-check", "--p", "3", "--n", "2", "--r", "1", "--samples", "10", "--seed", "43"];
    let text = String::from_utf8(frobrep(&other).stdout).unwrap();
    assert!(text.contains("\"seed\": 43"));
}

#[test]
fn residue_pattern_in_dims_table() {
    let out = frobrep(&["dims", "--p", "5", "--n", "1", "--lambda-max", "15", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for (k, line) in text.lines().skip(1).enumerate() {
        let dim: u64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(dim, [1, 4, 5, 5, 5][k % 5], "row {line}");
    }
}

#[test]
fn characteristic_two_generic_is_refused() {
    let out = frobrep(&["verify-socle", "--p", "2", "--n", "3", "--lambda", "2,1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside hypotheses"));
    let table = String::from_utf8(frobrep(&["dims", "--p", "2", "--n", "3", "--lambda-max", "3", "--format", "csv"]).stdout).unwrap();
    assert!(table.contains("\"(2,1,0)\",outside_hypotheses,"));
}

#[test]
fn usage_errors() {
    assert_eq!(frobrep(&["dims", "--p", "4", "--n", "1", "--lambda-max", "2"]).status.code(), Some(2));
    assert_eq!(frobrep(&["dims", "--p", "3"]).status.code(), Some(2));
    assert_eq!(frobrep(&["character", "--p", "3", "--n", "2", "--lambda", "0,1"]).status.code(), Some(2));
    assert_eq!(frobrep(&["character", "--p", "3", "--n", "2", "--lambda", "1"]).status.code(), Some(2));
}

#[test]
fn scope_limit_flag_and_variable() {
    let args = ["cohomology", "--p", "3", "--n", "2", "--r", "2", "--samples", "0"];
    let out = frobrep(&[&args[..], &["--scope-limit", "10"]].concat());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scope"));
    let out = Command::new(env!("CARGO_BIN_EXE_frobrep")).args(args).env("FROBREP_SCOPE_LIMIT", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(frobrep(&args).status.success());
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("frobrep-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kernel.json");
    let args = ["kernel", "--p", "3", "--n", "2", "--r", "1", "--samples", "5"];
    let out = frobrep(&[&args[..], &["--output", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), frobrep(&args).stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn negative_weights_parse() {
    let out = frobrep(&["character", "--p", "3", "--n", "2", "--lambda", "0,-1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"dim\""));
}
