//! End-to-end CLI tests: golden outputs (byte-exact determinism),
//! JSON schema round-trips, cache behavior and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn klk(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klk"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .output()
        .expect("spawn klk")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn cells_tables_match_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["cells", "--n", "5", "--shape", "2,2,1", "--mark-negative"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("cells_n5_221_marked.txt"));
    let out = klk(dir.path(), &["cells", "--n", "5", "--shape", "3,2", "--mark-negative"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("cells_n5_32_marked.txt"));
}

#[test]
fn classify_n4_per_element_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(
        dir.path(),
        &["classify", "--n", "4", "--format", "csv", "--per-element"],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text, golden("classify_n4_per_element.csv"));
    // negative rows are exactly the left cell {s1s3, s2s1s3}
    let negative: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(",negative,"))
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(negative, vec!["2143", "3142"]);
}

#[test]
fn classify_n5_involutions_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["classify", "--n", "5", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("classify_n5.csv"));
}

#[test]
fn kl_and_verdict_match_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["kl", "--n", "4", "--x", "1324", "--w", "3412"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("kl_n4.txt"));

    let out = klk(dir.path(), &["verdict", "--n", "5", "--word", "2,1,4,3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("verdict_n5_2143.txt"));
}

#[test]
fn verdict_unknown_at_rank_6() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["verdict", "--n", "6", "--word", "3,2,4,3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("status unknown"));
}

#[test]
fn json_outputs_parse_and_agree_with_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(
        dir.path(),
        &["verdict", "--n", "4", "--perm", "2143", "--format", "json"],
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["status"], "negative");
    assert_eq!(doc["perm"], "2143");
    assert_eq!(doc["left_cell_involution"], "2143");
    assert_eq!(doc["witness"]["degree"], 1);
    assert_eq!(doc["witness"]["lhs"], 1);
    assert_eq!(doc["witness"]["rhs"], 0);

    let out = klk(dir.path(), &["classify", "--n", "4", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["counts"]["positive"], 9);
    assert_eq!(doc["counts"]["negative"], 1);
    assert_eq!(doc["counts"]["unknown"], 0);
    assert_eq!(doc["negative_involutions"], serde_json::json!(["2143"]));
    assert_eq!(doc["involutions"].as_array().unwrap().len(), 10);
}

#[test]
fn repeated_runs_are_byte_identical_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let first = klk(dir.path(), &["classify", "--n", "4", "--format", "csv"]);
    assert!(first.status.success());
    // the first run wrote both cache forms
    assert!(dir.path().join("kltable-n4.klt").exists());
    assert!(dir.path().join("kltable-n4.jsonl").exists());
    let second = klk(dir.path(), &["classify", "--n", "4", "--format", "csv"]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn table_build_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["table", "--n", "4", "--build"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("24 elements"));
    let out = klk(dir.path(), &["table", "--n", "4", "--check"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("cache ok"));
    // neither flag, or a missing cache, are errors
    let out = klk(dir.path(), &["table", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let empty = tempfile::tempdir().unwrap();
    let out = klk(empty.path(), &["table", "--n", "4", "--check"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["verify", "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // not a bijection
    let out = klk(dir.path(), &["verdict", "--n", "4", "--perm", "2144"]);
    assert_eq!(out.status.code(), Some(2));
    // generator index out of range
    let out = klk(dir.path(), &["verdict", "--n", "4", "--word", "9"]);
    assert_eq!(out.status.code(), Some(2));
    // wrong length for the rank
    let out = klk(dir.path(), &["verdict", "--n", "4", "--perm", "21435"]);
    assert_eq!(out.status.code(), Some(2));
    // both selectors at once
    let out = klk(
        dir.path(),
        &["verdict", "--n", "4", "--perm", "2143", "--word", "1,3"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capacity_exceeded_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = klk(dir.path(), &["classify", "--n", "9"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn cache_problems_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // corrupt file: garbage where a table is expected
    std::fs::write(dir.path().join("kltable-n4.klt"), b"garbage").unwrap();
    let out = klk(dir.path(), &["classify", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));

    // truncated real table
    let dir = tempfile::tempdir().unwrap();
    assert!(klk(dir.path(), &["table", "--n", "4", "--build"]).status.success());
    let path = dir.path().join("kltable-n4.klt");
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
    let out = klk(dir.path(), &["classify", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));

    // a rank-4 table where rank 5 was requested: explicit mismatch,
    // not a silent recompute
    let dir = tempfile::tempdir().unwrap();
    assert!(klk(dir.path(), &["table", "--n", "4", "--build"]).status.success());
    std::fs::copy(
        dir.path().join("kltable-n4.klt"),
        dir.path().join("kltable-n5.klt"),
    )
    .unwrap();
    let out = klk(dir.path(), &["classify", "--n", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("klk.conf");
    std::fs::write(&cfg, "# defaults for this run\nn=4\nformat=csv\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_klk"))
        .arg("--cache-dir")
        .arg(dir.path())
        .arg("--config")
        .arg(&cfg)
        .arg("classify")
        .output()
        .unwrap();
    assert!(out.status.success());
    let reference = klk(dir.path(), &["classify", "--n", "4", "--format", "csv"]);
    assert_eq!(out.stdout, reference.stdout);
    // an explicit flag wins over the config value
    let text_out = Command::new(env!("CARGO_BIN_EXE_klk"))
        .arg("--cache-dir")
        .arg(dir.path())
        .arg("--config")
        .arg(&cfg)
        .args(["--format", "text", "classify"])
        .output()
        .unwrap();
    assert!(stdout(&text_out).starts_with("Kostant classification for S_4"));
}

#[test]
fn cache_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_klk"))
        .env("KLK_CACHE_DIR", dir.path())
        .args(["classify", "--n", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("kltable-n3.klt").exists());
}
