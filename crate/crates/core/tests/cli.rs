use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use permguard::corpus::{eval_harness, fs_reexport, worked_example, Fixture};
use permguard::perm::parse_manifest;

fn write_fixture(f: &Fixture, dir: &Path) {
    for (name, src) in &f.files {
        let p = dir.join(name);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, src).unwrap();
    }
    std::fs::write(dir.join("fs.json"), serde_json::to_string(&f.fs_seed).unwrap()).unwrap();
}

fn pg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permguard"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn setup(f: &Fixture) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(f, dir.path());
    let p = dir.path().to_path_buf();
    (dir, p)
}

#[test]
fn infer_writes_manifest_for_worked_example() {
    let (_d, dir) = setup(&worked_example());
    let o = pg(&dir, &["infer", "--manifest", "m.json", "--witness", "w.json"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let m = parse_manifest(&std::fs::read_to_string(dir.join("m.json")).unwrap()).unwrap();
    assert_eq!(m.get("__CWD__/serial.mjs").unwrap().len(), 9);
    let w: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("w.json")).unwrap()).unwrap();
    assert!(w["__CWD__/serial.mjs"]["eval:X"].is_array());
}

#[test]
fn infer_of_empty_entry_is_an_empty_module() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("main.mjs"), "").unwrap();
    let o = pg(dir.path(), &["infer"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"__CWD__/main.mjs": {}}));
}

#[test]
fn syntax_error_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("main.mjs"), "let x = ;").unwrap();
    let o = pg(dir.path(), &["infer"]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("main.mjs:1:9"), "{}", text(&o.stderr));
}

fn harness_dir(payload: &str) -> (tempfile::TempDir, PathBuf) {
    let f = eval_harness(payload);
    let (d, dir) = setup(&f);
    let o = pg(&dir, &["infer", "--manifest", "m.json"]);
    assert_eq!(code(&o), 0);
    let mut m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("m.json")).unwrap()).unwrap();
    m["__CWD__/e.mjs"] = serde_json::json!({"eval": "RX", "exports": "W"});
    std::fs::write(dir.join("m.json"), serde_json::to_string(&m).unwrap()).unwrap();
    (d, dir)
}

#[test]
fn run_benign_payload_prints_result() {
    let (_d, dir) = harness_dir("2+2");
    let o = pg(&dir, &["run", "--manifest", "m.json"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert_eq!(text(&o.stdout), "4\n");
}

#[test]
fn run_env_payload_is_an_access_violation() {
    let (_d, dir) = harness_dir("process.env");
    let o = pg(&dir, &["run", "--manifest", "m.json", "--env", "HOME=/root"]);
    assert_eq!(code(&o), 10);
    let err = text(&o.stderr);
    assert!(err.contains("kind: R"), "{err}");
    assert!(err.contains("path: process.env"), "{err}");
}

#[test]
fn run_without_manifest_is_a_config_error() {
    let (_d, dir) = setup(&worked_example());
    assert_eq!(code(&pg(&dir, &["run"])), 2);
    assert_eq!(code(&pg(&dir, &["run", "--manifest", "missing.json"])), 2);
}

#[test]
fn trace_is_deterministic_and_empty_for_empty_program() {
    let (_d, dir) = setup(&worked_example());
    assert_eq!(code(&pg(&dir, &["trace", "--out", "a.jsonl"])), 0);
    assert_eq!(code(&pg(&dir, &["trace", "--out", "b.jsonl"])), 0);
    let a = std::fs::read(dir.join("a.jsonl")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(dir.join("b.jsonl")).unwrap());

    let empty = tempfile::tempdir().unwrap();
    std::fs::write(empty.path().join("main.mjs"), "let x = 1;").unwrap();
    let o = pg(empty.path(), &["trace"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    std::fs::write(empty.path().join("t.jsonl"), "").unwrap();
    std::fs::write(empty.path().join("m.json"), "{}").unwrap();
    let c = pg(empty.path(), &["check", "--manifest", "m.json", "--trace", "t.jsonl"]);
    let r: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!((r["total"].as_u64(), r["invalid"].as_u64()), (Some(0), Some(0)));
}

fn invalid_count(dir: &Path) -> u64 {
    let o = pg(dir, &["check", "--manifest", "m.json", "--trace", "t.jsonl"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    r["invalid"].as_u64().unwrap()
}

#[test]
fn augment_closes_the_reexport_gap_and_is_idempotent() {
    let (_d, dir) = setup(&fs_reexport());
    assert_eq!(code(&pg(&dir, &["infer", "--manifest", "m.json"])), 0);
    assert_eq!(code(&pg(&dir, &["trace", "--fs-seed", "fs.json", "--out", "t.jsonl"])), 0);
    assert!(invalid_count(&dir) > 0);

    let o = pg(&dir, &["augment", "--manifest", "m.json"]);
    assert_eq!(code(&o), 0);
    let summary = text(&o.stdout);
    let added: u64 = summary
        .lines()
        .last()
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|n| n.parse().ok())
        .unwrap();
    assert!(added > 0, "{summary}");
    assert_eq!(invalid_count(&dir), 0);

    let once = std::fs::read(dir.join("m.json")).unwrap();
    let o = pg(&dir, &["augment", "--manifest", "m.json"]);
    assert!(text(&o.stdout).contains("added 0 entries"));
    assert_eq!(once, std::fs::read(dir.join("m.json")).unwrap());
}

#[test]
fn augment_adds_nothing_without_dynamic_top_level() {
    let (_d, dir) = setup(&worked_example());
    assert_eq!(code(&pg(&dir, &["infer", "--manifest", "m.json"])), 0);
    let o = pg(&dir, &["augment", "--manifest", "m.json"]);
    assert!(text(&o.stdout).contains("added 0 entries"), "{}", text(&o.stdout));
}

#[test]
fn quantify_reports_and_flags_degenerate_manifests() {
    let (_d, dir) = setup(&worked_example());
    assert_eq!(code(&pg(&dir, &["infer", "--manifest", "m.json"])), 0);
    let o = pg(&dir, &["quantify", "--manifest", "m.json", "--out", "r1.json"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    assert_eq!(code(&pg(&dir, &["quantify", "--manifest", "m.json", "--out", "r2.json", "--sequential"])), 0);
    let r1 = std::fs::read(dir.join("r1.json")).unwrap();
    assert_eq!(r1, std::fs::read(dir.join("r2.json")).unwrap());
    let r: serde_json::Value = serde_json::from_slice(&r1).unwrap();
    assert_eq!(r["lowerBound"], true);
    assert!(r["program"]["pr"].as_f64().unwrap() > 1.0);

    std::fs::write(dir.join("empty.json"), "{}").unwrap();
    assert_eq!(code(&pg(&dir, &["quantify", "--manifest", "empty.json"])), 3);
}

#[test]
fn bad_flags_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pg(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&pg(dir.path(), &["infer", "--entry", "nothing.mjs"])), 2);
}
