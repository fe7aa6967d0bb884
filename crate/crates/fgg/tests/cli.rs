//! End-to-end runs of the `fgg` binary.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::manifest_dir;

fn corpus(name: &str) -> PathBuf {
    manifest_dir().join("tests/corpus").join(name)
}

fn fixture(name: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures").join(name)
}

fn fgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn translated_program_runs_to_the_same_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gtfunc.fg");
    let src = corpus("gtfunc.fgg");
    let t = fgg(&["translate", p(&src), "--mode", "dict", "-o", p(&out)]);
    assert_eq!(t.status.code(), Some(0), "{}", stderr(&t));
    let a = fgg(&["run", p(&src)]);
    let b = fgg(&["run", p(&out)]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    assert_eq!(stdout(&a), "3\n");
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn cosim_report_on_typerep_agrees_on_the_panic() {
    let o = fgg(&["cosim", p(&corpus("typerep.fgg")), "--report", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let steps = r["steps"].as_array().unwrap();
    assert!(!steps.is_empty());
    assert!(steps.iter().all(|s| s["matched"] == true));
    assert_eq!(r["terminal"]["kind"], "panic");
    assert_eq!(r["terminal"]["both_sides_agree"], true);
    assert!(r["mismatch"].is_null());
}

#[test]
fn failing_listing_is_reported_with_position() {
    let path = fixture("list_fail.fgg");
    let o = fgg(&["typecheck", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with(&format!("{}:16:9: ", path.display())), "{err}");
    assert!(err.contains("Function[bool, bool]"), "{err}");

    let o = fgg(&["typecheck", "--json", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    let line: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(line["line"], 16);
    assert_eq!(line["severity"], "error");
}

#[test]
fn fg_listing_panics_at_run_time() {
    let o = fgg(&["run", p(&fixture("fg_list.fg"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("panic: Unable to assert bool as type Ord"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(fgg(&["run", "--no-such-flag", "x.fg"]).status.code(), Some(2));
    assert_eq!(fgg(&[]).status.code(), Some(2));
    assert_eq!(fgg(&["typecheck", "program.txt"]).status.code(), Some(2));
    assert_eq!(fgg(&["run", "/no/such/file.fgg"]).status.code(), Some(2));
    let list = corpus("list.fgg");
    assert_eq!(fgg(&["translate", p(&list), "--mode", "erasure", "--emit-inventory"]).status.code(), Some(2));
    assert_eq!(fgg(&["bench", "--family", "z"]).status.code(), Some(2));
    assert_eq!(fgg(&["bench", "--family", "b", "--range", "0..2"]).status.code(), Some(2));
    assert_eq!(fgg(&["--help"]).status.code(), Some(0));
}

#[test]
fn lang_flag_overrides_the_extension() {
    let dir = tempfile::tempdir().unwrap();
    let odd = dir.path().join("list.txt");
    std::fs::copy(corpus("list.fgg"), &odd).unwrap();
    let o = fgg(&["typecheck", "--lang", "fgg", p(&odd)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("List[bool]"));
}

#[test]
fn core_dialect_rejects_extended_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sum.fg");
    assert_eq!(fgg(&["translate", p(&corpus("sum.fgg")), "--mode", "erasure", "-o", p(&out)]).status.code(), Some(0));
    assert_eq!(fgg(&["typecheck", p(&out)]).status.code(), Some(0));
    let o = fgg(&["typecheck", "--dialect", "core", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("only allowed in the extended FG dialect"), "{}", stderr(&o));
}

#[test]
fn parse_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["list.fgg", "tree.fgg"] {
        let first = fgg(&["parse", p(&corpus(name))]);
        assert_eq!(first.status.code(), Some(0));
        let copy = dir.path().join(name);
        std::fs::write(&copy, &first.stdout).unwrap();
        assert_eq!(stdout(&fgg(&["parse", p(&copy)])), stdout(&first));
    }
}

#[test]
fn trace_prints_one_line_per_step() {
    let o = fgg(&["run", "--trace", p(&corpus("sum.fgg")), "--max-steps", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<_> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("r-call Acc{}.Sum(30, 0)"), "{lines:?}");
    assert!(stderr(&o).contains("no value within 5 steps"));
}

#[test]
fn inventory_lists_generated_declarations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("list.fg");
    let o = fgg(&["translate", p(&corpus("list.fgg")), "--mode", "dict", "-o", p(&out), "--emit-inventory"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let inv: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let named = |n: &str| inv.iter().find(|e| e["name"] == n).cloned();
    assert_eq!(named("OrdDict").unwrap()["role"], "dictionary");
    assert_eq!(named("int_Gt").unwrap()["kind"], "struct");
    assert!(std::fs::read_to_string(&out).unwrap().contains("type OrdDict struct"));
}

#[test]
fn metadata_free_translation_refuses_assertions() {
    let o = fgg(&["translate", p(&corpus("typerep.fgg")), "--mode", "dict", "--no-type-metadata"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("type assertions need type metadata"));
    let o = fgg(&["translate", p(&corpus("list.fgg")), "--mode", "dict", "--no-type-metadata"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("_type_mdata"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("metrics.csv");
    let o = fgg(&[
        "bench",
        "--family",
        "a,d",
        "--range",
        "2..3",
        "--mode",
        "dict,erasure",
        "--iterations",
        "2",
        "--out",
        p(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "family,param,translator,output_nodes,steps,translate_millis,error");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1].starts_with("a,2,dict,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(',')), "{text}");
}
