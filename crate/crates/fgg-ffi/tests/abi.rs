//! The exported functions, called as a C client would.

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use fgg_ffi::*;

const LIST: &str = include_str!("../../fgg/tests/corpus/list.fgg");
const TYPEREP: &str = include_str!("../../fgg/tests/corpus/typerep.fgg");
const LIST_BAD: &str = include_str!("../../fgg/tests/fixtures/list_fail.fgg");
const FG_LIST: &str = include_str!("../../fgg/tests/fixtures/fg_list.fg");

fn parse(src: &str, lang: FggLanguage) -> (FggStatus, *mut FggProgram) {
    let c = CString::new(src).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { fgg_parse(c.as_ptr(), lang, &mut out) };
    (s, out)
}

/// Copies and frees a library string.
fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { fgg_string_free(s) };
    owned
}

fn last_error() -> String {
    let p = fgg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn translate_and_run_the_list_program() {
    let (s, p) = parse(LIST, FggLanguage::Fgg);
    assert_eq!(s, FggStatus::Ok);
    let mut ty = ptr::null_mut();
    assert_eq!(unsafe { fgg_typecheck(p, &mut ty) }, FggStatus::Ok);
    assert_eq!(take(ty), "List[bool]");
    for mode in [FggMode::Dict, FggMode::Erasure] {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { fgg_translate(p, mode, &mut out) }, FggStatus::Ok);
        let (mut v, mut steps) = (ptr::null_mut(), 0usize);
        assert_eq!(unsafe { fgg_run(out, 1_000_000, &mut v, &mut steps) }, FggStatus::Ok);
        assert!(take(v).starts_with("Cons{true, Cons{false, Cons{true, Nil{"));
        assert!(steps > 0);
        unsafe { fgg_program_free(out) };
    }
    unsafe { fgg_program_free(p) };
}

#[test]
fn printed_programs_parse_back() {
    let (_, p) = parse(LIST, FggLanguage::Fgg);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { fgg_print(p, &mut text) }, FggStatus::Ok);
    let text = take(text);
    let (s, q) = parse(&text, FggLanguage::Fgg);
    assert_eq!(s, FggStatus::Ok);
    let mut again = ptr::null_mut();
    unsafe { fgg_print(q, &mut again) };
    assert_eq!(take(again), text);
    unsafe {
        fgg_program_free(p);
        fgg_program_free(q);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let (s, p) = parse("package main\nfunc main() { _ = Foo{ }", FggLanguage::Fgg);
    assert_eq!(s, FggStatus::ParseError);
    assert!(p.is_null());
    assert!(last_error().starts_with("2:"), "{}", last_error());

    let (_, bad) = parse(LIST_BAD, FggLanguage::Fgg);
    assert_eq!(unsafe { fgg_typecheck(bad, ptr::null_mut()) }, FggStatus::TypeError);
    assert!(last_error().contains("Function[bool, bool]"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fgg_translate(bad, FggMode::Dict, &mut out) }, FggStatus::TypeError);
    assert!(out.is_null());

    let (_, fg) = parse(FG_LIST, FggLanguage::FgCore);
    assert_eq!(unsafe { fgg_run(fg, 10_000, ptr::null_mut(), ptr::null_mut()) }, FggStatus::RuntimePanic);
    assert_eq!(last_error(), "Unable to assert bool as type Ord");
    assert_eq!(unsafe { fgg_translate(fg, FggMode::Dict, &mut out) }, FggStatus::WrongLanguage);
    assert_eq!(unsafe { fgg_run(fg, 3, ptr::null_mut(), ptr::null_mut()) }, FggStatus::StepLimit);

    assert_eq!(unsafe { fgg_typecheck(ptr::null(), ptr::null_mut()) }, FggStatus::NullArgument);
    assert_eq!(unsafe { fgg_parse(ptr::null(), FggLanguage::Fgg, &mut out) }, FggStatus::NullArgument);
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { fgg_parse(bytes.as_ptr().cast(), FggLanguage::Fgg, &mut out) }, FggStatus::InvalidUtf8);

    // A successful call clears the previous error.
    let (s, ok) = parse(LIST, FggLanguage::Fgg);
    assert_eq!(s, FggStatus::Ok);
    assert!(fgg_last_error().is_null());
    unsafe {
        fgg_program_free(bad);
        fgg_program_free(fg);
        fgg_program_free(ok);
        fgg_program_free(ptr::null_mut());
        fgg_string_free(ptr::null_mut());
    }
}

#[test]
fn cosim_reports_json() {
    let (_, p) = parse(TYPEREP, FggLanguage::Fgg);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { fgg_cosim(p, 500, &mut report) }, FggStatus::Ok);
    let r: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
    assert_eq!(r["terminal"]["kind"], "panic");
    assert!(r["steps"].as_array().unwrap().iter().all(|s| s["matched"] == true));
    unsafe { fgg_program_free(p) };
}

/// The static library next to this test binary (`<target>/<profile>/deps`)
/// or one level up, where `cargo build` places it.
fn static_lib() -> PathBuf {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_owned();
    let here = deps.join("libfgg_ffi.a");
    if here.exists() {
        here
    } else {
        deps.parent().unwrap().join("libfgg_ffi.a")
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = static_lib();
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
