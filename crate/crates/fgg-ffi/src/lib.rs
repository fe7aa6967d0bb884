//! C interface to the fgg toolchain.
//!
//! Programs live behind opaque `FggProgram` handles. Every function returns
//! an `FggStatus`; on failure `fgg_last_error` describes what went wrong on
//! the calling thread. Strings handed out by the library are owned by the
//! caller and released with `fgg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fgg::ast::{fg, fgg as g};
use fgg::cosim::check_correspondence;
use fgg::dict::{self, Options};
use fgg::erasure::erase;
use fgg::parser::{parse_fg, parse_fgg, Diagnostic, Dialect};
use fgg::reduce::{fg as fgr, fgg as fggr, Outcome};
use fgg::typecheck;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FggStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    TypeError = 4,
    TranslateError = 5,
    /// The program panicked (failed assertion or explicit `panic`).
    RuntimePanic = 6,
    StepLimit = 7,
    /// Correspondence checking found a step that does not match.
    Mismatch = 8,
    /// Only FGG programs can be translated or co-simulated.
    WrongLanguage = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FggLanguage {
    FgCore = 0,
    FgExtended = 1,
    Fgg = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FggMode {
    Dict = 0,
    Erasure = 1,
}

enum Source {
    Fg(fg::Program, Dialect),
    Fgg(g::Program),
}

/// A parsed program.
pub struct FggProgram {
    src: Source,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

struct Fail(FggStatus, String);

impl Fail {
    fn diagnostics(status: FggStatus, ds: &[Diagnostic]) -> Fail {
        Fail(status, ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))
    }
}

/// Runs `f`, recording its error and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FggStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FggStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            FggStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(FggStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail(FggStatus::InvalidUtf8, e.to_string()))
}

unsafe fn program_arg<'a>(p: *const FggProgram) -> Result<&'a FggProgram, Fail> {
    p.as_ref().ok_or_else(|| Fail(FggStatus::NullArgument, "null program handle".into()))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(FggStatus::NullArgument, "null output pointer".into()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn fgg_source(p: &FggProgram) -> Result<&g::Program, Fail> {
    match &p.src {
        Source::Fgg(p) => Ok(p),
        Source::Fg(..) => Err(Fail(FggStatus::WrongLanguage, "expected an FGG program".into())),
    }
}

fn checked(p: &g::Program) -> Result<(), Fail> {
    typecheck::fgg::check_program(p).map(|_| ()).map_err(|ds| Fail::diagnostics(FggStatus::TypeError, &ds))
}

/// Parses `source` as `language`. On success `*out` holds a new handle.
///
/// # Safety
/// `source` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fgg_parse(
    source: *const c_char,
    language: FggLanguage,
    out: *mut *mut FggProgram,
) -> FggStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let text = str_arg(source)?;
        let src = match language {
            FggLanguage::FgCore | FggLanguage::FgExtended => {
                let d = if language == FggLanguage::FgCore { Dialect::Core } else { Dialect::Extended };
                Source::Fg(parse_fg(text, d).map_err(|ds| Fail::diagnostics(FggStatus::ParseError, &ds))?, d)
            }
            FggLanguage::Fgg => {
                Source::Fgg(parse_fgg(text).map_err(|ds| Fail::diagnostics(FggStatus::ParseError, &ds))?)
            }
        };
        *out = Box::into_raw(Box::new(FggProgram { src }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `program` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fgg_program_free(program: *mut FggProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Typechecks; on success `*type_out` (if not null) receives the type of
/// `main`.
///
/// # Safety
/// `program` must be a live handle; `type_out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn fgg_typecheck(program: *const FggProgram, type_out: *mut *mut c_char) -> FggStatus {
    guard(|| {
        let p = program_arg(program)?;
        let ty = match &p.src {
            Source::Fg(q, d) => typecheck::fg::check_program(q, *d).map(|t| t.to_string()),
            Source::Fgg(q) => typecheck::fgg::check_program(q).map(|t| t.to_string()),
        }
        .map_err(|ds| Fail::diagnostics(FggStatus::TypeError, &ds))?;
        if let Some(out) = type_out.as_mut() {
            *out = c_string(ty);
        }
        Ok(())
    })
}

/// Prints the program in canonical concrete syntax.
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fgg_print(program: *const FggProgram, out: *mut *mut c_char) -> FggStatus {
    guard(|| {
        let p = program_arg(program)?;
        let out = out_arg(out)?;
        *out = c_string(match &p.src {
            Source::Fg(q, _) => q.to_string(),
            Source::Fgg(q) => q.to_string(),
        });
        Ok(())
    })
}

/// Translates a well-typed FGG program to extended FG; `*out` receives a
/// new handle.
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fgg_translate(
    program: *const FggProgram,
    mode: FggMode,
    out: *mut *mut FggProgram,
) -> FggStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let src = fgg_source(program_arg(program)?)?;
        checked(src)?;
        let target = match mode {
            FggMode::Dict => {
                dict::translate(src, Options::default())
                    .map_err(|e| Fail(FggStatus::TranslateError, e.to_string()))?
                    .program
            }
            FggMode::Erasure => erase(src).map_err(|e| Fail(FggStatus::TranslateError, e.to_string()))?,
        };
        *out = Box::into_raw(Box::new(FggProgram { src: Source::Fg(target, Dialect::Extended) }));
        Ok(())
    })
}

/// Evaluates `main` for at most `max_steps` steps. On `Ok`, `*value_out`
/// (if not null) receives the printed value; `*steps_out` (if not null)
/// is set in every outcome except argument errors.
///
/// # Safety
/// `program` must be a live handle; the output pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn fgg_run(
    program: *const FggProgram,
    max_steps: usize,
    value_out: *mut *mut c_char,
    steps_out: *mut usize,
) -> FggStatus {
    guard(|| {
        let p = program_arg(program)?;
        let (outcome, steps) = match &p.src {
            Source::Fg(q, _) => {
                let r = fgr::run_program(q, max_steps);
                (r.outcome.map_value(|v| v.to_string()), r.steps)
            }
            Source::Fgg(q) => {
                let r = fggr::run_program(q, max_steps);
                (r.outcome.map_value(|v| v.to_string()), r.steps)
            }
        };
        if let Some(s) = steps_out.as_mut() {
            *s = steps;
        }
        match outcome {
            Outcome::Value { value } => {
                if let Some(out) = value_out.as_mut() {
                    *out = c_string(value);
                }
                Ok(())
            }
            Outcome::Panic { message } => Err(Fail(FggStatus::RuntimePanic, message)),
            Outcome::Stuck { reason } => Err(Fail(FggStatus::Internal, format!("stuck: {reason}"))),
            Outcome::BudgetExhausted => Err(Fail(FggStatus::StepLimit, format!("no value within {max_steps} steps"))),
        }
    })
}

/// Checks step correspondence against the dictionary translation for up
/// to `max_steps` source steps. `*report_out` (if not null) receives the
/// JSON report whether or not the check passed.
///
/// # Safety
/// `program` must be a live handle; `report_out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn fgg_cosim(
    program: *const FggProgram,
    max_steps: usize,
    report_out: *mut *mut c_char,
) -> FggStatus {
    guard(|| {
        let src = fgg_source(program_arg(program)?)?;
        checked(src)?;
        let r = check_correspondence(src, max_steps).map_err(|e| Fail(FggStatus::TranslateError, e.to_string()))?;
        if let Some(out) = report_out.as_mut() {
            *out = c_string(serde_json::to_string(&r).expect("report serializes"));
        }
        match &r.mismatch {
            _ if r.certified() => Ok(()),
            Some(m) => Err(Fail(FggStatus::Mismatch, format!("step {}: {}", m.index, m.reason))),
            None => Err(Fail(FggStatus::Mismatch, format!("terminals disagree ({:?})", r.terminal.kind))),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fgg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message for the last failed call on this thread, or null. Valid
/// until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn fgg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
