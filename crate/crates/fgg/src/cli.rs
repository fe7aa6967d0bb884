//! The `fgg` command line.
//!
//! Exit codes: 0 on success, 1 when the input has diagnostics, a run fails
//! or a correspondence check mismatches, 2 on usage errors (including
//! unreadable input files).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ast::{fg, fgg};
use crate::bench::{self, Family, Translator};
use crate::cosim::check_correspondence;
use crate::dict::{self, Options, TranslateError};
use crate::erasure::{erase, EraseError};
use crate::parser::{parse_fg, parse_fgg, Diagnostic, Dialect};
use crate::reduce::{self, Outcome, Rule, DEFAULT_MAX_STEPS};
use crate::typecheck;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fgg", version, about = "Featherweight Go and Featherweight Generic Go toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Lang {
    Fg,
    Fgg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Dict,
    Erasure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
}

#[derive(clap::Args, Debug)]
struct Input {
    file: PathBuf,
    /// Source language; inferred from the .fg/.fgg extension by default.
    #[arg(long)]
    lang: Option<Lang>,
    /// FG dialect. The core dialect rejects if, panic, sequencing and `!=`.
    #[arg(long, value_enum, default_value_t = Dialect::Extended)]
    dialect: Dialect,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program and print it back in canonical form.
    Parse {
        #[command(flatten)]
        input: Input,
    },
    /// Typecheck a program and print the type of main.
    Typecheck {
        #[command(flatten)]
        input: Input,
        /// Print diagnostics as JSON lines.
        #[arg(long)]
        json: bool,
    },
    /// Typecheck and evaluate a program.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Print each rule and its redex before it fires.
        #[arg(long)]
        trace: bool,
    },
    /// Translate an FGG program to extended FG.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Write the program here instead of stdout.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Omit assertions the FG static type already guarantees (dict mode).
        #[arg(long)]
        skip_redundant_asserts: bool,
        /// Emit no type metadata; refused if the program has assertions (dict mode).
        #[arg(long)]
        no_type_metadata: bool,
        /// Print the generated-declaration inventory as JSON on stdout
        /// (dict mode). The program then needs `-o`.
        #[arg(long)]
        emit_inventory: bool,
    },
    /// Check step-by-step correspondence between an FGG program and its
    /// dictionary translation.
    Cosim {
        file: PathBuf,
        /// Maximum number of FGG steps.
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, value_enum)]
        report: Option<ReportFormat>,
    },
    /// Generate benchmark programs, translate and run them, and write metrics.
    Bench {
        /// Families to sweep (comma separated); all by default.
        #[arg(long, value_delimiter = ',')]
        family: Vec<Family>,
        /// Parameter range LO..HI (inclusive); each family's default otherwise.
        #[arg(long, value_parser = parse_range)]
        range: Option<RangeInclusive<usize>>,
        #[arg(long, value_delimiter = ',', default_value = "dict,erasure")]
        mode: Vec<Translator>,
        /// Loop iterations in each generated main.
        #[arg(long, default_value_t = bench::DEFAULT_ITERATIONS)]
        iterations: usize,
        /// CSV destination; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

/// Early exit with a message for stderr.
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Exit { code: EXIT_USAGE, message: message.into() }
    }

    fn fail(message: impl Into<String>) -> Self {
        Exit { code: EXIT_FAIL, message: message.into() }
    }
}

type CliResult = Result<i32, Exit>;

/// Runs the command line `argv` (program name first), writing primary
/// output to `out` and diagnostics to `err`; returns the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Exit { code, message }) => {
            if !message.is_empty() {
                let _ = writeln!(err, "{message}");
            }
            code
        }
    }
}

enum Source {
    Fg(fg::Program),
    Fgg(fgg::Program),
}

struct Loaded {
    path: PathBuf,
    dialect: Dialect,
    src: Source,
}

fn lang_of(path: &Path, lang: Option<Lang>) -> Result<Lang, Exit> {
    if let Some(l) = lang {
        return Ok(l);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("fg") => Ok(Lang::Fg),
        Some("fgg") => Ok(Lang::Fgg),
        _ => Err(Exit::usage(format!(
            "{}: cannot infer the language from the extension; pass --lang fg|fgg",
            path.display()
        ))),
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn report(err: &mut dyn Write, path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}:{}", path.display(), d);
    }
}

#[derive(Serialize)]
struct JsonDiagnostic<'a> {
    file: String,
    #[serde(flatten)]
    diagnostic: &'a Diagnostic,
}

fn load(input: &Input, err: &mut dyn Write) -> Result<Loaded, i32> {
    let lang = lang_of(&input.file, input.lang).map_err(|e| {
        let _ = writeln!(err, "{}", e.message);
        e.code
    })?;
    let text = read(&input.file).map_err(|e| {
        let _ = writeln!(err, "{}", e.message);
        e.code
    })?;
    let parsed = match lang {
        Lang::Fg => parse_fg(&text, input.dialect).map(Source::Fg),
        Lang::Fgg => parse_fgg(&text).map(Source::Fgg),
    };
    match parsed {
        Ok(src) => Ok(Loaded { path: input.file.clone(), dialect: input.dialect, src }),
        Err(diags) => {
            report(err, &input.file, &diags);
            Err(EXIT_FAIL)
        }
    }
}

fn load_fgg(path: &Path, err: &mut dyn Write) -> Result<fgg::Program, i32> {
    let input = Input { file: path.to_owned(), lang: Some(Lang::Fgg), dialect: Dialect::Extended };
    match load(&input, err)?.src {
        Source::Fgg(p) => Ok(p),
        Source::Fg(_) => unreachable!("loaded with --lang fgg"),
    }
}

/// Typechecks, returning the type of main as text.
fn check(l: &Loaded) -> Result<String, Vec<Diagnostic>> {
    match &l.src {
        Source::Fg(p) => typecheck::fg::check_program(p, l.dialect).map(|t| t.to_string()),
        Source::Fgg(p) => typecheck::fgg::check_program(p).map(|t| t.to_string()),
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Parse { input } => {
            let l = match load(&input, err) {
                Ok(l) => l,
                Err(code) => return Ok(code),
            };
            match &l.src {
                Source::Fg(p) => write_out(out, &p.to_string())?,
                Source::Fgg(p) => write_out(out, &p.to_string())?,
            }
            Ok(EXIT_OK)
        }
        Command::Typecheck { input, json } => typecheck_cmd(&input, json, out, err),
        Command::Run { input, max_steps, trace } => run_cmd(&input, max_steps, trace, out, err),
        Command::Translate { file, mode, out: dest, skip_redundant_asserts, no_type_metadata, emit_inventory } => {
            if mode == Mode::Erasure && (skip_redundant_asserts || no_type_metadata || emit_inventory) {
                return Err(Exit::usage(
                    "--skip-redundant-asserts, --no-type-metadata and --emit-inventory need --mode dict",
                ));
            }
            if emit_inventory && dest.is_none() {
                return Err(Exit::usage("--emit-inventory prints JSON on stdout; pass -o for the program"));
            }
            let p = match load_fgg(&file, err) {
                Ok(p) => p,
                Err(code) => return Ok(code),
            };
            if let Err(diags) = typecheck::fgg::check_program(&p) {
                report(err, &file, &diags);
                return Ok(EXIT_FAIL);
            }
            let (program, inventory) = match mode {
                Mode::Dict => {
                    let opts = Options { skip_redundant_asserts, no_type_metadata };
                    let t = dict::translate(&p, opts).map_err(|e| translate_failure(&file, e))?;
                    (t.program, Some(t.inventory))
                }
                Mode::Erasure => (erase(&p).map_err(|e| erase_failure(&file, e))?, None),
            };
            match &dest {
                Some(d) => {
                    fs::write(d, program.to_string()).map_err(|e| Exit::fail(format!("{}: {e}", d.display())))?
                }
                None => write_out(out, &program.to_string())?,
            }
            if emit_inventory {
                let inv = inventory.unwrap_or_default();
                write_out(out, &serde_json::to_string_pretty(&inv).expect("inventory serializes"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Cosim { file, steps, report: format } => {
            let p = match load_fgg(&file, err) {
                Ok(p) => p,
                Err(code) => return Ok(code),
            };
            if let Err(diags) = typecheck::fgg::check_program(&p) {
                report(err, &file, &diags);
                return Ok(EXIT_FAIL);
            }
            let r = check_correspondence(&p, steps).map_err(|e| translate_failure(&file, e))?;
            match format {
                Some(ReportFormat::Json) => {
                    write_out(out, &serde_json::to_string_pretty(&r).expect("report serializes"))?
                }
                None => {
                    for s in &r.steps {
                        let m = s.macro_step.as_ref();
                        write_out(
                            out,
                            &format!(
                                "{:>5} {:<12} erase={} sim={} dict={} {}",
                                s.fgg_step_index,
                                s.fgg_rule.name(),
                                m.map_or(0, |m| m.erase),
                                m.map_or(0, |m| m.sim),
                                s.dict_normalization_steps,
                                if s.matched { "ok" } else { "MISMATCH" }
                            ),
                        )?;
                    }
                    write_out(out, &format!("terminal: {:?}, agree={}", r.terminal.kind, r.terminal.both_sides_agree))?;
                    if let Some(m) = &r.mismatch {
                        write_out(
                            err,
                            &format!(
                                "mismatch at step {}: {}\n  expected: {}\n  actual:   {}",
                                m.index, m.reason, m.expected, m.actual
                            ),
                        )?;
                    }
                }
            }
            Ok(if r.certified() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Bench { family, range, mode, iterations, out: dest } => {
            let families = if family.is_empty() { Family::ALL.to_vec() } else { family };
            if mode.is_empty() {
                return Err(Exit::usage("--mode needs at least one of dict,erasure"));
            }
            if iterations == 0 {
                return Err(Exit::usage("--iterations must be positive"));
            }
            let mut sweep = Vec::new();
            for f in families {
                let r = range.clone().unwrap_or_else(|| f.default_range());
                if *r.start() < f.min_param() {
                    return Err(Exit::usage(format!("family {f} needs parameters of at least {}", f.min_param())));
                }
                sweep.push((f, r));
            }
            let rows = bench::run_suite(&sweep, &mode, iterations);
            let mut buf = Vec::new();
            bench::write_csv(&rows, &mut buf).map_err(|e| Exit::fail(e.to_string()))?;
            match &dest {
                Some(d) => fs::write(d, &buf).map_err(|e| Exit::fail(format!("{}: {e}", d.display())))?,
                None => out.write_all(&buf).map_err(|e| Exit::fail(e.to_string()))?,
            }
            let failed: Vec<_> = rows.iter().filter(|r| r.error.is_some()).collect();
            for r in &failed {
                let _ = writeln!(
                    err,
                    "{}{} {}: {}",
                    r.family,
                    r.param,
                    r.translator,
                    r.error.as_deref().unwrap_or_default()
                );
            }
            Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn write_out(w: &mut dyn Write, text: &str) -> Result<(), Exit> {
    writeln!(w, "{}", text.trim_end_matches('\n')).map_err(|e| match e.kind() {
        // The reader went away (`| head`); nothing left to report.
        std::io::ErrorKind::BrokenPipe => Exit::fail(""),
        _ => Exit::fail(e.to_string()),
    })
}

fn translate_failure(path: &Path, e: TranslateError) -> Exit {
    match e {
        TranslateError::Type(t) => Exit::fail(format!("{}:{}", path.display(), Diagnostic::from(t))),
        other => Exit::fail(format!("{}: {other}", path.display())),
    }
}

fn erase_failure(path: &Path, e: EraseError) -> Exit {
    match e {
        EraseError::Type(t) => Exit::fail(format!("{}:{}", path.display(), Diagnostic::from(t))),
        other => Exit::fail(format!("{}: {other}", path.display())),
    }
}

fn typecheck_cmd(input: &Input, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let l = match load(input, err) {
        Ok(l) => l,
        Err(code) => return Ok(code),
    };
    match check(&l) {
        Ok(ty) => {
            if json {
                write_out(out, &serde_json::json!({ "file": l.path.display().to_string(), "type": ty }).to_string())?;
            } else {
                write_out(out, &format!("{}: main has type {ty}", l.path.display()))?;
            }
            Ok(EXIT_OK)
        }
        Err(diags) => {
            if json {
                for d in &diags {
                    let j = JsonDiagnostic { file: l.path.display().to_string(), diagnostic: d };
                    write_out(out, &serde_json::to_string(&j).expect("diagnostic serializes"))?;
                }
            } else {
                report(err, &l.path, &diags);
            }
            Ok(EXIT_FAIL)
        }
    }
}

fn run_cmd(input: &Input, max_steps: usize, trace: bool, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let l = match load(input, err) {
        Ok(l) => l,
        Err(code) => return Ok(code),
    };
    if let Err(diags) = check(&l) {
        report(err, &l.path, &diags);
        return Ok(EXIT_FAIL);
    }
    let (outcome, steps) = match &l.src {
        Source::Fg(p) => {
            let m = reduce::fg::Machine::new(p);
            let mut tr = |rule: Rule, redex: &fg::Expr| {
                let _ = writeln!(out, "{rule} {redex}");
            };
            let run = m.run_traced(&p.main, max_steps, trace.then_some(&mut tr as _));
            (run.outcome.map_value(|v| v.to_string()), run.steps)
        }
        Source::Fgg(p) => {
            let m = reduce::fgg::Machine::new(p);
            let mut tr = |rule: Rule, redex: &fgg::Expr| {
                let _ = writeln!(out, "{rule} {redex}");
            };
            let run = m.run_traced(&p.main, max_steps, trace.then_some(&mut tr as _));
            (run.outcome.map_value(|v| v.to_string()), run.steps)
        }
    };
    match outcome {
        Outcome::Value { value } => {
            write_out(out, &value)?;
            Ok(EXIT_OK)
        }
        Outcome::Panic { message } => Err(Exit::fail(format!("panic: {message} (after {steps} steps)"))),
        Outcome::Stuck { reason } => Err(Exit::fail(format!("stuck: {reason} (after {steps} steps)"))),
        Outcome::BudgetExhausted => Err(Exit::fail(format!("no value within {max_steps} steps"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..40").unwrap(), 2..=40);
        assert_eq!(parse_range("3..=3").unwrap(), 3..=3);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(dispatch(["fgg", "run", "--frobnicate", "x.fg"], &mut o, &mut e), EXIT_USAGE);
        assert!(String::from_utf8(e).unwrap().contains("Usage"));
    }

    #[test]
    fn extension_decides_the_language() {
        assert_eq!(lang_of(Path::new("a.fg"), None).ok(), Some(Lang::Fg));
        assert_eq!(lang_of(Path::new("a.fgg"), None).ok(), Some(Lang::Fgg));
        assert_eq!(lang_of(Path::new("a.go"), Some(Lang::Fgg)).ok(), Some(Lang::Fgg));
        assert_eq!(lang_of(Path::new("a.go"), None).err().map(|e| e.code), Some(EXIT_USAGE));
    }
}
