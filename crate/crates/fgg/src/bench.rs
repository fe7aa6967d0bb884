//! Micro-benchmark program families and metrics.
//!
//! All families derive from one base program (see `bench/base.fgg`):
//! `DoIt` calls `f_1` once per combination of type actuals, `f_1` calls
//! `f_2`, which calls `CallBase`. `CallBase` calls every method of `Base` on a
//! receiver of generic type and then `Ops`, which calls `Op` twice.
//!
//! * a: `Base` and `Derived` have `n` methods.
//! * b: `Ops` calls `Op` `c` times.
//! * c: `f_1` and `f_2` take `m` type parameters; `DoIt` makes all `2^m` calls.
//! * d: the chain `f_1 .. f_p` has length `p`.
//! * e: `Base` and `Derived` take `m` type parameters and the chain has
//!   length `m`; each `f_i` calls `f_{i+1}` twice, adding one type parameter.

use std::fmt::{self, Write as _};
use std::io;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ast::fg;
use crate::dict::{translate, Options};
use crate::erasure::erase;
use crate::parser::parse_fgg;
use crate::reduce::fg::run_program;
use crate::typecheck::fgg::check_program;

pub const DEFAULT_ITERATIONS: usize = 100;

/// Steps allowed when running a translated benchmark.
pub const STEP_LIMIT: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::A, Family::B, Family::C, Family::D, Family::E];

    pub fn min_param(self) -> usize {
        match self {
            Family::B => 1,
            _ => 2,
        }
    }

    /// Parameter sweep used when no range is given.
    pub fn default_range(self) -> RangeInclusive<usize> {
        match self {
            Family::A => 2..=40,
            Family::B => 1..=20,
            Family::C => 2..=6,
            Family::D => 2..=20,
            Family::E => 2..=9,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::D => "d",
            Family::E => "e",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "a" => Ok(Family::A),
            "b" => Ok(Family::B),
            "c" => Ok(Family::C),
            "d" => Ok(Family::D),
            "e" => Ok(Family::E),
            _ => Err(format!("unknown family {s:?} (expected a..e)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Translator {
    Dict,
    Erasure,
}

impl fmt::Display for Translator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Translator::Dict => "dict",
            Translator::Erasure => "erasure",
        })
    }
}

impl FromStr for Translator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dict" => Ok(Translator::Dict),
            "erasure" => Ok(Translator::Erasure),
            _ => Err(format!("unknown translator {s:?} (expected dict or erasure)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub family: Family,
    pub param: usize,
    pub iterations: usize,
}

impl BenchConfig {
    pub fn new(family: Family, param: usize) -> Self {
        BenchConfig { family, param, iterations: DEFAULT_ITERATIONS }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.param < self.family.min_param() {
            return Err(format!("family {} needs a parameter of at least {}", self.family, self.family.min_param()));
        }
        Ok(())
    }
}

/// Shape of a generated program: method count, op count, type parameters of
/// `f_i`, chain length, and whether the family e coupling applies.
struct Shape {
    n: usize,
    c: usize,
    m: usize,
    p: usize,
    branching: bool,
}

impl Shape {
    fn of(cfg: &BenchConfig) -> Shape {
        let base = Shape { n: 2, c: 2, m: 2, p: 2, branching: false };
        let k = cfg.param;
        match cfg.family {
            Family::A => Shape { n: k, ..base },
            Family::B => Shape { c: k, ..base },
            Family::C => Shape { m: k, ..base },
            Family::D => Shape { p: k, ..base },
            Family::E => Shape { m: k, p: k, branching: true, ..base },
        }
    }
}

fn list(range: RangeInclusive<usize>, f: impl Fn(usize) -> String) -> String {
    range.map(f).collect::<Vec<_>>().join(", ")
}

/// Type parameters `T_1 .. T_k` as a formal, actuals or value parameters.
fn formal(k: usize) -> String {
    list(1..=k, |i| format!("T_{i} Any"))
}

fn actuals(k: usize) -> String {
    list(1..=k, |i| format!("T_{i}"))
}

fn params(k: usize) -> String {
    list(1..=k, |i| format!("a_{i} T_{i}"))
}

fn args(k: usize) -> String {
    list(1..=k, |i| format!("a_{i}"))
}

fn color(bit: bool) -> &'static str {
    if bit {
        "Blue"
    } else {
        "Red"
    }
}

pub fn generate(cfg: &BenchConfig) -> String {
    let s = Shape::of(cfg);
    let mut out =
        String::from("package main\n\ntype Any interface {}\n\ntype Red struct {}\n\ntype Blue struct {}\n\n");
    // Only family e makes Base and Derived generic.
    let (base_formal, base_args) = if s.branching {
        (format!("[{}]", formal(s.m)), format!("[{}]", actuals(s.m)))
    } else {
        (String::new(), String::new())
    };

    writeln!(out, "type Base{base_formal} interface {{").unwrap();
    for i in 1..=s.n {
        writeln!(out, "\tg_{i}() Any").unwrap();
    }
    out.push_str("}\n\n");
    writeln!(out, "type Derived{base_formal} struct {{}}\n").unwrap();
    for i in 1..=s.n {
        writeln!(out, "func (x Derived{base_args}) g_{i}() Any {{\n\treturn x\n}}\n").unwrap();
    }

    out.push_str("type Top struct {}\n\n");
    out.push_str("func (t Top) Use(a Any, n int) int {\n\treturn n\n}\n\n");
    out.push_str("func (t Top) Op(n int) int {\n\treturn n + 1\n}\n\n");
    let ops = (0..s.c).fold("n".to_string(), |acc, _| format!("t.Op({acc})"));
    writeln!(out, "func (t Top) Ops(n int) int {{\n\treturn {ops}\n}}\n").unwrap();

    let uses = (1..=s.n).rev().fold("n".to_string(), |acc, i| format!("t.Use(x.g_{i}(), {acc})"));
    let call_base_formal =
        if s.branching { format!("{}, base Base{base_args}", formal(s.m)) } else { "base Base".to_string() };
    writeln!(out, "func (t Top) CallBase[{call_base_formal}](x base, n int) int {{\n\treturn t.Ops({uses})\n}}\n")
        .unwrap();

    for i in 1..=s.p {
        let k = if s.branching { i } else { s.m };
        let body = if i == s.p {
            if s.branching {
                let d = format!("Derived{base_args}");
                format!("t.CallBase[{}, {d}]({d}{{}}, n)", actuals(s.m))
            } else {
                "t.CallBase[Derived](Derived{}, n)".to_string()
            }
        } else if s.branching {
            let call =
                |c: &str, rest: &str| format!("t.f_{}[{}, {c}]({}, {c}{{}}, {rest})", i + 1, actuals(k), args(k));
            call("Red", &call("Blue", "n"))
        } else {
            format!("t.f_{}[{}]({}, n)", i + 1, actuals(k), args(k))
        };
        writeln!(out, "func (t Top) f_{i}[{}]({}, n int) int {{\n\treturn {body}\n}}\n", formal(k), params(k)).unwrap();
    }

    // DoIt calls f_1 once per combination of Red/Blue actuals.
    let k = if s.branching { 1 } else { s.m };
    let calls = (0..1usize << k).rev().fold("n".to_string(), |acc, combo| {
        let colors: Vec<&str> = (0..k).map(|j| color(combo >> (k - 1 - j) & 1 == 1)).collect();
        let targs = colors.join(", ");
        let vals = list(0..=k - 1, |j| format!("{}{{}}", colors[j]));
        format!("t.f_1[{targs}]({vals}, {acc})")
    });
    writeln!(out, "func (t Top) DoIt(n int) int {{\n\treturn {calls}\n}}\n").unwrap();
    out.push_str(
        "func (t Top) Loop(i int, n int) int {\n\
         \tif (i > 0) {\n\t\treturn t.Loop(i - 1, t.DoIt(n))\n\t} else {\n\t\treturn n\n\t}\n}\n\n",
    );
    writeln!(out, "func main() {{\n\t_ = Top{{}}.Loop({}, 0)\n}}", cfg.iterations).unwrap();
    out
}

/// The value every generated program computes. Each `DoIt` reaches
/// `CallBase` `2^m` times (by enumeration, or by branching in family e) and
/// each of those adds `c`.
pub fn expected_value(cfg: &BenchConfig) -> i64 {
    let s = Shape::of(cfg);
    (cfg.iterations * (1usize << s.m) * s.c) as i64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRow {
    pub family: Family,
    pub param: usize,
    pub translator: Translator,
    pub output_nodes: usize,
    pub steps: usize,
    pub translate_millis: f64,
    pub error: Option<String>,
}

pub fn measure(cfg: &BenchConfig, translator: Translator) -> MetricsRow {
    let mut row = MetricsRow {
        family: cfg.family,
        param: cfg.param,
        translator,
        output_nodes: 0,
        steps: 0,
        translate_millis: 0.0,
        error: None,
    };
    match translate_and_run(cfg, translator, &mut row) {
        Ok(()) => {}
        Err(e) => row.error = Some(e),
    }
    row
}

fn translate_and_run(cfg: &BenchConfig, translator: Translator, row: &mut MetricsRow) -> Result<(), String> {
    cfg.validate()?;
    let p = parse_fgg(&generate(cfg)).map_err(|d| format!("{d:?}"))?;
    check_program(&p).map_err(|ds| ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))?;
    let start = Instant::now();
    let out: fg::Program = match translator {
        Translator::Dict => translate(&p, Options::default()).map_err(|e| e.to_string())?.program,
        Translator::Erasure => erase(&p).map_err(|e| e.to_string())?,
    };
    row.translate_millis = start.elapsed().as_secs_f64() * 1000.0;
    row.output_nodes = out.node_count();
    let run = run_program(&out, STEP_LIMIT);
    row.steps = run.steps;
    match run.outcome.value() {
        Some(fg::Value::Int(n)) if *n == expected_value(cfg) => Ok(()),
        _ => Err(format!("unexpected outcome {:?}", run.outcome)),
    }
}

pub fn run_suite(
    families: &[(Family, RangeInclusive<usize>)],
    translators: &[Translator],
    iterations: usize,
) -> Vec<MetricsRow> {
    let mut rows = Vec::new();
    for (family, range) in families {
        for param in range.clone() {
            let cfg = BenchConfig { family: *family, param, iterations };
            for &t in translators {
                rows.push(measure(&cfg, t));
            }
        }
    }
    rows
}

pub fn write_csv<W: io::Write>(rows: &[MetricsRow], w: W) -> Result<(), csv::Error> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(["family", "param", "translator", "output_nodes", "steps", "translate_millis", "error"])?;
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// A least-squares polynomial fit.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    /// Coefficients from the constant term up.
    pub coeffs: Vec<f64>,
    pub r_squared: f64,
}

pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Option<Fit> {
    if xs.len() != ys.len() || xs.len() <= degree {
        return None;
    }
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, j| xs[i].powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let coeffs = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = (&a * &coeffs - &b).iter().map(|r| r * r).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(Fit { coeffs: coeffs.iter().copied().collect(), r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_program_is_the_reference_file() {
        let reference = include_str!("../bench/base.fgg");
        for family in [Family::A, Family::B, Family::C, Family::D] {
            assert_eq!(generate(&BenchConfig::new(family, 2)), reference, "family {family}");
        }
    }

    #[test]
    fn family_c_enumerates_all_combinations() {
        let src = generate(&BenchConfig::new(Family::C, 3));
        assert_eq!(src.matches("t.f_1[").count(), 8);
        assert!(src.contains("t.f_1[Blue, Red, Blue](Blue{}, Red{}, Blue{}, "));
    }

    #[test]
    fn family_e_branches_and_widens() {
        let src = generate(&BenchConfig::new(Family::E, 3));
        assert!(src.contains("func (t Top) f_2[T_1 Any, T_2 Any](a_1 T_1, a_2 T_2, n int) int {\n\treturn t.f_3[T_1, T_2, Red](a_1, a_2, Red{}, t.f_3[T_1, T_2, Blue](a_1, a_2, Blue{}, n))\n}"), "{src}");
        assert!(src.contains("type Base[T_1 Any, T_2 Any, T_3 Any] interface"));
    }

    #[test]
    fn generated_programs_compute_the_expected_value() {
        for family in Family::ALL {
            for param in family.min_param()..family.min_param() + 3 {
                let cfg = BenchConfig { family, param, iterations: 3 };
                for t in [Translator::Dict, Translator::Erasure] {
                    let row = measure(&cfg, t);
                    assert_eq!(row.error, None, "{family} {param} {t}");
                    assert!(row.steps > 0 && row.output_nodes > 0);
                }
            }
        }
    }

    #[test]
    fn invalid_parameters_are_reported_per_row() {
        let row = measure(&BenchConfig::new(Family::A, 1), Translator::Dict);
        assert!(row.error.unwrap().contains("at least 2"));
    }

    #[test]
    fn csv_header_only_for_no_rows() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "family,param,translator,output_nodes,steps,translate_millis,error\n"
        );
    }

    #[test]
    fn fits_recover_exact_polynomials() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - 2.0 * x + 7.0).collect();
        let fit = fit_polynomial(&xs, &ys, 2).unwrap();
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
        for (c, want) in fit.coeffs.iter().zip([7.0, -2.0, 3.0]) {
            assert!((c - want).abs() < 1e-6, "{:?}", fit.coeffs);
        }
        let linear = fit_polynomial(&xs, &ys, 1).unwrap();
        assert!(linear.r_squared < 0.99);
    }
}
