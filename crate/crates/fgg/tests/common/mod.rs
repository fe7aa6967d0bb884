//! Shared fixtures and reference oracles for the integration suites.
//!
//! The oracles here are written against the grammar and the declarations
//! of the source program only; none of them calls into the translators.

#![allow(dead_code)]

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use fgg::ast::fg::{self, Cond, ExprKind};
use fgg::ast::fgg as g;
use fgg::parser::{parse_fgg, Dialect};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> String {
    fs::read_to_string(manifest_dir().join("tests/fixtures").join(name)).expect("fixture exists")
}

pub struct CorpusEntry {
    pub name: String,
    pub path: PathBuf,
    pub src: String,
    pub program: g::Program,
}

/// Every `.fgg` file under `tests/corpus`, sorted by name.
pub fn corpus() -> Vec<CorpusEntry> {
    let dir = manifest_dir().join("tests/corpus");
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fgg"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let src = fs::read_to_string(&path).unwrap();
            let program = parse_fgg(&src).unwrap_or_else(|d| panic!("{}: {d:?}", path.display()));
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            CorpusEntry { name, path, src, program }
        })
        .collect()
}

pub fn corpus_entry(name: &str) -> CorpusEntry {
    corpus().into_iter().find(|e| e.name == name).unwrap_or_else(|| panic!("no corpus program {name}"))
}

/// Field counts of the source program's structs.
pub fn source_arity(p: &g::Program) -> HashMap<String, usize> {
    p.decls
        .iter()
        .filter_map(|d| match d {
            g::Decl::Struct(s) => Some((s.name.to_string(), s.fields.len())),
            _ => None,
        })
        .collect()
}

/// An FGG value with its type arguments dropped, printed.
pub fn untyped(v: &g::Value) -> String {
    match v {
        g::Value::Struct(t, _, args) => {
            format!("{t}{{{}}}", args.iter().map(untyped).collect::<Vec<_>>().join(", "))
        }
        g::Value::Int(n) => n.to_string(),
        g::Value::Bool(b) => b.to_string(),
    }
}

/// An FG value restricted to the fields the source declared: every struct
/// keeps its first `arity[t]` arguments, dropping appended dictionaries.
pub fn source_fields(v: &fg::Value, arity: &HashMap<String, usize>) -> String {
    match v {
        fg::Value::Struct(t, args) => {
            let n = arity.get(t.as_ref()).copied().unwrap_or(args.len());
            let kept: Vec<_> = args.iter().take(n).map(|a| source_fields(a, arity)).collect();
            format!("{t}{{{}}}", kept.join(", "))
        }
        fg::Value::Int(n) => n.to_string(),
        fg::Value::Bool(b) => b.to_string(),
    }
}

pub fn has_assertions(p: &g::Program) -> bool {
    fn walk(e: &g::Expr) -> bool {
        matches!(e.kind, g::ExprKind::Assert { .. }) || e.children().into_iter().any(walk)
    }
    p.methods().map(|m| &m.body).chain([&p.main]).any(walk)
}

/// Evaluation positions of an FG-extended node, as child indices in the
/// order they are evaluated.
fn eval_children(e: &fg::Expr) -> Vec<(usize, &fg::Expr)> {
    match &e.kind {
        ExprKind::Call { recv, args, .. } => std::iter::once(&**recv).chain(args.iter()).enumerate().collect(),
        ExprKind::Lit { args, .. } => args.iter().enumerate().collect(),
        ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => vec![(0, &**recv)],
        ExprKind::BinOp { lhs, rhs, .. } => vec![(0, &**lhs), (1, &**rhs)],
        ExprKind::If { cond: Cond::Neq(l, r), .. } => vec![(0, &**l), (1, &**r)],
        ExprKind::If { cond: Cond::Bool(c), .. } => vec![(0, &**c)],
        ExprKind::Seq(a, _) => vec![(0, &**a)],
        ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Panic => vec![],
    }
}

fn is_value(e: &fg::Expr) -> bool {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) => true,
        ExprKind::Lit { args, .. } => args.iter().all(is_value),
        _ => false,
    }
}

/// Every way to write `e` as `E[r]` with `E` an evaluation context and `r`
/// a non-value whose evaluation positions all hold values. Found by trying
/// each path into the tree, not by following the left-to-right rule.
pub fn decompositions(e: &fg::Expr) -> Vec<Vec<usize>> {
    fn go(e: &fg::Expr, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if is_value(e) {
            return;
        }
        let kids = eval_children(e);
        if kids.iter().all(|(_, k)| is_value(k)) {
            out.push(path.clone());
        }
        for (pos, (i, k)) in kids.iter().enumerate() {
            // Contexts place the hole after values only.
            if kids[..pos].iter().all(|(_, v)| is_value(v)) {
                path.push(*i);
                go(k, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

pub fn dialects() -> [Dialect; 2] {
    [Dialect::Core, Dialect::Extended]
}

fn g_eval_children(e: &g::Expr) -> Vec<(usize, &g::Expr)> {
    match &e.kind {
        g::ExprKind::Call { recv, args, .. } => std::iter::once(&**recv).chain(args.iter()).enumerate().collect(),
        g::ExprKind::Lit { args, .. } => args.iter().enumerate().collect(),
        g::ExprKind::Select { recv, .. } | g::ExprKind::Assert { recv, .. } => vec![(0, &**recv)],
        g::ExprKind::BinOp { lhs, rhs, .. } => vec![(0, &**lhs), (1, &**rhs)],
        g::ExprKind::If { cond, .. } => vec![(0, &**cond)],
        g::ExprKind::Var(_) | g::ExprKind::Int(_) | g::ExprKind::Bool(_) => vec![],
    }
}

fn g_is_value(e: &g::Expr) -> bool {
    match &e.kind {
        g::ExprKind::Int(_) | g::ExprKind::Bool(_) => true,
        g::ExprKind::Lit { args, .. } => args.iter().all(g_is_value),
        _ => false,
    }
}

/// [`decompositions`] for FGG terms.
pub fn fgg_decompositions(e: &g::Expr) -> Vec<Vec<usize>> {
    fn go(e: &g::Expr, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if g_is_value(e) {
            return;
        }
        let kids = g_eval_children(e);
        if kids.iter().all(|(_, k)| g_is_value(k)) {
            out.push(path.clone());
        }
        for (pos, (i, k)) in kids.iter().enumerate() {
            if kids[..pos].iter().all(|(_, v)| g_is_value(v)) {
                path.push(*i);
                go(k, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// The non-value terms of the source run of `p`, at most `limit` of them.
/// A run that fails ends with the term that halted.
pub fn fgg_trajectory(p: &g::Program, limit: usize) -> Vec<g::Expr> {
    use fgg::reduce::{fgg::Machine, Step};
    let m = Machine::new(p);
    let mut cur = p.main.clone();
    let mut out = Vec::new();
    while out.len() < limit {
        match m.step(&cur) {
            Step::Stepped { next, .. } => out.push(std::mem::replace(&mut cur, next)),
            Step::Halted(_) => {
                out.push(cur);
                break;
            }
            Step::Value => break,
        }
    }
    out
}
