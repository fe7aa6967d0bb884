//! FG and its extended dialect (if / struct inequality / panic / sequencing).
//!
//! Types are bare names; whether a name denotes a struct or an interface is
//! decided by its declaration (see [`Table`]).

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexMap;
use serde::Serialize;

use super::print::{comma_list, Out};
use super::{name, BinOp, Literal, Name, Span, BOOL, INT};

/// Which translation rule emitted a node. Source programs are all `Source`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    #[default]
    Source,
    /// Assertion inserted to recover a static type lost by erasing to `Any`.
    Erase,
    /// Type-assertion simulation (tryCast and spec_ bodies).
    Sim,
    /// Dictionary construction and lookup.
    Dict,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
    pub origin: Origin,
}

// Structural equality is syntactic; spans and origin tags are metadata.
impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.kind.hash(h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Var(Name),
    Call { recv: Box<Expr>, method: Name, args: Vec<Expr> },
    Lit { ty: Name, args: Vec<Expr> },
    Select { recv: Box<Expr>, field: Name },
    Assert { recv: Box<Expr>, ty: Name },
    Int(i64),
    Bool(bool),
    BinOp { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    If { cond: Cond, then: Box<Expr>, els: Box<Expr> },
    Seq(Box<Expr>, Box<Expr>),
    Panic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    Neq(Box<Expr>, Box<Expr>),
    Bool(Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default(), origin: Origin::Source }
    }

    pub fn at(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn tagged(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn var(x: &str) -> Self {
        Expr::new(ExprKind::Var(name(x)))
    }

    pub fn call(recv: Expr, method: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call { recv: Box::new(recv), method: name(method), args })
    }

    pub fn lit(ty: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Lit { ty: name(ty), args })
    }

    pub fn select(recv: Expr, field: &str) -> Self {
        Expr::new(ExprKind::Select { recv: Box::new(recv), field: name(field) })
    }

    pub fn assert(recv: Expr, ty: &str) -> Self {
        Expr::new(ExprKind::Assert { recv: Box::new(recv), ty: name(ty) })
    }

    pub fn binop(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
    }

    pub fn if_neq(lhs: Expr, rhs: Expr, then: Expr, els: Expr) -> Self {
        Expr::new(ExprKind::If {
            cond: Cond::Neq(Box::new(lhs), Box::new(rhs)),
            then: Box::new(then),
            els: Box::new(els),
        })
    }

    pub fn if_bool(cond: Expr, then: Expr, els: Expr) -> Self {
        Expr::new(ExprKind::If { cond: Cond::Bool(Box::new(cond)), then: Box::new(then), els: Box::new(els) })
    }

    pub fn seq(first: Expr, rest: Expr) -> Self {
        Expr::new(ExprKind::Seq(Box::new(first), Box::new(rest)))
    }

    pub fn panic() -> Self {
        Expr::new(ExprKind::Panic)
    }

    pub fn literal(l: Literal) -> Self {
        match l {
            Literal::Int(n) => Expr::new(ExprKind::Int(n)),
            Literal::Bool(b) => Expr::new(ExprKind::Bool(b)),
        }
    }

    pub fn is_value(&self) -> bool {
        match &self.kind {
            ExprKind::Lit { args, .. } => args.iter().all(Expr::is_value),
            ExprKind::Int(_) | ExprKind::Bool(_) => true,
            _ => false,
        }
    }

    /// The dynamic type of a value.
    pub fn value_type(&self) -> Option<Name> {
        match &self.kind {
            ExprKind::Lit { ty, .. } => Some(ty.clone()),
            ExprKind::Int(_) => Some(name(INT)),
            ExprKind::Bool(_) => Some(name(BOOL)),
            _ => None,
        }
    }

    /// First extended-dialect construct in the term, if any.
    pub fn extended_construct(&self) -> Option<&'static str> {
        match &self.kind {
            ExprKind::If { .. } => Some("if"),
            ExprKind::Seq(..) => Some("sequencing"),
            ExprKind::Panic => Some("panic"),
            _ => self.children().into_iter().find_map(Expr::extended_construct),
        }
    }

    /// Immediate subterms in left-to-right order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Panic => vec![],
            ExprKind::Call { recv, args, .. } => {
                let mut v = vec![&**recv];
                v.extend(args.iter());
                v
            }
            ExprKind::Lit { args, .. } => args.iter().collect(),
            ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => vec![&**recv],
            ExprKind::BinOp { lhs, rhs, .. } => vec![&**lhs, &**rhs],
            ExprKind::If { cond, then, els } => {
                let mut v = match cond {
                    Cond::Neq(l, r) => vec![&**l, &**r],
                    Cond::Bool(c) => vec![&**c],
                };
                v.push(then);
                v.push(els);
                v
            }
            ExprKind::Seq(a, b) => vec![&**a, &**b],
        }
    }

    pub fn child_mut(&mut self, i: usize) -> &mut Expr {
        match &mut self.kind {
            ExprKind::Call { recv, args, .. } => {
                if i == 0 {
                    recv
                } else {
                    &mut args[i - 1]
                }
            }
            ExprKind::Lit { args, .. } => &mut args[i],
            ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => {
                assert_eq!(i, 0);
                recv
            }
            ExprKind::BinOp { lhs, rhs, .. } => {
                if i == 0 {
                    lhs
                } else {
                    rhs
                }
            }
            ExprKind::If { cond, then, els } => {
                let n = match cond {
                    Cond::Neq(..) => 2,
                    Cond::Bool(_) => 1,
                };
                match (cond, i) {
                    (Cond::Neq(l, _), 0) => l,
                    (Cond::Neq(_, r), 1) => r,
                    (Cond::Bool(c), 0) => c,
                    _ if i == n => then,
                    _ => els,
                }
            }
            ExprKind::Seq(a, b) => {
                if i == 0 {
                    a
                } else {
                    b
                }
            }
            _ => panic!("leaf expression has no children"),
        }
    }

    /// How many leading children are evaluation positions.
    pub fn eval_arity(&self) -> usize {
        match &self.kind {
            ExprKind::Call { args, .. } => 1 + args.len(),
            ExprKind::Lit { args, .. } => args.len(),
            ExprKind::Select { .. } | ExprKind::Assert { .. } => 1,
            ExprKind::BinOp { .. } => 2,
            ExprKind::If { cond, .. } => match cond {
                Cond::Neq(..) => 2,
                Cond::Bool(_) => 1,
            },
            ExprKind::Seq(..) => 1,
            _ => 0,
        }
    }

    pub fn at_path(&self, path: &[usize]) -> &Expr {
        path.iter().fold(self, |e, &i| e.children()[i])
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> &mut Expr {
        path.iter().fold(self, |e, &i| e.child_mut(i))
    }

    /// Replaces free variables. FG expressions bind nothing, so this is
    /// capture-free.
    pub fn subst(&mut self, map: &[(Name, Expr)]) {
        if let ExprKind::Var(x) = &self.kind {
            if let Some((_, e)) = map.iter().find(|(y, _)| y == x) {
                *self = e.clone();
            }
            return;
        }
        for i in 0..self.children().len() {
            self.child_mut(i).subst(map);
        }
    }

    pub fn node_count(&self) -> usize {
        let own = match &self.kind {
            ExprKind::Lit { .. } | ExprKind::Assert { .. } => 2,
            _ => 1,
        };
        own + self.children().into_iter().map(Expr::node_count).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    pub name: Name,
    pub ty: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: Name,
    pub ty: Name,
}

/// A method specification `m(x t...) t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Spec {
    pub name: Name,
    pub params: Vec<Param>,
    pub ret: Name,
}

impl Spec {
    /// Signature equality ignores parameter names.
    pub fn same_signature(&self, other: &Spec) -> bool {
        self.name == other.name
            && self.ret == other.ret
            && self.params.len() == other.params.len()
            && self.params.iter().zip(&other.params).all(|(a, b)| a.ty == b.ty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructDecl {
    pub name: Name,
    pub fields: Vec<Field>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceDecl {
    pub name: Name,
    pub specs: Vec<Spec>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MethodDecl {
    pub recv: Param,
    pub name: Name,
    pub params: Vec<Param>,
    pub ret: Name,
    pub body: Expr,
    pub span: Span,
}

impl MethodDecl {
    pub fn spec(&self) -> Spec {
        Spec { name: self.name.clone(), params: self.params.clone(), ret: self.ret.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decl {
    Struct(StructDecl),
    Interface(InterfaceDecl),
    Method(MethodDecl),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Struct(d) => d.span,
            Decl::Interface(d) => d.span,
            Decl::Method(d) => d.span,
        }
    }

    pub fn node_count(&self) -> usize {
        let params = |ps: &[Param]| ps.len() * 2;
        match self {
            Decl::Struct(d) => 1 + d.fields.len() * 2,
            Decl::Interface(d) => 1 + d.specs.iter().map(|s| 2 + params(&s.params)).sum::<usize>(),
            Decl::Method(m) => 1 + 2 + params(&m.params) + 1 + m.body.node_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub main: Expr,
}

impl Program {
    pub fn node_count(&self) -> usize {
        self.decls.iter().map(Decl::node_count).sum::<usize>() + self.main.node_count()
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Method(m) => Some(m),
            _ => None,
        })
    }
}

/// A fully reduced FG term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Struct(Name, Vec<Value>),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn from_expr(e: &Expr) -> Option<Value> {
        match &e.kind {
            ExprKind::Lit { ty, args } => {
                Some(Value::Struct(ty.clone(), args.iter().map(Value::from_expr).collect::<Option<_>>()?))
            }
            ExprKind::Int(n) => Some(Value::Int(*n)),
            ExprKind::Bool(b) => Some(Value::Bool(*b)),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Struct(t, vs) => {
                Expr::new(ExprKind::Lit { ty: t.clone(), args: vs.iter().map(Value::to_expr).collect() })
            }
            Value::Int(n) => Expr::new(ExprKind::Int(*n)),
            Value::Bool(b) => Expr::new(ExprKind::Bool(*b)),
        }
    }

    pub fn type_name(&self) -> Name {
        match self {
            Value::Struct(t, _) => t.clone(),
            Value::Int(_) => name(INT),
            Value::Bool(_) => name(BOOL),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_expr().fmt(f)
    }
}

/// What a type name denotes.
#[derive(Clone, Copy, Debug)]
pub enum TypeDef<'p> {
    Struct(&'p [Field]),
    Interface(&'p [Spec]),
    /// `int` and `bool`: struct-kinded, no fields, no literal form.
    Builtin,
}

/// Declaration lookup tables. The first declaration of a name wins;
/// duplicates are reported by the typechecker.
#[derive(Clone, Debug)]
pub struct Table<'p> {
    pub types: HashMap<Name, TypeDef<'p>>,
    pub methods: HashMap<Name, IndexMap<Name, &'p MethodDecl>>,
}

impl<'p> Table<'p> {
    pub fn new(p: &'p Program) -> Self {
        let mut types = HashMap::new();
        types.insert(name(INT), TypeDef::Builtin);
        types.insert(name(BOOL), TypeDef::Builtin);
        let mut methods: HashMap<Name, IndexMap<Name, &'p MethodDecl>> = HashMap::new();
        for d in &p.decls {
            match d {
                Decl::Struct(s) => {
                    types.entry(s.name.clone()).or_insert(TypeDef::Struct(&s.fields));
                }
                Decl::Interface(i) => {
                    types.entry(i.name.clone()).or_insert(TypeDef::Interface(&i.specs));
                }
                Decl::Method(m) => {
                    methods.entry(m.recv.ty.clone()).or_default().entry(m.name.clone()).or_insert(m);
                }
            }
        }
        Table { types, methods }
    }

    pub fn is_interface(&self, t: &str) -> bool {
        matches!(self.types.get(t), Some(TypeDef::Interface(_)))
    }

    /// Struct-kinded names, including the builtins.
    pub fn is_struct(&self, t: &str) -> bool {
        matches!(self.types.get(t), Some(TypeDef::Struct(_)) | Some(TypeDef::Builtin))
    }

    pub fn fields(&self, t: &str) -> Option<&'p [Field]> {
        match self.types.get(t) {
            Some(TypeDef::Struct(fs)) => Some(fs),
            Some(TypeDef::Builtin) => Some(&[]),
            _ => None,
        }
    }

    pub fn method(&self, t: &str, m: &str) -> Option<&'p MethodDecl> {
        self.methods.get(t).and_then(|ms| ms.get(m)).copied()
    }

    /// methods(t): declared methods of a struct, or the specs of an interface.
    pub fn method_set(&self, t: &str) -> Vec<Spec> {
        match self.types.get(t) {
            Some(TypeDef::Interface(specs)) => specs.to_vec(),
            Some(_) => self.methods.get(t).map(|ms| ms.values().map(|m| m.spec()).collect()).unwrap_or_default(),
            None => vec![],
        }
    }

    /// `t <: u`: a struct only implements itself; an interface is
    /// implemented by any type whose method set covers its specs.
    pub fn subtype(&self, t: &str, u: &str) -> bool {
        if t == u {
            return true;
        }
        if !self.is_interface(u) {
            return false;
        }
        let have = self.method_set(t);
        self.method_set(u).iter().all(|s| have.iter().any(|h| h.same_signature(s)))
    }
}

// ----- printing -----

fn needs_parens_as_receiver(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::BinOp { .. } | ExprKind::If { .. } | ExprKind::Int(i64::MIN..=-1))
}

fn write_receiver(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if needs_parens_as_receiver(e) {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_operand(e: &Expr, op: BinOp, right: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = match &e.kind {
        ExprKind::BinOp { op: inner, .. } => {
            inner.precedence() < op.precedence() || (right && inner.precedence() == op.precedence())
        }
        ExprKind::If { .. } => true,
        _ => false,
    };
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Neq(l, r) => write!(f, "{l} != {r}"),
            Cond::Bool(c) => write!(f, "{c}"),
        }
    }
}

/// A statement in head position: `if` and `panic` would otherwise be read
/// back as statements rather than expressions.
fn statement(e: &Expr) -> String {
    match e.kind {
        ExprKind::If { .. } | ExprKind::Panic => format!("({e})"),
        _ => e.to_string(),
    }
}

fn inline_body(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Seq(a, b) => format!("{}; {}", statement(a), inline_body(b)),
        ExprKind::If { cond, then, els } if then.kind == ExprKind::Panic => {
            format!("if ({cond}) {{ panic }}; {}", inline_body(els))
        }
        ExprKind::If { cond, then, els } => {
            format!("if ({cond}) {{ {} }} else {{ {} }}", inline_body(then), inline_body(els))
        }
        ExprKind::Panic => "panic".to_string(),
        _ => format!("return {e}"),
    }
}

fn write_body(out: &mut Out, e: &Expr) {
    match &e.kind {
        ExprKind::Seq(a, b) => {
            out.line(&statement(a));
            write_body(out, b);
        }
        ExprKind::If { cond, then, els } if then.kind == ExprKind::Panic => {
            out.line(&format!("if ({cond}) {{ panic }}"));
            write_body(out, els);
        }
        ExprKind::If { cond, then, els } => {
            out.line(&format!("if ({cond}) {{"));
            out.indent();
            write_body(out, then);
            out.dedent();
            out.line("} else {");
            out.indent();
            write_body(out, els);
            out.dedent();
            out.line("}");
        }
        ExprKind::Panic => out.line("panic"),
        _ => out.line(&format!("return {e}")),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Var(x) => f.write_str(x),
            ExprKind::Call { recv, method, args } => {
                write_receiver(recv, f)?;
                write!(f, ".{method}({})", comma_list(args))
            }
            ExprKind::Lit { ty, args } => write!(f, "{ty}{{{}}}", comma_list(args)),
            ExprKind::Select { recv, field } => {
                write_receiver(recv, f)?;
                write!(f, ".{field}")
            }
            ExprKind::Assert { recv, ty } => {
                write_receiver(recv, f)?;
                write!(f, ".({ty})")
            }
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Bool(b) => write!(f, "{b}"),
            ExprKind::BinOp { op, lhs, rhs } => {
                write_operand(lhs, *op, false, f)?;
                write!(f, " {op} ")?;
                write_operand(rhs, *op, true, f)
            }
            ExprKind::If { cond, then, els } => {
                write!(f, "if ({cond}) {{ {} }} else {{ {} }}", inline_body(then), inline_body(els))
            }
            ExprKind::Seq(a, b) => write!(f, "({}; {})", statement(a), b),
            ExprKind::Panic => f.write_str("panic"),
        }
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} {}", p.name, p.ty)).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) {}", self.name, params(&self.params), self.ret)
    }
}

fn write_decl(out: &mut Out, d: &Decl) {
    match d {
        Decl::Struct(s) if s.fields.is_empty() => {
            out.line(&format!("type {} struct {{}}", s.name));
        }
        Decl::Struct(s) => {
            out.line(&format!("type {} struct {{", s.name));
            out.indent();
            for fld in &s.fields {
                out.line(&format!("{} {}", fld.name, fld.ty));
            }
            out.dedent();
            out.line("}");
        }
        Decl::Interface(i) if i.specs.is_empty() => {
            out.line(&format!("type {} interface {{}}", i.name));
        }
        Decl::Interface(i) => {
            out.line(&format!("type {} interface {{", i.name));
            out.indent();
            for s in &i.specs {
                out.line(&s.to_string());
            }
            out.dedent();
            out.line("}");
        }
        Decl::Method(m) => {
            out.line(&format!("func ({} {}) {}({}) {} {{", m.recv.name, m.recv.ty, m.name, params(&m.params), m.ret));
            out.indent();
            write_body(out, &m.body);
            out.dedent();
            out.line("}");
        }
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = Out::new();
        write_decl(&mut out, self);
        f.write_str(out.finish().trim_end())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = Out::new();
        out.line("package main");
        for d in &self.decls {
            out.blank();
            write_decl(&mut out, d);
        }
        out.blank();
        out.line("func main() {");
        out.indent();
        out.line(&format!("_ = {}", self.main));
        out.dedent();
        out.line("}");
        f.write_str(&out.finish())
    }
}
