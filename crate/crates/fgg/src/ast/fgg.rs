//! FGG: FG with type formals on type and method declarations.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexMap;

use super::print::{comma_list, Out};
use super::{name, BinOp, Literal, Name, Span, BOOL, INT};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Param(Name),
    Named(Name, Vec<Type>),
}

impl Type {
    pub fn named(t: &str, args: Vec<Type>) -> Type {
        Type::Named(name(t), args)
    }

    pub fn param(a: &str) -> Type {
        Type::Param(name(a))
    }

    pub fn int() -> Type {
        Type::named(INT, vec![])
    }

    pub fn bool() -> Type {
        Type::named(BOOL, vec![])
    }

    pub fn head(&self) -> &Name {
        match self {
            Type::Param(a) | Type::Named(a, _) => a,
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Type::Param(_))
    }

    pub fn subst(&self, map: &[(Name, Type)]) -> Type {
        match self {
            Type::Param(a) => map.iter().find(|(b, _)| b == a).map(|(_, t)| t.clone()).unwrap_or_else(|| self.clone()),
            Type::Named(t, args) => Type::Named(t.clone(), args.iter().map(|x| x.subst(map)).collect()),
        }
    }

    pub fn mentions(&self, a: &str) -> bool {
        match self {
            Type::Param(b) => &**b == a,
            Type::Named(_, args) => args.iter().any(|t| t.mentions(a)),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Type::Param(_) => 1,
            Type::Named(_, args) => 1 + args.iter().map(Type::node_count).sum::<usize>(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Param(a) => f.write_str(a),
            Type::Named(t, args) if args.is_empty() => f.write_str(t),
            Type::Named(t, args) => write!(f, "{t}[{}]", comma_list(args)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalEntry {
    pub param: Name,
    pub bound: Type,
}

impl fmt::Display for FormalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.param, self.bound)
    }
}

pub fn formal_params(formal: &[FormalEntry]) -> Vec<Type> {
    formal.iter().map(|e| Type::Param(e.param.clone())).collect()
}

fn formal_count(formal: &[FormalEntry]) -> usize {
    formal.iter().map(|e| 1 + e.bound.node_count()).sum()
}

fn write_formal(formal: &[FormalEntry]) -> String {
    if formal.is_empty() {
        String::new()
    } else {
        format!("[{}]", comma_list(formal))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: Name,
    pub ty: Type,
}

pub type Field = Param;

/// `[Ψ](x τ...) σ`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sig {
    pub formal: Vec<FormalEntry>,
    pub params: Vec<Param>,
    pub ret: Type,
}

impl Sig {
    /// Substitutes into bounds, parameter types and result. The caller makes
    /// sure the method's own formal is not captured (see [`Sig::freshen`]).
    pub fn subst(&self, map: &[(Name, Type)]) -> Sig {
        Sig {
            formal: self
                .formal
                .iter()
                .map(|e| FormalEntry { param: e.param.clone(), bound: e.bound.subst(map) })
                .collect(),
            params: self.params.iter().map(|p| Param { name: p.name.clone(), ty: p.ty.subst(map) }).collect(),
            ret: self.ret.subst(map),
        }
    }

    /// Renames formal parameters that would capture a free name of `map`'s
    /// range, by appending primes.
    pub fn freshen(&self, map: &[(Name, Type)]) -> Sig {
        let clash = |a: &str| map.iter().any(|(_, t)| t.mentions(a));
        if !self.formal.iter().any(|e| clash(&e.param)) {
            return self.clone();
        }
        let taken: Vec<&Name> = self.formal.iter().map(|e| &e.param).collect();
        let mut renames = Vec::new();
        for e in &self.formal {
            if clash(&e.param) {
                let mut fresh = format!("{}'", e.param);
                while clash(&fresh) || taken.iter().any(|t| ***t == *fresh) {
                    fresh.push('\'');
                }
                renames.push((e.param.clone(), Type::Param(name(&fresh))));
            }
        }
        let mut sig = self.subst(&renames);
        for e in &mut sig.formal {
            if let Some((_, Type::Param(b))) = renames.iter().find(|(a, _)| *a == e.param) {
                e.param = b.clone();
            }
        }
        sig
    }

    /// Equality up to consistent renaming of the formal; parameter names are
    /// ignored.
    pub fn alpha_eq(&self, other: &Sig) -> bool {
        if self.formal.len() != other.formal.len() || self.params.len() != other.params.len() {
            return false;
        }
        let to_other: Vec<(Name, Type)> = self
            .formal
            .iter()
            .zip(&other.formal)
            .map(|(a, b)| (a.param.clone(), Type::Param(b.param.clone())))
            .collect();
        let renamed = self.subst(&to_other);
        renamed.formal.iter().zip(&other.formal).all(|(a, b)| a.bound == b.bound)
            && renamed.params.iter().zip(&other.params).all(|(a, b)| a.ty == b.ty)
            && renamed.ret == other.ret
    }

    fn node_count(&self) -> usize {
        formal_count(&self.formal)
            + self.params.iter().map(|p| 1 + p.ty.node_count()).sum::<usize>()
            + self.ret.node_count()
    }
}

impl fmt::Display for Sig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params.iter().map(|p| format!("{} {}", p.name, p.ty)).collect();
        write!(f, "{}({}) {}", write_formal(&self.formal), ps.join(", "), self.ret)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Spec {
    pub name: Name,
    pub sig: Sig,
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.sig)
    }
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

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
    Call { recv: Box<Expr>, method: Name, targs: Vec<Type>, args: Vec<Expr> },
    Lit { ty: Name, targs: Vec<Type>, args: Vec<Expr> },
    Select { recv: Box<Expr>, field: Name },
    Assert { recv: Box<Expr>, ty: Type },
    Int(i64),
    Bool(bool),
    BinOp { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    If { cond: Box<Expr>, then: Box<Expr>, els: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn at(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn var(x: &str) -> Self {
        Expr::new(ExprKind::Var(name(x)))
    }

    pub fn call(recv: Expr, method: &str, targs: Vec<Type>, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call { recv: Box::new(recv), method: name(method), targs, args })
    }

    pub fn lit(ty: &str, targs: Vec<Type>, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Lit { ty: name(ty), targs, args })
    }

    pub fn select(recv: Expr, field: &str) -> Self {
        Expr::new(ExprKind::Select { recv: Box::new(recv), field: name(field) })
    }

    pub fn assert(recv: Expr, ty: Type) -> Self {
        Expr::new(ExprKind::Assert { recv: Box::new(recv), ty })
    }

    pub fn binop(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
    }

    pub fn if_else(cond: Expr, then: Expr, els: Expr) -> Self {
        Expr::new(ExprKind::If { cond: Box::new(cond), then: Box::new(then), els: Box::new(els) })
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

    /// vtype of a value.
    pub fn value_type(&self) -> Option<Type> {
        match &self.kind {
            ExprKind::Lit { ty, targs, .. } => Some(Type::Named(ty.clone(), targs.clone())),
            ExprKind::Int(_) => Some(Type::int()),
            ExprKind::Bool(_) => Some(Type::bool()),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) => vec![],
            ExprKind::Call { recv, args, .. } => {
                let mut v = vec![&**recv];
                v.extend(args.iter());
                v
            }
            ExprKind::Lit { args, .. } => args.iter().collect(),
            ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => vec![&**recv],
            ExprKind::BinOp { lhs, rhs, .. } => vec![&**lhs, &**rhs],
            ExprKind::If { cond, then, els } => vec![&**cond, &**then, &**els],
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
            ExprKind::Select { recv, .. } | ExprKind::Assert { recv, .. } => recv,
            ExprKind::BinOp { lhs, rhs, .. } => {
                if i == 0 {
                    lhs
                } else {
                    rhs
                }
            }
            ExprKind::If { cond, then, els } => match i {
                0 => cond,
                1 => then,
                _ => els,
            },
            _ => panic!("leaf expression has no children"),
        }
    }

    pub fn eval_arity(&self) -> usize {
        match &self.kind {
            ExprKind::Call { args, .. } => 1 + args.len(),
            ExprKind::Lit { args, .. } => args.len(),
            ExprKind::Select { .. } | ExprKind::Assert { .. } | ExprKind::If { .. } => 1,
            ExprKind::BinOp { .. } => 2,
            _ => 0,
        }
    }

    pub fn at_path(&self, path: &[usize]) -> &Expr {
        path.iter().fold(self, |e, &i| e.children()[i])
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> &mut Expr {
        path.iter().fold(self, |e, &i| e.child_mut(i))
    }

    pub fn subst_vars(&mut self, map: &[(Name, Expr)]) {
        if let ExprKind::Var(x) = &self.kind {
            if let Some((_, e)) = map.iter().find(|(y, _)| y == x) {
                *self = e.clone();
            }
            return;
        }
        for i in 0..self.children().len() {
            self.child_mut(i).subst_vars(map);
        }
    }

    pub fn subst_types(&mut self, map: &[(Name, Type)]) {
        match &mut self.kind {
            ExprKind::Call { targs, .. } | ExprKind::Lit { targs, .. } => {
                for t in targs.iter_mut() {
                    *t = t.subst(map);
                }
            }
            ExprKind::Assert { ty, .. } => *ty = ty.subst(map),
            _ => {}
        }
        for i in 0..self.children().len() {
            self.child_mut(i).subst_types(map);
        }
    }

    pub fn node_count(&self) -> usize {
        let own = match &self.kind {
            ExprKind::Call { targs, .. } => 1 + targs.iter().map(Type::node_count).sum::<usize>(),
            ExprKind::Lit { targs, .. } => 2 + targs.iter().map(Type::node_count).sum::<usize>(),
            ExprKind::Assert { ty, .. } => 1 + ty.node_count(),
            _ => 1,
        };
        own + self.children().into_iter().map(Expr::node_count).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructDecl {
    pub name: Name,
    pub formal: Vec<FormalEntry>,
    pub fields: Vec<Field>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceDecl {
    pub name: Name,
    pub formal: Vec<FormalEntry>,
    pub specs: Vec<Spec>,
    pub span: Span,
}

/// `func (x t_S[α...]) m[Ψ](x τ...) σ { return e }`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MethodDecl {
    pub recv: Name,
    pub recv_type: Name,
    pub recv_params: Vec<Name>,
    pub name: Name,
    pub sig: Sig,
    pub body: Expr,
    pub span: Span,
}

impl MethodDecl {
    pub fn spec(&self) -> Spec {
        Spec { name: self.name.clone(), sig: self.sig.clone() }
    }

    /// The receiver's type as seen inside the body.
    pub fn recv_ty(&self) -> Type {
        Type::Named(self.recv_type.clone(), self.recv_params.iter().cloned().map(Type::Param).collect())
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
        match self {
            Decl::Struct(d) => {
                1 + formal_count(&d.formal) + d.fields.iter().map(|f| 1 + f.ty.node_count()).sum::<usize>()
            }
            Decl::Interface(d) => {
                1 + formal_count(&d.formal) + d.specs.iter().map(|s| 1 + s.sig.node_count()).sum::<usize>()
            }
            Decl::Method(m) => 1 + 2 + m.recv_params.len() + m.sig.node_count() + m.body.node_count(),
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

    pub fn has_assertions(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            matches!(e.kind, ExprKind::Assert { .. }) || e.children().into_iter().any(walk)
        }
        walk(&self.main) || self.methods().any(|m| walk(&m.body))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Struct(Name, Vec<Type>, Vec<Value>),
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn from_expr(e: &Expr) -> Option<Value> {
        match &e.kind {
            ExprKind::Lit { ty, targs, args } => Some(Value::Struct(
                ty.clone(),
                targs.clone(),
                args.iter().map(Value::from_expr).collect::<Option<_>>()?,
            )),
            ExprKind::Int(n) => Some(Value::Int(*n)),
            ExprKind::Bool(b) => Some(Value::Bool(*b)),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Struct(t, targs, vs) => Expr::new(ExprKind::Lit {
                ty: t.clone(),
                targs: targs.clone(),
                args: vs.iter().map(Value::to_expr).collect(),
            }),
            Value::Int(n) => Expr::new(ExprKind::Int(*n)),
            Value::Bool(b) => Expr::new(ExprKind::Bool(*b)),
        }
    }

    pub fn vtype(&self) -> Type {
        match self {
            Value::Struct(t, targs, _) => Type::Named(t.clone(), targs.clone()),
            Value::Int(_) => Type::int(),
            Value::Bool(_) => Type::bool(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_expr().fmt(f)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum TypeDef<'p> {
    Struct(&'p StructDecl),
    Interface(&'p InterfaceDecl),
    Builtin,
}

impl<'p> TypeDef<'p> {
    pub fn formal(&self) -> &'p [FormalEntry] {
        match self {
            TypeDef::Struct(s) => &s.formal,
            TypeDef::Interface(i) => &i.formal,
            TypeDef::Builtin => &[],
        }
    }
}

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
                    types.entry(s.name.clone()).or_insert(TypeDef::Struct(s));
                }
                Decl::Interface(i) => {
                    types.entry(i.name.clone()).or_insert(TypeDef::Interface(i));
                }
                Decl::Method(m) => {
                    methods.entry(m.recv_type.clone()).or_default().entry(m.name.clone()).or_insert(m);
                }
            }
        }
        Table { types, methods }
    }

    pub fn is_interface(&self, t: &str) -> bool {
        matches!(self.types.get(t), Some(TypeDef::Interface(_)))
    }

    pub fn is_struct(&self, t: &str) -> bool {
        matches!(self.types.get(t), Some(TypeDef::Struct(_)) | Some(TypeDef::Builtin))
    }

    pub fn formal(&self, t: &str) -> Option<&'p [FormalEntry]> {
        self.types.get(t).map(TypeDef::formal)
    }

    pub fn method(&self, t: &str, m: &str) -> Option<&'p MethodDecl> {
        self.methods.get(t).and_then(|ms| ms.get(m)).copied()
    }

    /// Field list of `t_S[φ]` with the actuals substituted.
    pub fn fields(&self, t: &str, targs: &[Type]) -> Option<Vec<Param>> {
        match self.types.get(t)? {
            TypeDef::Struct(s) => {
                let map = bind(&s.formal, targs);
                Some(s.fields.iter().map(|f| Param { name: f.name.clone(), ty: f.ty.subst(&map) }).collect())
            }
            TypeDef::Builtin => Some(vec![]),
            TypeDef::Interface(_) => None,
        }
    }
}

/// Pairs a formal with actuals positionally.
pub fn bind(formal: &[FormalEntry], actuals: &[Type]) -> Vec<(Name, Type)> {
    formal.iter().zip(actuals).map(|(e, t)| (e.param.clone(), t.clone())).collect()
}

// ----- printing -----

fn receiver(e: &Expr) -> String {
    match e.kind {
        ExprKind::BinOp { .. } | ExprKind::If { .. } | ExprKind::Int(i64::MIN..=-1) => {
            format!("({e})")
        }
        _ => e.to_string(),
    }
}

fn operand(e: &Expr, op: BinOp, right: bool) -> String {
    let wrap = match &e.kind {
        ExprKind::BinOp { op: inner, .. } => {
            inner.precedence() < op.precedence() || (right && inner.precedence() == op.precedence())
        }
        ExprKind::If { .. } => true,
        _ => false,
    };
    if wrap {
        format!("({e})")
    } else {
        e.to_string()
    }
}

fn targs_str(targs: &[Type]) -> String {
    if targs.is_empty() {
        String::new()
    } else {
        format!("[{}]", comma_list(targs))
    }
}

fn inline_body(e: &Expr) -> String {
    match &e.kind {
        ExprKind::If { cond, then, els } => {
            format!("if ({cond}) {{ {} }} else {{ {} }}", inline_body(then), inline_body(els))
        }
        _ => format!("return {e}"),
    }
}

fn write_body(out: &mut Out, e: &Expr) {
    match &e.kind {
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
        _ => out.line(&format!("return {e}")),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Var(x) => f.write_str(x),
            ExprKind::Call { recv, method, targs, args } => {
                write!(f, "{}.{method}{}({})", receiver(recv), targs_str(targs), comma_list(args))
            }
            ExprKind::Lit { ty, targs, args } => {
                write!(f, "{ty}{}{{{}}}", targs_str(targs), comma_list(args))
            }
            ExprKind::Select { recv, field } => write!(f, "{}.{field}", receiver(recv)),
            ExprKind::Assert { recv, ty } => write!(f, "{}.({ty})", receiver(recv)),
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Bool(b) => write!(f, "{b}"),
            ExprKind::BinOp { op, lhs, rhs } => {
                write!(f, "{} {op} {}", operand(lhs, *op, false), operand(rhs, *op, true))
            }
            ExprKind::If { .. } => f.write_str(&inline_body(self)),
        }
    }
}

fn write_decl(out: &mut Out, d: &Decl) {
    match d {
        Decl::Struct(s) => {
            let head = format!("type {}{} struct", s.name, write_formal(&s.formal));
            if s.fields.is_empty() {
                out.line(&format!("{head} {{}}"));
            } else {
                out.line(&format!("{head} {{"));
                out.indent();
                for fld in &s.fields {
                    out.line(&format!("{} {}", fld.name, fld.ty));
                }
                out.dedent();
                out.line("}");
            }
        }
        Decl::Interface(i) => {
            let head = format!("type {}{} interface", i.name, write_formal(&i.formal));
            if i.specs.is_empty() {
                out.line(&format!("{head} {{}}"));
            } else {
                out.line(&format!("{head} {{"));
                out.indent();
                for s in &i.specs {
                    out.line(&s.to_string());
                }
                out.dedent();
                out.line("}");
            }
        }
        Decl::Method(m) => {
            out.line(&format!(
                "func ({} {}{}) {}{} {{",
                m.recv,
                m.recv_type,
                if m.recv_params.is_empty() { String::new() } else { format!("[{}]", comma_list(&m.recv_params)) },
                m.name,
                m.sig
            ));
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
