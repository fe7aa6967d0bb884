use std::collections::HashMap;

use crate::ast::fg::*;
use crate::ast::{name, BinOp, Name, Span, BOOL, INT};
use crate::parser::{Diagnostic, Dialect};

use super::{first_duplicate, TResult, TypeError};

/// The type of an expression. `Bottom` is the type of `panic`, below every
/// other type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Named(Name),
    Bottom,
}

impl Ty {
    pub fn named(t: &str) -> Ty {
        Ty::Named(name(t))
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            Ty::Named(t) => Some(t),
            Ty::Bottom => None,
        }
    }
}

impl std::fmt::Display for Ty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ty::Named(t) => f.write_str(t),
            Ty::Bottom => f.write_str("⊥"),
        }
    }
}

pub type Env = HashMap<Name, Name>;

pub struct Checker<'p> {
    pub table: Table<'p>,
    /// Method sets, computed once per type name.
    sets: HashMap<Name, Vec<Spec>>,
}

impl<'p> Checker<'p> {
    pub fn new(p: &'p Program) -> Self {
        let table = Table::new(p);
        let sets = table.types.keys().map(|t| (t.clone(), table.method_set(t))).collect();
        Checker { table, sets }
    }

    pub fn method_set(&self, t: &str) -> &[Spec] {
        self.sets.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn subtype(&self, t: &str, u: &str) -> bool {
        if t == u {
            return true;
        }
        if !self.table.is_interface(u) {
            return false;
        }
        let have = self.method_set(t);
        self.method_set(u).iter().all(|s| have.iter().any(|h| h.same_signature(s)))
    }

    pub fn ty_subtype(&self, t: &Ty, u: &Ty) -> bool {
        match (t, u) {
            (Ty::Bottom, _) => true,
            (_, Ty::Bottom) => false,
            (Ty::Named(a), Ty::Named(b)) => self.subtype(a, b),
        }
    }

    fn declared(&self, t: &str, span: Span) -> TResult<()> {
        if self.table.types.contains_key(t) {
            Ok(())
        } else {
            Err(TypeError::new("t-ok", format!("unknown type {t}"), span))
        }
    }

    pub fn type_of(&self, env: &Env, e: &Expr) -> TResult<Ty> {
        let span = e.span;
        match &e.kind {
            ExprKind::Var(x) => env
                .get(x)
                .map(|t| Ty::Named(t.clone()))
                .ok_or_else(|| TypeError::new("t-var", format!("unbound variable {x}"), span)),
            ExprKind::Call { recv, method, args } => {
                let rt = self.type_of(env, recv)?;
                let arg_tys = args.iter().map(|a| self.type_of(env, a)).collect::<TResult<Vec<_>>>()?;
                let Ty::Named(t) = rt else {
                    return Ok(Ty::Bottom);
                };
                let spec = self
                    .method_set(&t)
                    .iter()
                    .find(|s| s.name == *method)
                    .ok_or_else(|| TypeError::new("t-call", format!("type {t} has no method {method}"), span))?;
                if spec.params.len() != args.len() {
                    return Err(TypeError::new(
                        "t-call",
                        format!("{t}.{method} expects {} arguments, got {}", spec.params.len(), args.len()),
                        span,
                    ));
                }
                for (p, at) in spec.params.iter().zip(&arg_tys) {
                    if !self.ty_subtype(at, &Ty::Named(p.ty.clone())) {
                        return Err(TypeError::new(
                            "t-call",
                            format!("argument of type {at} does not implement {}", p.ty),
                            span,
                        ));
                    }
                }
                Ok(Ty::Named(spec.ret.clone()))
            }
            ExprKind::Lit { ty, args } => {
                let fields = match self.table.types.get(ty) {
                    Some(TypeDef::Struct(fs)) => *fs,
                    _ => return Err(TypeError::new("t-literal", format!("{ty} is not a struct type"), span)),
                };
                if fields.len() != args.len() {
                    return Err(TypeError::new(
                        "t-literal",
                        format!("{ty} has {} fields, literal gives {}", fields.len(), args.len()),
                        span,
                    ));
                }
                for (f, a) in fields.iter().zip(args) {
                    let at = self.type_of(env, a)?;
                    if !self.ty_subtype(&at, &Ty::Named(f.ty.clone())) {
                        return Err(TypeError::new(
                            "t-literal",
                            format!("field {} of {ty}: {at} does not implement {}", f.name, f.ty),
                            a.span,
                        ));
                    }
                }
                Ok(Ty::Named(ty.clone()))
            }
            ExprKind::Select { recv, field } => {
                let Ty::Named(t) = self.type_of(env, recv)? else {
                    return Ok(Ty::Bottom);
                };
                let fields = self
                    .table
                    .fields(&t)
                    .ok_or_else(|| TypeError::new("t-field", format!("{t} is not a struct type"), span))?;
                fields
                    .iter()
                    .find(|f| f.name == *field)
                    .map(|f| Ty::Named(f.ty.clone()))
                    .ok_or_else(|| TypeError::new("t-field", format!("{t} has no field {field}"), span))
            }
            ExprKind::Assert { recv, ty } => {
                let rt = self.type_of(env, recv)?;
                self.declared(ty, span)?;
                if let Ty::Named(u) = &rt {
                    // t-assert_S: a struct target must implement the source
                    // interface. Struct sources fall under t-stupid.
                    if self.table.is_interface(u) && self.table.is_struct(ty) && !self.subtype(ty, u) {
                        return Err(TypeError::new(
                            "t-assert",
                            format!("impossible assertion: {ty} does not implement {u}"),
                            span,
                        ));
                    }
                }
                Ok(Ty::Named(ty.clone()))
            }
            ExprKind::Int(_) => Ok(Ty::named(INT)),
            ExprKind::Bool(_) => Ok(Ty::named(BOOL)),
            ExprKind::BinOp { op, lhs, rhs } => {
                for side in [lhs, rhs] {
                    let t = self.type_of(env, side)?;
                    if !self.ty_subtype(&t, &Ty::named(INT)) {
                        return Err(TypeError::new(
                            "t-binop",
                            format!("operand of {op} has type {t}, expected int"),
                            side.span,
                        ));
                    }
                }
                Ok(Ty::named(binop_result(*op)))
            }
            ExprKind::If { cond, then, els } => {
                match cond {
                    Cond::Neq(l, r) => {
                        self.type_of(env, l)?;
                        self.type_of(env, r)?;
                    }
                    Cond::Bool(c) => {
                        let t = self.type_of(env, c)?;
                        if !self.ty_subtype(&t, &Ty::named(BOOL)) {
                            return Err(TypeError::new(
                                "t-if",
                                format!("condition has type {t}, expected bool"),
                                c.span,
                            ));
                        }
                    }
                }
                let a = self.type_of(env, then)?;
                let b = self.type_of(env, els)?;
                if self.ty_subtype(&a, &b) {
                    Ok(b)
                } else if self.ty_subtype(&b, &a) {
                    Ok(a)
                } else {
                    Err(TypeError::new("t-if", format!("branches have unrelated types {a} and {b}"), span))
                }
            }
            ExprKind::Seq(a, b) => {
                self.type_of(env, a)?;
                self.type_of(env, b)
            }
            ExprKind::Panic => Ok(Ty::Bottom),
        }
    }

    fn check_struct(&self, s: &StructDecl) -> TResult<()> {
        if let Some(f) = first_duplicate(s.fields.iter().map(|f| &*f.name)) {
            return Err(TypeError::new("t-type", format!("duplicate field {f} in {}", s.name), s.span));
        }
        for f in &s.fields {
            self.declared(&f.ty, s.span)?;
        }
        Ok(())
    }

    fn check_interface(&self, i: &InterfaceDecl) -> TResult<()> {
        for (k, s) in i.specs.iter().enumerate() {
            if let Some(other) = i.specs[..k].iter().find(|o| o.name == s.name) {
                if !other.same_signature(s) {
                    return Err(TypeError::new(
                        "t-type",
                        format!("conflicting specifications for {} in {}", s.name, i.name),
                        i.span,
                    ));
                }
            }
            if let Some(x) = first_duplicate(s.params.iter().map(|p| &*p.name)) {
                return Err(TypeError::new(
                    "t-specification",
                    format!("duplicate parameter {x} in {}", s.name),
                    i.span,
                ));
            }
            for p in &s.params {
                self.declared(&p.ty, i.span)?;
            }
            self.declared(&s.ret, i.span)?;
        }
        Ok(())
    }

    fn check_method(&self, m: &MethodDecl) -> TResult<()> {
        if !self.table.is_struct(&m.recv.ty) {
            return Err(TypeError::new("t-func", format!("receiver type {} is not a struct type", m.recv.ty), m.span));
        }
        let names = std::iter::once(&*m.recv.name).chain(m.params.iter().map(|p| &*p.name));
        if let Some(x) = first_duplicate(names) {
            return Err(TypeError::new(
                "t-func",
                format!("duplicate parameter {x} in {}.{}", m.recv.ty, m.name),
                m.span,
            ));
        }
        let mut env = Env::new();
        env.insert(m.recv.name.clone(), m.recv.ty.clone());
        for p in &m.params {
            self.declared(&p.ty, m.span)?;
            env.insert(p.name.clone(), p.ty.clone());
        }
        self.declared(&m.ret, m.span)?;
        let t = self.type_of(&env, &m.body)?;
        if !self.ty_subtype(&t, &Ty::Named(m.ret.clone())) {
            return Err(TypeError::new(
                "t-func",
                format!("body of {}.{} has type {t}, which does not implement {}", m.recv.ty, m.name, m.ret),
                m.body.span,
            ));
        }
        Ok(())
    }
}

pub fn binop_result(op: BinOp) -> &'static str {
    if op.is_comparison() {
        BOOL
    } else {
        INT
    }
}

/// Checks a whole program; on success returns the type of `main`.
pub fn check_program(p: &Program, dialect: Dialect) -> Result<Ty, Vec<Diagnostic>> {
    let mut errs: Vec<TypeError> = Vec::new();
    if dialect == Dialect::Core {
        for e in p.methods().map(|m| &m.body).chain([&p.main]) {
            if let Some(c) = e.extended_construct() {
                errs.push(TypeError::new("t-prog", format!("{c} is only allowed in the extended FG dialect"), e.span));
            }
        }
    }
    let mut seen_types = std::collections::HashSet::new();
    let mut seen_methods = std::collections::HashSet::new();
    for d in &p.decls {
        match d {
            Decl::Struct(StructDecl { name, span, .. }) | Decl::Interface(InterfaceDecl { name, span, .. }) => {
                if crate::ast::is_builtin_type(name) || !seen_types.insert(name.clone()) {
                    errs.push(TypeError::new("t-prog", format!("duplicate type declaration {name}"), *span));
                }
            }
            Decl::Method(m) => {
                if !seen_methods.insert((m.recv.ty.clone(), m.name.clone())) {
                    errs.push(TypeError::new(
                        "t-prog",
                        format!("duplicate method declaration {}.{}", m.recv.ty, m.name),
                        m.span,
                    ));
                }
            }
        }
    }
    let ck = Checker::new(p);
    for d in &p.decls {
        let r = match d {
            Decl::Struct(s) => ck.check_struct(s),
            Decl::Interface(i) => ck.check_interface(i),
            Decl::Method(m) => ck.check_method(m),
        };
        if let Err(e) = r {
            errs.push(e);
        }
    }
    let main = ck.type_of(&Env::new(), &p.main);
    match (main, errs.is_empty()) {
        (Ok(t), true) => Ok(t),
        (r, _) => {
            if let Err(e) = r {
                errs.push(e);
            }
            Err(errs.into_iter().map(Diagnostic::from).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_fg;

    const LIST: &str = include_str!("../../tests/fixtures/fg_list.fg");

    fn prog(src: &str) -> Program {
        parse_fg(src, Dialect::Extended).unwrap()
    }

    #[test]
    fn fg_list_typechecks() {
        let p = parse_fg(LIST, Dialect::Core).unwrap();
        assert_eq!(check_program(&p, Dialect::Core), Ok(Ty::named("List")));
    }

    #[test]
    fn gtfunc_implements_function() {
        let p = parse_fg(LIST, Dialect::Core).unwrap();
        let ck = Checker::new(&p);
        assert!(ck.subtype("GtFunc", "Function"));
        assert!(ck.subtype("int", "Ord"));
        assert!(ck.subtype("Nil", "Nil"));
        assert!(!ck.subtype("Nil", "Cons"));
        assert!(!ck.subtype("bool", "Ord"));
    }

    #[test]
    fn literal_arity_is_checked() {
        let p = prog("package main\ntype A struct { f A }\nfunc main() { _ = A{} }");
        let d = check_program(&p, Dialect::Extended).unwrap_err();
        assert!(d[0].message.starts_with("t-literal"), "{}", d[0].message);
    }

    #[test]
    fn duplicate_type_declaration() {
        let p = prog("package main\ntype Nil struct {}\ntype Nil struct {}\nfunc main() { _ = Nil{} }");
        let d = check_program(&p, Dialect::Extended).unwrap_err();
        assert!(d[0].message.contains("duplicate type declaration"));
    }

    #[test]
    fn extended_forms() {
        let src = "package main\n\
            type A struct {}\n\
            func (x A) m(y A) A { if (x != y) { panic }; return x }\n\
            func (x A) n() int { x.m(x); return 5 - 2 }\n\
            func (x A) b() bool { return if (1 < 2) { return true } else { panic } }\n\
            func main() { _ = A{}.n() }";
        assert_eq!(check_program(&prog(src), Dialect::Extended), Ok(Ty::named("int")));
        assert!(check_program(&prog(src), Dialect::Core).is_err());
    }

    #[test]
    fn impossible_struct_assertion_is_rejected_but_stupid_is_not() {
        let src = "package main\n\
            type I interface { m() I }\n\
            type A struct {}\n\
            type B struct {}\n\
            func (x A) m() I { return x }\n\
            func main() { _ = A{}.m().(B) }";
        let d = check_program(&prog(src), Dialect::Extended).unwrap_err();
        assert!(d[0].message.starts_with("t-assert"));
        let stupid = src.replace("A{}.m().(B)", "A{}.(B)");
        assert!(check_program(&prog(&stupid), Dialect::Extended).is_ok());
    }
}
