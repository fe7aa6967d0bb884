//! Erasure translation: every type becomes its head with type arguments
//! dropped, values of parametric type become `Any`, and assertions are
//! inserted where the target needs a more precise static type.
//!
//! This is not semantics preserving when the program asserts to a generic
//! type: `e.(Foo[bool])` becomes `e.(Foo)`, which no longer checks the
//! type argument.

use std::collections::HashMap;

use crate::ast::fg::{self, Origin};
use crate::ast::fgg::{self, Decl, Type};
use crate::ast::{name, Name, BOOL, INT};
use crate::dict::names::ANY;
use crate::typecheck::fg::binop_result;
use crate::typecheck::fgg::{Checker, TypeEnv, VarEnv};
use crate::typecheck::TypeError;

#[derive(Debug, thiserror::Error)]
pub enum EraseError {
    #[error("Any must be the empty, non-generic interface")]
    BadAny,
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("internal translation error: {0}")]
    Internal(String),
}

type EResult<T> = Result<T, EraseError>;

#[derive(Default)]
struct Scope {
    delta: TypeEnv,
    gamma: VarEnv,
    vars: HashMap<Name, Name>,
}

pub struct Eraser<'p> {
    src: &'p fgg::Program,
    ck: Checker<'p>,
}

pub fn erase(p: &fgg::Program) -> EResult<fg::Program> {
    Eraser::new(p)?.program()
}

fn any_params(ps: &[fgg::Param]) -> Vec<fg::Param> {
    ps.iter().map(|p| fg::Param { name: p.name.clone(), ty: name(ANY) }).collect()
}

impl<'p> Eraser<'p> {
    pub fn new(p: &'p fgg::Program) -> EResult<Self> {
        let bad_any = p.decls.iter().any(|d| {
            matches!(d, Decl::Interface(i)
                if i.name.as_ref() == ANY && !(i.formal.is_empty() && i.specs.is_empty()))
        });
        if bad_any {
            return Err(EraseError::BadAny);
        }
        Ok(Eraser { src: p, ck: Checker::new(p) })
    }

    pub fn program(&self) -> EResult<fg::Program> {
        let mut decls = Vec::new();
        let declares_any = self.src.decls.iter().any(|d| matches!(d, Decl::Interface(i) if i.name.as_ref() == ANY));
        if !declares_any {
            decls.push(fg::Decl::Interface(fg::InterfaceDecl {
                name: name(ANY),
                specs: vec![],
                span: Default::default(),
            }));
        }
        for d in &self.src.decls {
            decls.push(match d {
                Decl::Interface(i) => fg::Decl::Interface(fg::InterfaceDecl {
                    name: i.name.clone(),
                    specs: i
                        .specs
                        .iter()
                        .map(|s| fg::Spec { name: s.name.clone(), params: any_params(&s.sig.params), ret: name(ANY) })
                        .collect(),
                    span: i.span,
                }),
                Decl::Struct(s) => fg::Decl::Struct(fg::StructDecl {
                    name: s.name.clone(),
                    fields: s.fields.iter().map(|f| fg::Field { name: f.name.clone(), ty: name(ANY) }).collect(),
                    span: s.span,
                }),
                Decl::Method(m) => fg::Decl::Method(self.method(m)?),
            });
        }
        let main = self.closed(&self.src.main)?;
        Ok(fg::Program { decls, main })
    }

    fn method(&self, m: &fgg::MethodDecl) -> EResult<fg::MethodDecl> {
        let recv_formal = self
            .ck
            .receiver_formal(m)
            .ok_or_else(|| EraseError::Internal(format!("bad receiver for {}.{}", m.recv_type, m.name)))?;
        let mut sc =
            Scope { delta: TypeEnv::default().extended(&recv_formal).extended(&m.sig.formal), ..Scope::default() };
        sc.gamma.insert(m.recv.clone(), m.recv_ty());
        sc.vars.insert(m.recv.clone(), m.recv_type.clone());
        for p in &m.sig.params {
            sc.gamma.insert(p.name.clone(), p.ty.clone());
            sc.vars.insert(p.name.clone(), name(ANY));
        }
        Ok(fg::MethodDecl {
            recv: fg::Param { name: m.recv.clone(), ty: m.recv_type.clone() },
            name: m.name.clone(),
            params: any_params(&m.sig.params),
            ret: name(ANY),
            body: self.expr(&sc, &m.body)?,
            span: m.span,
        })
    }

    pub fn closed(&self, e: &fgg::Expr) -> EResult<fg::Expr> {
        self.expr(&Scope::default(), e)
    }

    pub fn value(&self, v: &fgg::Value) -> fg::Value {
        match v {
            fgg::Value::Struct(t, _, args) => {
                fg::Value::Struct(t.clone(), args.iter().map(|a| self.value(a)).collect())
            }
            fgg::Value::Int(n) => fg::Value::Int(*n),
            fgg::Value::Bool(b) => fg::Value::Bool(*b),
        }
    }

    /// The struct or interface a value of type `ty` is asserted to before
    /// a field access or method call.
    fn head(&self, sc: &Scope, ty: &Type) -> EResult<Name> {
        match ty {
            Type::Named(t, _) => Ok(t.clone()),
            Type::Param(a) => match sc.delta.bound(a) {
                Some(b) => self.head(sc, b),
                None => Err(EraseError::Internal(format!("type parameter {a} is not in scope"))),
            },
        }
    }

    fn static_type(sc: &Scope, e: &fg::Expr) -> Option<Name> {
        match &e.kind {
            fg::ExprKind::Var(x) => sc.vars.get(x).cloned(),
            fg::ExprKind::Lit { ty, .. } | fg::ExprKind::Assert { ty, .. } => Some(ty.clone()),
            fg::ExprKind::Int(_) => Some(name(INT)),
            fg::ExprKind::Bool(_) => Some(name(BOOL)),
            fg::ExprKind::BinOp { op, .. } => Some(name(binop_result(*op))),
            _ => None,
        }
    }

    fn recover(&self, sc: &Scope, e: fg::Expr, t: &str) -> fg::Expr {
        if Self::static_type(sc, &e).is_some_and(|s| *s == *t) {
            return e;
        }
        let span = e.span;
        fg::Expr::assert(e, t).at(span).tagged(Origin::Erase)
    }

    fn expr(&self, sc: &Scope, e: &fgg::Expr) -> EResult<fg::Expr> {
        use fgg::ExprKind as K;
        let out = match &e.kind {
            K::Var(x) => fg::Expr::var(x),
            K::Int(n) => fg::Expr::new(fg::ExprKind::Int(*n)),
            K::Bool(b) => fg::Expr::new(fg::ExprKind::Bool(*b)),
            K::BinOp { op, lhs, rhs } => {
                let l = self.expr(sc, lhs)?;
                let r = self.expr(sc, rhs)?;
                fg::Expr::binop(*op, self.recover(sc, l, INT), self.recover(sc, r, INT))
            }
            K::If { cond, then, els } => {
                let c = self.expr(sc, cond)?;
                fg::Expr::if_bool(self.recover(sc, c, BOOL), self.expr(sc, then)?, self.expr(sc, els)?)
            }
            K::Select { recv, field } => {
                let t = self.head(sc, &self.ck.type_of(&sc.delta, &sc.gamma, recv)?)?;
                let r = self.expr(sc, recv)?;
                fg::Expr::select(self.recover(sc, r, &t), field)
            }
            K::Call { recv, method, args, .. } => {
                let t = self.head(sc, &self.ck.type_of(&sc.delta, &sc.gamma, recv)?)?;
                let r = self.expr(sc, recv)?;
                let args = args.iter().map(|a| self.expr(sc, a)).collect::<EResult<_>>()?;
                fg::Expr::call(self.recover(sc, r, &t), method, args)
            }
            K::Lit { ty, args, .. } => fg::Expr::new(fg::ExprKind::Lit {
                ty: ty.clone(),
                args: args.iter().map(|a| self.expr(sc, a)).collect::<EResult<_>>()?,
            }),
            K::Assert { recv, ty } => {
                let target = match ty {
                    Type::Named(t, _) => t.clone(),
                    Type::Param(_) => name(ANY),
                };
                fg::Expr::assert(self.expr(sc, recv)?, &target)
            }
        };
        Ok(out.at(e.span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_fg, parse_fgg, Dialect};
    use crate::reduce::{fg as fgr, fgg as fggr, Outcome};
    use crate::typecheck::fg::check_program;

    const LIST: &str = include_str!("../tests/corpus/list.fgg");
    const FOO: &str = "package main\n\
        type Any interface {}\n\
        type Foo[α Any] interface { do(x α) α }\n\
        type Bar struct {}\n\
        func (b Bar) do(x int) int { return x }\n";

    #[test]
    fn list_erases_and_preserves_value() {
        let p = parse_fgg(LIST).unwrap();
        let out = erase(&p).unwrap();
        check_program(&out, Dialect::Extended).unwrap();
        assert_eq!(parse_fg(&out.to_string(), Dialect::Extended).unwrap(), out);
        let want = fggr::run_program(&p, 100_000);
        let got = fgr::run_program(&out, 100_000);
        let e = Eraser::new(&p).unwrap();
        assert_eq!(got.outcome, Outcome::Value { value: e.value(want.outcome.value().unwrap()) });
    }

    #[test]
    fn generic_assertion_loses_its_argument() {
        let p = parse_fgg(&format!("{FOO}func main() {{ _ = Bar{{}}.(Foo[bool]) }}")).unwrap();
        assert!(fggr::run_program(&p, 100).outcome.is_panic());
        let out = erase(&p).unwrap();
        assert_eq!(out.main.to_string(), "Bar{}.(Foo)");
        assert!(fgr::run_program(&out, 100).outcome.is_value());
    }

    #[test]
    fn parameter_receivers_are_asserted_to_their_bound() {
        let p = parse_fgg(LIST).unwrap();
        let out = erase(&p).unwrap().to_string();
        assert!(out.contains("return this.val.(Ord).Gt(x)"), "{out}");
        assert!(out.contains("return Cons{f.(Function).Apply(this.head), this.tail.(List).Map(f)}"), "{out}");
    }
}
