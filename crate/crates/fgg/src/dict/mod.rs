//! Dictionary-passing translation from FGG to extended FG.
//!
//! Type parameters become dictionary arguments: a struct stores one
//! dictionary per type parameter, a method takes one per method type
//! parameter. Dictionaries hold method pointers (one `Func_n` per method of
//! the bound) and a type-rep used to simulate type assertions.

pub mod names;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::ast::fg::{self, Origin};
use crate::ast::fgg::{self, bind, Decl, FormalEntry, Sig, Type};
use crate::ast::{name, Name, Span, BOOL, INT};
use crate::typecheck::fg::binop_result;
use crate::typecheck::fgg::{Checker, TypeEnv, VarEnv};
use crate::typecheck::TypeError;
use names::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Leave out `.(t)` when the operand is already statically `t`.
    pub skip_redundant_asserts: bool,
    /// Emit no type-reps. Only allowed for programs without assertions.
    pub no_type_metadata: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error(transparent)]
    Collision(#[from] Collision),
    #[error("type assertions need type metadata")]
    AssertionsWithoutMetadata,
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("internal translation error: {0}")]
    Internal(String),
}

type TResult<T> = Result<T, TranslateError>;

fn internal<T>(msg: impl Into<String>) -> TResult<T> {
    Err(TranslateError::Internal(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclKind {
    Interface,
    Struct,
    Method,
}

/// What an emitted declaration is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Top,
    TypeMetadata,
    FunctionInterface,
    SignatureMetadata,
    ParamIndex,
    BuiltinMetadata,
    /// A source declaration with its types erased.
    Erased,
    Dictionary,
    Metadata,
    TryCast,
    SpecMethod,
    MethodPointer,
    Apply,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InventoryEntry {
    pub name: String,
    pub kind: DeclKind,
    pub role: Role,
}

#[derive(Clone, Debug)]
pub struct Translation {
    pub program: fg::Program,
    pub names: NameMangler,
    pub inventory: Vec<InventoryEntry>,
}

pub fn translate(p: &fgg::Program, opts: Options) -> TResult<Translation> {
    DictTranslator::new(p, opts)?.program()
}

/// Typing context of the expression being translated, plus how each type
/// parameter's dictionary is reached.
#[derive(Default)]
struct Scope {
    delta: TypeEnv,
    gamma: VarEnv,
    eta: HashMap<Name, fg::Expr>,
    /// FG static types of the variables, for `skip_redundant_asserts`.
    vars: HashMap<Name, Name>,
}

#[derive(Default)]
struct Emitter {
    decls: Vec<fg::Decl>,
    inventory: Vec<InventoryEntry>,
}

impl Emitter {
    fn note(&mut self, name: String, kind: DeclKind, role: Role) {
        self.inventory.push(InventoryEntry { name, kind, role });
    }

    fn interface(&mut self, name: Name, specs: Vec<fg::Spec>, role: Role, span: Span) {
        self.note(name.to_string(), DeclKind::Interface, role);
        self.decls.push(fg::Decl::Interface(fg::InterfaceDecl { name, specs, span }));
    }

    fn strukt(&mut self, name: Name, fields: Vec<fg::Field>, role: Role, span: Span) {
        self.note(name.to_string(), DeclKind::Struct, role);
        self.decls.push(fg::Decl::Struct(fg::StructDecl { name, fields, span }));
    }

    fn method(&mut self, m: fg::MethodDecl, role: Role) {
        self.note(format!("{}.{}", m.recv.ty, m.name), DeclKind::Method, role);
        self.decls.push(fg::Decl::Method(m));
    }
}

fn param(x: &str, t: &str) -> fg::Param {
    fg::Param { name: name(x), ty: name(t) }
}

fn any_params(xs: impl IntoIterator<Item = Name>) -> Vec<fg::Param> {
    xs.into_iter().map(|x| fg::Param { name: x, ty: name(ANY) }).collect()
}

fn tag_all(e: &mut fg::Expr, o: Origin) {
    e.origin = o;
    for i in 0..e.children().len() {
        tag_all(e.child_mut(i), o);
    }
}

fn bound_head(b: &Type) -> TResult<&Name> {
    match b {
        Type::Named(u, _) => Ok(u),
        Type::Param(a) => internal(format!("bound {a} is a type parameter")),
    }
}

/// `func (this meta) tryCast(x Any) Any { return body }`, all of it
/// simulation code.
fn try_cast(meta: &Name, mut body: fg::Expr, span: Span) -> fg::MethodDecl {
    tag_all(&mut body, Origin::Sim);
    fg::MethodDecl {
        recv: fg::Param { name: name("this"), ty: meta.clone() },
        name: name(TRY_CAST),
        params: vec![param("x", ANY)],
        ret: name(ANY),
        body,
        span,
    }
}

/// The FG type an expression certainly has, when that is cheap to see.
fn fg_static(vars: &HashMap<Name, Name>, e: &fg::Expr) -> Option<Name> {
    match &e.kind {
        fg::ExprKind::Var(x) => vars.get(x).cloned(),
        fg::ExprKind::Lit { ty, .. } | fg::ExprKind::Assert { ty, .. } => Some(ty.clone()),
        fg::ExprKind::Int(_) => Some(name(INT)),
        fg::ExprKind::Bool(_) => Some(name(BOOL)),
        fg::ExprKind::BinOp { op, .. } => Some(name(binop_result(*op))),
        _ => None,
    }
}

pub struct DictTranslator<'p> {
    src: &'p fgg::Program,
    ck: Checker<'p>,
    opts: Options,
    names: NameMangler,
}

impl<'p> DictTranslator<'p> {
    pub fn new(p: &'p fgg::Program, opts: Options) -> TResult<Self> {
        if opts.no_type_metadata && p.has_assertions() {
            return Err(TranslateError::AssertionsWithoutMetadata);
        }
        let names = NameMangler::for_program(p, !opts.no_type_metadata)?;
        Ok(DictTranslator { src: p, ck: Checker::new(p), opts, names })
    }

    pub fn names(&self) -> &NameMangler {
        &self.names
    }

    fn metadata(&self) -> bool {
        !self.opts.no_type_metadata
    }

    pub fn program(&self) -> TResult<Translation> {
        let mut out = Emitter::default();
        self.prelude(&mut out);
        for d in &self.src.decls {
            match d {
                Decl::Interface(i) => self.interface(i, &mut out)?,
                Decl::Struct(s) => self.strukt(s, &mut out)?,
                Decl::Method(m) => self.method(m, &mut out)?,
            }
        }
        let main = self.closed(&self.src.main)?;
        Ok(Translation {
            program: fg::Program { decls: out.decls, main },
            names: self.names.clone(),
            inventory: out.inventory,
        })
    }

    /// Translates a closed FGG term, such as a reduct of `main`.
    pub fn closed(&self, e: &fgg::Expr) -> TResult<fg::Expr> {
        self.expr(&Scope::default(), e)
    }

    pub fn value(&self, v: &fgg::Value) -> fg::Value {
        let e = self.closed(&v.to_expr()).expect("values of the program translate");
        fg::Value::from_expr(&e).expect("translated values are values")
    }

    fn prelude(&self, out: &mut Emitter) {
        let span = Span::default();
        let declares_any = self.src.decls.iter().any(|d| matches!(d, Decl::Interface(i) if i.name.as_ref() == ANY));
        if !declares_any {
            out.interface(name(ANY), vec![], Role::Top, span);
        }
        let (arities, max_formal) = names::arities(self.src);
        if self.metadata() {
            let spec = fg::Spec { name: name(TRY_CAST), params: vec![param("x", ANY)], ret: name(ANY) };
            out.interface(name(TYPE_MDATA), vec![spec], Role::TypeMetadata, span);
        }
        for &n in &arities {
            let spec = fg::Spec {
                name: name(APPLY),
                params: any_params(std::iter::once(name(REC)).chain((0..n).map(|i| name(&format!("x_{i}"))))),
                ret: name(ANY),
            };
            out.interface(func(n), vec![spec], Role::FunctionInterface, span);
        }
        if !self.metadata() {
            return;
        }
        for &n in &arities {
            let fields = (0..=n).map(|i| fg::Field { name: type_field(i), ty: name(TYPE_MDATA) }).collect();
            out.strukt(sig_meta(n + 1), fields, Role::SignatureMetadata, span);
        }
        for i in 0..max_formal {
            out.strukt(param_index(i), vec![], Role::ParamIndex, span);
            out.method(try_cast(&param_index(i), fg::Expr::var("x"), span), Role::TryCast);
        }
        for b in [INT, BOOL] {
            let meta = meta_name(b);
            out.strukt(meta.clone(), vec![], Role::BuiltinMetadata, span);
            let body = fg::Expr::seq(fg::Expr::assert(fg::Expr::var("x"), b), fg::Expr::var("x"));
            out.method(try_cast(&meta, body, span), Role::TryCast);
        }
    }

    /// Parameters of a translated method: dictionaries, then values.
    fn method_params(&self, sig: &Sig) -> TResult<Vec<fg::Param>> {
        let mut ps = Vec::new();
        for (j, f) in sig.formal.iter().enumerate() {
            ps.push(fg::Param { name: dict_var(j), ty: dict_name(bound_head(&f.bound)?) });
        }
        ps.extend(any_params(sig.params.iter().map(|p| p.name.clone())));
        Ok(ps)
    }

    fn interface(&self, i: &fgg::InterfaceDecl, out: &mut Emitter) -> TResult<()> {
        let mut seen = HashSet::new();
        let specs: Vec<&fgg::Spec> = i.specs.iter().filter(|s| seen.insert(s.name.clone())).collect();

        let mut fg_specs = Vec::new();
        for s in &specs {
            fg_specs.push(fg::Spec { name: s.name.clone(), params: self.method_params(&s.sig)?, ret: name(ANY) });
        }
        if self.metadata() {
            for s in &specs {
                let k = s.sig.formal.len() + s.sig.params.len() + 1;
                fg_specs.push(fg::Spec { name: spec_name(&s.name), params: vec![], ret: sig_meta(k) });
            }
        }
        out.interface(i.name.clone(), fg_specs, Role::Erased, i.span);

        let mut fields: Vec<fg::Field> = specs
            .iter()
            .map(|s| fg::Field { name: s.name.clone(), ty: func(s.sig.formal.len() + s.sig.params.len()) })
            .collect();
        if self.metadata() {
            fields.push(fg::Field { name: name(TYPE_FIELD), ty: name(TYPE_MDATA) });
        }
        out.strukt(dict_name(&i.name), fields, Role::Dictionary, i.span);

        if self.metadata() {
            let meta = meta_name(&i.name);
            out.strukt(meta.clone(), self.meta_fields(&i.formal), Role::Metadata, i.span);
            // A value passes if each spec_m() matches the instantiated signature.
            let zeta = |a: &Name| self.own_type_field(&i.formal, a);
            let mut body = fg::Expr::var("x");
            for s in specs.iter().rev() {
                let have = fg::Expr::call(fg::Expr::assert(fg::Expr::var("x"), &i.name), &spec_name(&s.name), vec![]);
                body = fg::Expr::if_neq(have, self.sig_meta_expr(&s.sig, &zeta)?, fg::Expr::panic(), body);
            }
            out.method(try_cast(&meta, body, i.span), Role::TryCast);
        }
        for s in &specs {
            self.method_ptr(&i.name, &s.name, &s.sig, i.span, out)?;
        }
        Ok(())
    }

    fn meta_fields(&self, formal: &[FormalEntry]) -> Vec<fg::Field> {
        (0..formal.len()).map(|i| fg::Field { name: type_field(i), ty: name(TYPE_MDATA) }).collect()
    }

    /// `this._type_i` for the i-th parameter of a type's own formal.
    fn own_type_field(&self, formal: &[FormalEntry], a: &Name) -> TResult<fg::Expr> {
        match formal.iter().position(|f| f.param == *a) {
            Some(i) => Ok(fg::Expr::select(fg::Expr::var("this"), &type_field(i))),
            None => internal(format!("type parameter {a} is not in scope")),
        }
    }

    fn strukt(&self, s: &fgg::StructDecl, out: &mut Emitter) -> TResult<()> {
        let mut fields: Vec<fg::Field> =
            s.fields.iter().map(|f| fg::Field { name: f.name.clone(), ty: name(ANY) }).collect();
        for (i, f) in s.formal.iter().enumerate() {
            fields.push(fg::Field { name: dict_var(i), ty: dict_name(bound_head(&f.bound)?) });
        }
        out.strukt(s.name.clone(), fields, Role::Erased, s.span);

        if self.metadata() {
            let meta = meta_name(&s.name);
            out.strukt(meta.clone(), self.meta_fields(&s.formal), Role::Metadata, s.span);
            let x_t = || fg::Expr::assert(fg::Expr::var("x"), &s.name);
            let mut body = fg::Expr::var("x");
            for i in (0..s.formal.len()).rev() {
                let mine = fg::Expr::select(fg::Expr::var("this"), &type_field(i));
                let theirs = fg::Expr::select(fg::Expr::select(x_t(), &dict_var(i)), TYPE_FIELD);
                body = fg::Expr::if_neq(mine, theirs, fg::Expr::panic(), body);
            }
            out.method(try_cast(&meta, fg::Expr::seq(x_t(), body), s.span), Role::TryCast);
        }
        Ok(())
    }

    fn method(&self, m: &fgg::MethodDecl, out: &mut Emitter) -> TResult<()> {
        let recv_formal = self
            .ck
            .receiver_formal(m)
            .ok_or_else(|| TranslateError::Internal(format!("bad receiver for {}.{}", m.recv_type, m.name)))?;
        let mut sc =
            Scope { delta: TypeEnv::default().extended(&recv_formal).extended(&m.sig.formal), ..Scope::default() };
        sc.gamma.insert(m.recv.clone(), m.recv_ty());
        sc.vars.insert(m.recv.clone(), m.recv_type.clone());
        for p in &m.sig.params {
            sc.gamma.insert(p.name.clone(), p.ty.clone());
            sc.vars.insert(p.name.clone(), name(ANY));
        }
        for (i, a) in m.recv_params.iter().enumerate() {
            let d = fg::Expr::select(fg::Expr::var(&m.recv), &dict_var(i)).tagged(Origin::Dict);
            sc.eta.insert(a.clone(), d);
        }
        for (j, f) in m.sig.formal.iter().enumerate() {
            sc.eta.insert(f.param.clone(), fg::Expr::var(&dict_var(j)));
            sc.vars.insert(dict_var(j), dict_name(bound_head(&f.bound)?));
        }

        let recv = fg::Param { name: m.recv.clone(), ty: m.recv_type.clone() };
        out.method(
            fg::MethodDecl {
                recv: recv.clone(),
                name: m.name.clone(),
                params: self.method_params(&m.sig)?,
                ret: name(ANY),
                body: self.expr(&sc, &m.body)?,
                span: m.span,
            },
            Role::Erased,
        );

        if self.metadata() {
            let zeta = |a: &Name| self.zeta(&sc, a);
            let mut body = self.sig_meta_expr(&m.sig, &zeta)?;
            tag_all(&mut body, Origin::Sim);
            let k = m.sig.formal.len() + m.sig.params.len() + 1;
            out.method(
                fg::MethodDecl { recv, name: spec_name(&m.name), params: vec![], ret: sig_meta(k), body, span: m.span },
                Role::SpecMethod,
            );
        }
        self.method_ptr(&m.recv_type, &m.name, &m.sig, m.span, out)
    }

    /// `type t_m struct {}` and its `Apply`, which unpacks the receiver and
    /// dictionaries and calls `m`.
    fn method_ptr(&self, t: &Name, m: &Name, sig: &Sig, span: Span, out: &mut Emitter) -> TResult<()> {
        let ptr = method_ptr(t, m);
        out.strukt(ptr.clone(), vec![], Role::MethodPointer, span);

        let mut this = String::from("this");
        while sig.params.iter().any(|p| *p.name == *this) {
            this.push('_');
        }
        let mut params = vec![param(REC, ANY)];
        let mut args = Vec::new();
        for (j, f) in sig.formal.iter().enumerate() {
            params.push(fg::Param { name: dict_var(j), ty: name(ANY) });
            let u = dict_name(bound_head(&f.bound)?);
            args.push(fg::Expr::assert(fg::Expr::var(&dict_var(j)), &u).tagged(Origin::Dict));
        }
        for p in &sig.params {
            params.push(fg::Param { name: p.name.clone(), ty: name(ANY) });
            args.push(fg::Expr::var(&p.name));
        }
        let recv = fg::Expr::assert(fg::Expr::var(REC), t).tagged(Origin::Erase);
        out.method(
            fg::MethodDecl {
                recv: fg::Param { name: name(&this), ty: ptr },
                name: name(APPLY),
                params,
                ret: name(ANY),
                body: fg::Expr::call(recv, m, args),
                span,
            },
            Role::Apply,
        );
        Ok(())
    }

    fn type_of(&self, sc: &Scope, e: &fgg::Expr) -> TResult<Type> {
        Ok(self.ck.type_of(&sc.delta, &sc.gamma, e)?)
    }

    fn eta(&self, sc: &Scope, a: &Name) -> TResult<fg::Expr> {
        match sc.eta.get(a) {
            Some(d) => Ok(d.clone()),
            None => internal(format!("no dictionary for type parameter {a}")),
        }
    }

    fn zeta(&self, sc: &Scope, a: &Name) -> TResult<fg::Expr> {
        Ok(fg::Expr::select(self.eta(sc, a)?, TYPE_FIELD).tagged(Origin::Dict))
    }

    /// `e.(t)` recovering a static type; skipped when already evident.
    fn erase_assert(&self, sc: &Scope, e: fg::Expr, t: &str, span: Span) -> fg::Expr {
        if self.opts.skip_redundant_asserts && fg_static(&sc.vars, &e).is_some_and(|s| *s == *t) {
            return e;
        }
        fg::Expr::assert(e, t).at(span).tagged(Origin::Erase)
    }

    fn expr(&self, sc: &Scope, e: &fgg::Expr) -> TResult<fg::Expr> {
        use fgg::ExprKind as K;
        let span = e.span;
        let out = match &e.kind {
            K::Var(x) => fg::Expr::var(x),
            K::Int(n) => fg::Expr::new(fg::ExprKind::Int(*n)),
            K::Bool(b) => fg::Expr::new(fg::ExprKind::Bool(*b)),
            K::BinOp { op, lhs, rhs } => {
                let l = self.expr(sc, lhs)?;
                let r = self.expr(sc, rhs)?;
                fg::Expr::binop(*op, self.erase_assert(sc, l, INT, lhs.span), self.erase_assert(sc, r, INT, rhs.span))
            }
            K::If { cond, then, els } => {
                let c = self.expr(sc, cond)?;
                fg::Expr::if_bool(self.erase_assert(sc, c, BOOL, cond.span), self.expr(sc, then)?, self.expr(sc, els)?)
            }
            K::Select { recv, field } => {
                let rt = self.type_of(sc, recv)?;
                let r = self.expr(sc, recv)?;
                fg::Expr::select(self.erase_assert(sc, r, rt.head(), recv.span), field)
            }
            K::Lit { ty, targs, args } => {
                let mut out = Vec::with_capacity(args.len() + targs.len());
                for a in args {
                    out.push(self.expr(sc, a)?);
                }
                let Some(formal) = self.ck.table.formal(ty) else {
                    return internal(format!("unknown type {ty}"));
                };
                out.extend(self.dicts(sc, formal, targs)?);
                fg::Expr::new(fg::ExprKind::Lit { ty: ty.clone(), args: out })
            }
            K::Assert { recv, ty } => {
                let r = self.expr(sc, recv)?;
                let rep = self.typemeta(ty, &|a| self.zeta(sc, a))?;
                fg::Expr::call(rep, TRY_CAST, vec![r])
            }
            K::Call { recv, method, targs, args } => {
                let rt = self.type_of(sc, recv)?;
                let Some(spec) = self.ck.methods(&rt, &sc.delta).into_iter().find(|s| s.name == *method) else {
                    return internal(format!("{rt} has no method {method}"));
                };
                let r = self.expr(sc, recv)?;
                let mut all = self.dicts(sc, &spec.sig.formal, targs)?;
                for a in args {
                    all.push(self.expr(sc, a)?);
                }
                match &rt {
                    Type::Param(a) => {
                        let f = fg::Expr::select(self.eta(sc, a)?, method).tagged(Origin::Dict);
                        let mut xs = vec![r];
                        xs.extend(all);
                        fg::Expr::call(f, APPLY, xs).tagged(Origin::Dict)
                    }
                    Type::Named(t, _) => fg::Expr::call(self.erase_assert(sc, r, t, recv.span), method, all),
                }
            }
        };
        Ok(out.at(span))
    }

    /// One dictionary per formal entry, for the given actuals.
    fn dicts(&self, sc: &Scope, formal: &[FormalEntry], actuals: &[Type]) -> TResult<Vec<fg::Expr>> {
        if formal.len() != actuals.len() {
            return internal("type argument count mismatch");
        }
        let map = bind(formal, actuals);
        formal.iter().zip(actuals).map(|(f, a)| self.make_dict(sc, a, &f.bound.subst(&map))).collect()
    }

    /// Method names of an interface's dictionary, in declaration order.
    fn dict_methods(&self, iface: &Name) -> TResult<Vec<Name>> {
        match self.ck.table.types.get(iface) {
            Some(fgg::TypeDef::Interface(i)) => {
                let mut seen = HashSet::new();
                Ok(i.specs.iter().map(|s| s.name.clone()).filter(|m| seen.insert(m.clone())).collect())
            }
            _ => internal(format!("bound {iface} is not an interface")),
        }
    }

    /// The dictionary witnessing that `tau` implements `bound`.
    fn make_dict(&self, sc: &Scope, tau: &Type, bound: &Type) -> TResult<fg::Expr> {
        let u = bound_head(bound)?;
        if !self.ck.subtype(tau, bound, &sc.delta) {
            return internal(format!("{tau} does not implement {bound}"));
        }
        let methods = self.dict_methods(u)?;
        let mut fields = Vec::with_capacity(methods.len() + 1);
        match tau {
            Type::Param(a) => {
                let d = self.eta(sc, a)?;
                if sc.delta.bound(a) == Some(bound) {
                    return Ok(d);
                }
                for m in &methods {
                    fields.push(fg::Expr::select(d.clone(), m).tagged(Origin::Dict));
                }
                if self.metadata() {
                    fields.push(fg::Expr::select(d, TYPE_FIELD).tagged(Origin::Dict));
                }
            }
            Type::Named(t, _) => {
                for m in &methods {
                    fields.push(fg::Expr::lit(&method_ptr(t, m), vec![]).tagged(Origin::Dict));
                }
                if self.metadata() {
                    fields.push(self.typemeta(tau, &|a| self.zeta(sc, a))?);
                }
            }
        }
        Ok(fg::Expr::lit(&dict_name(u), fields).tagged(Origin::Dict))
    }

    /// The type-rep of `ty`; type parameters are resolved by `zeta`.
    fn typemeta(&self, ty: &Type, zeta: &dyn Fn(&Name) -> TResult<fg::Expr>) -> TResult<fg::Expr> {
        match ty {
            Type::Param(a) => zeta(a),
            Type::Named(t, args) => {
                let args = args.iter().map(|a| self.typemeta(a, zeta)).collect::<TResult<_>>()?;
                Ok(fg::Expr::lit(&meta_name(t), args))
            }
        }
    }

    /// The type-rep of a method signature: bounds, parameter types, result.
    /// The method's own type parameters become positional indices.
    fn sig_meta_expr(&self, sig: &Sig, zeta: &dyn Fn(&Name) -> TResult<fg::Expr>) -> TResult<fg::Expr> {
        let inner = |a: &Name| match sig.formal.iter().position(|f| f.param == *a) {
            Some(i) => Ok(fg::Expr::lit(&param_index(i), vec![])),
            None => zeta(a),
        };
        let tys = sig.formal.iter().map(|f| &f.bound).chain(sig.params.iter().map(|p| &p.ty)).chain([&sig.ret]);
        let entries: Vec<fg::Expr> = tys.map(|t| self.typemeta(t, &inner)).collect::<TResult<_>>()?;
        Ok(fg::Expr::lit(&sig_meta(entries.len()), entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::fgg::Value;
    use crate::parser::{parse_fg, parse_fgg, Dialect};
    use crate::reduce::{fg as fgr, fgg as fggr, Outcome};
    use crate::typecheck::fg::check_program;

    const LIST: &str = include_str!("../../tests/corpus/list.fgg");

    fn translated(src: &str, opts: Options) -> (fgg::Program, Translation) {
        let p = parse_fgg(src).unwrap();
        let t = translate(&p, opts).unwrap();
        (p, t)
    }

    /// Translation typechecks, reparses to itself, and preserves the value.
    fn preserves_value(src: &str, opts: Options) {
        let (p, t) = translated(src, opts);
        let printed = t.program.to_string();
        if let Err(ds) = check_program(&t.program, Dialect::Extended) {
            panic!("{ds:?}\n{printed}");
        }
        assert_eq!(parse_fg(&printed, Dialect::Extended).unwrap(), t.program);
        let src_run = fggr::run_program(&p, 100_000);
        let fg_run = fgr::run_program(&t.program, 1_000_000);
        let want = src_run.outcome.value().expect("source reduces to a value");
        let tr = DictTranslator::new(&p, opts).unwrap();
        assert_eq!(fg_run.outcome, Outcome::Value { value: tr.value(want) });
    }

    fn with_main(decls: &str, main: &str) -> String {
        format!("package main\n{decls}\nfunc main() {{ _ = {main} }}")
    }

    const BOX: &str = "type Any interface {}\n\
        type Box[α Any] struct { value α }\n\
        func (b Box[α]) Nest(n int) Any {\n\
          if (n > 0) { return Box[Box[α]]{b}.Nest(n-1) } else { return b }\n\
        }";

    const FOO: &str = "type Any interface {}\n\
        type Foo[α Any] interface { do(x α) α }\n\
        type Bar struct {}\n\
        func (b Bar) do(x int) int { return x }";

    #[test]
    fn list_preserves_value() {
        preserves_value(LIST, Options::default());
        preserves_value(LIST, Options { skip_redundant_asserts: true, no_type_metadata: false });
        preserves_value(LIST, Options { skip_redundant_asserts: false, no_type_metadata: true });
    }

    #[test]
    fn box_nest_preserves_value() {
        for k in 0..4 {
            preserves_value(&with_main(BOX, &format!("Box[int]{{0}}.Nest({k})")), Options::default());
        }
    }

    #[test]
    fn typerep_assertion_passes_and_fails_like_the_source() {
        preserves_value(&with_main(FOO, "Bar{}.(Foo[int])"), Options::default());
        let (p, t) = translated(&with_main(FOO, "Bar{}.(Foo[bool])"), Options::default());
        assert!(fggr::run_program(&p, 1000).outcome.is_panic());
        assert!(fgr::run_program(&t.program, 10_000).outcome.is_panic());
    }

    #[test]
    fn interface_type_rep_compares_signatures() {
        let (_, t) = translated(&with_main(FOO, "Bar{}.(Foo[int])"), Options::default());
        let out = t.program.to_string();
        assert!(out.contains("type Foo interface {\n\tdo(x Any) Any\n\tspec_do() spec_metadata_2\n}"), "{out}");
        assert!(out.contains(
            "func (this Foo_meta) tryCast(x Any) Any {\n\tif (x.(Foo).spec_do() != spec_metadata_2{this._type_0, this._type_0}) { panic }\n\treturn x\n}"
        ), "{out}");
        assert!(
            out.contains(
                "func (b Bar) spec_do() spec_metadata_2 {\n\treturn spec_metadata_2{Int_meta{}, Int_meta{}}\n}"
            ),
            "{out}"
        );
        assert!(out.contains("_ = Foo_meta{Int_meta{}}.tryCast(Bar{})"), "{out}");
    }

    #[test]
    fn method_pointer_and_dictionary_shapes() {
        let (_, t) = translated(LIST, Options::default());
        let out = t.program.to_string();
        assert!(out.contains("type OrdDict struct {\n\tGt Func_1\n\t_type _type_mdata\n}"), "{out}");
        assert!(out.contains("type int_Gt struct {}"), "{out}");
        assert!(out.contains("func (this int_Gt) Apply(rec Any, x Any) Any {\n\treturn rec.(int).Gt(x)\n}"), "{out}");
        let kinds: Vec<_> =
            t.inventory.iter().filter(|e| e.role == Role::Dictionary).map(|e| e.name.as_str()).collect();
        assert!(kinds.contains(&"OrdDict") && kinds.contains(&"FunctionDict"), "{kinds:?}");
    }

    #[test]
    fn no_metadata_refuses_assertions() {
        let p = parse_fgg(&with_main(FOO, "Bar{}.(Foo[int])")).unwrap();
        let opts = Options { no_type_metadata: true, ..Options::default() };
        assert!(matches!(translate(&p, opts), Err(TranslateError::AssertionsWithoutMetadata)));
    }

    #[test]
    fn skipping_redundant_asserts_shrinks_output() {
        let (_, a) = translated(LIST, Options::default());
        let (_, b) = translated(LIST, Options { skip_redundant_asserts: true, ..Options::default() });
        assert!(b.program.node_count() < a.program.node_count());
    }

    #[test]
    fn values_translate_with_dictionaries() {
        let p = parse_fgg(&with_main(BOX, "Box[int]{0}")).unwrap();
        let tr = DictTranslator::new(&p, Options::default()).unwrap();
        let v = Value::Struct(name("Box"), vec![Type::int()], vec![Value::Int(0)]);
        assert_eq!(tr.value(&v).to_string(), "Box{0, AnyDict{Int_meta{}}}");
    }
}
