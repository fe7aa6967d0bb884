use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use crate::ast::fgg::*;
use crate::ast::{is_builtin_type, Name, Span};
use crate::parser::Diagnostic;

use super::{first_duplicate, TResult, TypeError};

/// Δ: type parameters in scope with their bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv(pub Vec<(Name, Type)>);

impl TypeEnv {
    pub fn bound(&self, a: &str) -> Option<&Type> {
        self.0.iter().rev().find(|(b, _)| &**b == a).map(|(_, t)| t)
    }

    pub fn contains(&self, a: &str) -> bool {
        self.bound(a).is_some()
    }

    pub fn extended(&self, formal: &[FormalEntry]) -> TypeEnv {
        let mut d = self.clone();
        d.0.extend(formal.iter().map(|e| (e.param.clone(), e.bound.clone())));
        d
    }
}

/// Γ: variables in scope.
pub type VarEnv = HashMap<Name, Type>;

pub struct Checker<'p> {
    pub table: Table<'p>,
    /// Subtype goals currently being decided; meeting one again means a
    /// cycle through F-bounds, answered coinductively.
    in_progress: RefCell<Vec<(Type, Type)>>,
}

impl<'p> Checker<'p> {
    pub fn new(p: &'p Program) -> Self {
        Checker { table: Table::new(p), in_progress: RefCell::new(Vec::new()) }
    }

    /// methods_Δ(τ), with actuals substituted into every signature.
    pub fn methods(&self, ty: &Type, delta: &TypeEnv) -> Vec<Spec> {
        match ty {
            Type::Param(a) => match delta.bound(a) {
                Some(b) if !b.is_param() => self.methods(b, delta),
                _ => vec![],
            },
            Type::Named(t, actuals) => match self.table.types.get(t) {
                Some(TypeDef::Interface(i)) => {
                    let map = bind(&i.formal, actuals);
                    i.specs
                        .iter()
                        .map(|s| Spec { name: s.name.clone(), sig: s.sig.freshen(&map).subst(&map) })
                        .collect()
                }
                Some(_) => self
                    .table
                    .methods
                    .get(t)
                    .map(|ms| {
                        ms.values()
                            .map(|m| {
                                let map: Vec<(Name, Type)> =
                                    m.recv_params.iter().cloned().zip(actuals.iter().cloned()).collect();
                                Spec { name: m.name.clone(), sig: m.sig.freshen(&map).subst(&map) }
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
                None => vec![],
            },
        }
    }

    pub fn is_interface_type(&self, ty: &Type) -> bool {
        matches!(ty, Type::Named(t, _) if self.table.is_interface(t))
    }

    pub fn is_struct_type(&self, ty: &Type) -> bool {
        matches!(ty, Type::Named(t, _) if self.table.is_struct(t))
    }

    pub fn subtype(&self, t: &Type, u: &Type, delta: &TypeEnv) -> bool {
        if t == u {
            return true;
        }
        if !self.is_interface_type(u) {
            return false;
        }
        let goal = (t.clone(), u.clone());
        if self.in_progress.borrow().contains(&goal) {
            return true;
        }
        self.in_progress.borrow_mut().push(goal);
        let have = self.methods(t, delta);
        let ok = self.methods(u, delta).iter().all(|s| have.iter().any(|h| h.name == s.name && h.sig.alpha_eq(&s.sig)));
        self.in_progress.borrow_mut().pop();
        ok
    }

    /// Δ ⊢ τ ok: declared, right arity, actuals satisfy their bounds.
    pub fn well_formed(&self, ty: &Type, delta: &TypeEnv, span: Span) -> TResult<()> {
        match ty {
            Type::Param(a) if delta.contains(a) => Ok(()),
            Type::Param(a) => Err(TypeError::new("t-ok", format!("unknown type parameter {a}"), span)),
            Type::Named(t, actuals) => {
                let formal =
                    self.table.formal(t).ok_or_else(|| TypeError::new("t-ok", format!("unknown type {t}"), span))?;
                self.instantiate(formal, actuals, delta, span, "t-ok")
                    .map(|_| ())
                    .map_err(|e| TypeError::new(e.rule, format!("in {ty}: {}", e.message), span))
            }
        }
    }

    /// Φ :=_Δ φ. Returns the substitution when every actual is well formed
    /// and satisfies its (instantiated) bound.
    pub fn instantiate(
        &self,
        formal: &[FormalEntry],
        actuals: &[Type],
        delta: &TypeEnv,
        span: Span,
        rule: &'static str,
    ) -> TResult<Vec<(Name, Type)>> {
        if formal.len() != actuals.len() {
            return Err(TypeError::new(
                rule,
                format!("expected {} type arguments, got {}", formal.len(), actuals.len()),
                span,
            ));
        }
        for a in actuals {
            self.well_formed(a, delta, span)?;
        }
        let map = bind(formal, actuals);
        for (e, a) in formal.iter().zip(actuals) {
            let bound = e.bound.subst(&map);
            if !self.subtype(a, &bound, delta) {
                return Err(TypeError::new(rule, format!("type argument {a} does not implement {bound}"), span));
            }
        }
        Ok(map)
    }

    /// Δ ⊢ Φ ok, returning Δ extended with Φ.
    pub fn formal_ok(&self, formal: &[FormalEntry], delta: &TypeEnv, span: Span) -> TResult<TypeEnv> {
        if let Some(a) = first_duplicate(formal.iter().map(|e| &*e.param)) {
            return Err(TypeError::new("t-formal", format!("duplicate type parameter {a}"), span));
        }
        if let Some(e) = formal.iter().find(|e| delta.contains(&e.param)) {
            return Err(TypeError::new(
                "t-formal",
                format!("type parameter {} shadows an enclosing one", e.param),
                span,
            ));
        }
        if let Some(e) = formal.iter().find(|e| self.table.types.contains_key(&e.param)) {
            return Err(TypeError::new(
                "t-formal",
                format!("type parameter {} shadows a declared type", e.param),
                span,
            ));
        }
        let inner = delta.extended(formal);
        for e in formal {
            if !self.is_interface_type(&e.bound) {
                return Err(TypeError::new(
                    "t-formal",
                    format!("bound {} of {} is not an interface type", e.bound, e.param),
                    span,
                ));
            }
            self.well_formed(&e.bound, &inner, span)?;
        }
        Ok(inner)
    }

    pub fn type_of(&self, delta: &TypeEnv, gamma: &VarEnv, e: &Expr) -> TResult<Type> {
        let span = e.span;
        match &e.kind {
            ExprKind::Var(x) => {
                gamma.get(x).cloned().ok_or_else(|| TypeError::new("t-var", format!("unbound variable {x}"), span))
            }
            ExprKind::Call { recv, method, targs, args } => {
                let rt = self.type_of(delta, gamma, recv)?;
                let spec = self
                    .methods(&rt, delta)
                    .into_iter()
                    .find(|s| s.name == *method)
                    .ok_or_else(|| TypeError::new("t-call", format!("type {rt} has no method {method}"), span))?;
                let eta = self.instantiate(&spec.sig.formal, targs, delta, span, "t-call")?;
                if spec.sig.params.len() != args.len() {
                    return Err(TypeError::new(
                        "t-call",
                        format!("{rt}.{method} expects {} arguments, got {}", spec.sig.params.len(), args.len()),
                        span,
                    ));
                }
                for (p, a) in spec.sig.params.iter().zip(args) {
                    let at = self.type_of(delta, gamma, a)?;
                    let want = p.ty.subst(&eta);
                    if !self.subtype(&at, &want, delta) {
                        return Err(TypeError::new(
                            "t-call",
                            format!("argument of type {at} does not implement {want}"),
                            span,
                        ));
                    }
                }
                Ok(spec.sig.ret.subst(&eta))
            }
            ExprKind::Lit { ty, targs, args } => {
                if !matches!(self.table.types.get(ty), Some(TypeDef::Struct(_))) {
                    return Err(TypeError::new("t-literal", format!("{ty} is not a struct type"), span));
                }
                let full = Type::Named(ty.clone(), targs.clone());
                self.well_formed(&full, delta, span)?;
                let fields = self.table.fields(ty, targs).unwrap_or_default();
                if fields.len() != args.len() {
                    return Err(TypeError::new(
                        "t-literal",
                        format!("{full} has {} fields, literal gives {}", fields.len(), args.len()),
                        span,
                    ));
                }
                for (f, a) in fields.iter().zip(args) {
                    let at = self.type_of(delta, gamma, a)?;
                    if !self.subtype(&at, &f.ty, delta) {
                        return Err(TypeError::new(
                            "t-literal",
                            format!("field {} of {full}: {at} does not implement {}", f.name, f.ty),
                            a.span,
                        ));
                    }
                }
                Ok(full)
            }
            ExprKind::Select { recv, field } => {
                let rt = self.type_of(delta, gamma, recv)?;
                let fields = match &rt {
                    Type::Named(t, targs) => self.table.fields(t, targs),
                    Type::Param(_) => None,
                }
                .ok_or_else(|| TypeError::new("t-field", format!("{rt} is not a struct type"), span))?;
                fields
                    .into_iter()
                    .find(|f| f.name == *field)
                    .map(|f| f.ty)
                    .ok_or_else(|| TypeError::new("t-field", format!("{rt} has no field {field}"), span))
            }
            ExprKind::Assert { recv, ty } => {
                let rt = self.type_of(delta, gamma, recv)?;
                self.well_formed(ty, delta, span)?;
                if self.is_interface_type(&rt) && self.is_struct_type(ty) && !self.subtype(ty, &rt, delta) {
                    return Err(TypeError::new(
                        "t-assert",
                        format!("impossible assertion: {ty} does not implement {rt}"),
                        span,
                    ));
                }
                Ok(ty.clone())
            }
            ExprKind::Int(_) => Ok(Type::int()),
            ExprKind::Bool(_) => Ok(Type::bool()),
            ExprKind::BinOp { op, lhs, rhs } => {
                for side in [lhs, rhs] {
                    let t = self.type_of(delta, gamma, side)?;
                    if t != Type::int() {
                        return Err(TypeError::new(
                            "t-binop",
                            format!("operand of {op} has type {t}, expected int"),
                            side.span,
                        ));
                    }
                }
                Ok(if op.is_comparison() { Type::bool() } else { Type::int() })
            }
            ExprKind::If { cond, then, els } => {
                let ct = self.type_of(delta, gamma, cond)?;
                if ct != Type::bool() {
                    return Err(TypeError::new("t-if", format!("condition has type {ct}, expected bool"), cond.span));
                }
                let a = self.type_of(delta, gamma, then)?;
                let b = self.type_of(delta, gamma, els)?;
                if self.subtype(&a, &b, delta) {
                    Ok(b)
                } else if self.subtype(&b, &a, delta) {
                    Ok(a)
                } else {
                    Err(TypeError::new("t-if", format!("branches have unrelated types {a} and {b}"), span))
                }
            }
        }
    }

    fn check_struct(&self, s: &StructDecl) -> TResult<()> {
        let delta = self.formal_ok(&s.formal, &TypeEnv::default(), s.span)?;
        if let Some(f) = first_duplicate(s.fields.iter().map(|f| &*f.name)) {
            return Err(TypeError::new("t-type", format!("duplicate field {f} in {}", s.name), s.span));
        }
        for f in &s.fields {
            self.well_formed(&f.ty, &delta, s.span)?;
        }
        Ok(())
    }

    fn check_sig(&self, sig: &Sig, delta: &TypeEnv, span: Span) -> TResult<TypeEnv> {
        let inner = self.formal_ok(&sig.formal, delta, span)?;
        for p in &sig.params {
            self.well_formed(&p.ty, &inner, span)?;
        }
        self.well_formed(&sig.ret, &inner, span)?;
        Ok(inner)
    }

    fn check_interface(&self, i: &InterfaceDecl) -> TResult<()> {
        let delta = self.formal_ok(&i.formal, &TypeEnv::default(), i.span)?;
        for (k, s) in i.specs.iter().enumerate() {
            if let Some(other) = i.specs[..k].iter().find(|o| o.name == s.name) {
                if !other.sig.alpha_eq(&s.sig) {
                    return Err(TypeError::new(
                        "t-type",
                        format!("conflicting specifications for {} in {}", s.name, i.name),
                        i.span,
                    ));
                }
            }
            if let Some(x) = first_duplicate(s.sig.params.iter().map(|p| &*p.name)) {
                return Err(TypeError::new(
                    "t-specification",
                    format!("duplicate parameter {x} in {}", s.name),
                    i.span,
                ));
            }
            self.check_sig(&s.sig, &delta, i.span)?;
        }
        Ok(())
    }

    /// The struct's formal renamed to the receiver parameters of `m`, or
    /// `None` when `m`'s receiver does not name a struct of matching arity.
    pub fn receiver_formal(&self, m: &MethodDecl) -> Option<Vec<FormalEntry>> {
        let formal = match self.table.types.get(&m.recv_type)? {
            TypeDef::Struct(s) => &s.formal[..],
            TypeDef::Builtin => &[],
            TypeDef::Interface(_) => return None,
        };
        if formal.len() != m.recv_params.len() {
            return None;
        }
        let rename: Vec<(Name, Type)> =
            formal.iter().zip(&m.recv_params).map(|(e, a)| (e.param.clone(), Type::Param(a.clone()))).collect();
        Some(
            formal
                .iter()
                .zip(&m.recv_params)
                .map(|(e, a)| FormalEntry { param: a.clone(), bound: e.bound.subst(&rename) })
                .collect(),
        )
    }

    fn check_method(&self, m: &MethodDecl) -> TResult<()> {
        let recv_formal = match self.table.types.get(&m.recv_type) {
            Some(TypeDef::Struct(_) | TypeDef::Builtin) => self.receiver_formal(m).ok_or_else(|| {
                TypeError::new(
                    "t-func",
                    format!(
                        "receiver {} takes {} type parameters, declaration has {}",
                        m.recv_type,
                        self.table.formal(&m.recv_type).map_or(0, |f| f.len()),
                        m.recv_params.len()
                    ),
                    m.span,
                )
            })?,
            _ => {
                return Err(TypeError::new(
                    "t-func",
                    format!("receiver type {} is not a struct type", m.recv_type),
                    m.span,
                ))
            }
        };
        let delta = self.formal_ok(&recv_formal, &TypeEnv::default(), m.span)?;
        let delta = self.check_sig(&m.sig, &delta, m.span)?;
        let names = std::iter::once(&*m.recv).chain(m.sig.params.iter().map(|p| &*p.name));
        if let Some(x) = first_duplicate(names) {
            return Err(TypeError::new(
                "t-func",
                format!("duplicate parameter {x} in {}.{}", m.recv_type, m.name),
                m.span,
            ));
        }
        let mut gamma = VarEnv::new();
        gamma.insert(m.recv.clone(), m.recv_ty());
        for p in &m.sig.params {
            gamma.insert(p.name.clone(), p.ty.clone());
        }
        let t = self.type_of(&delta, &gamma, &m.body)?;
        if !self.subtype(&t, &m.sig.ret, &delta) {
            return Err(TypeError::new(
                "t-func",
                format!("body of {}.{} has type {t}, which does not implement {}", m.recv_type, m.name, m.sig.ret),
                m.body.span,
            ));
        }
        Ok(())
    }
}

/// Checks a whole program; on success returns the type of `main`.
pub fn check_program(p: &Program) -> Result<Type, Vec<Diagnostic>> {
    let mut errs: Vec<TypeError> = Vec::new();
    let mut seen_types = HashSet::new();
    let mut seen_methods = HashSet::new();
    for d in &p.decls {
        match d {
            Decl::Struct(StructDecl { name, span, .. }) | Decl::Interface(InterfaceDecl { name, span, .. }) => {
                if is_builtin_type(name) || !seen_types.insert(name.clone()) {
                    errs.push(TypeError::new("t-prog", format!("duplicate type declaration {name}"), *span));
                }
            }
            Decl::Method(m) => {
                if !seen_methods.insert((m.recv_type.clone(), m.name.clone())) {
                    errs.push(TypeError::new(
                        "t-prog",
                        format!("duplicate method declaration {}.{}", m.recv_type, m.name),
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
    let main = ck.type_of(&TypeEnv::default(), &VarEnv::new(), &p.main);
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
    use crate::parser::parse_fgg;

    const LIST: &str = include_str!("../../tests/corpus/list.fgg");
    const LIST_BAD: &str = include_str!("../../tests/fixtures/list_fail.fgg");

    fn ty(s: &str) -> Type {
        // Reuse the parser on a throwaway literal to read a type.
        let p = parse_fgg(&format!("package main\nfunc main() {{ _ = X{{}}.(\n{s}) }}")).unwrap();
        match p.main.kind {
            ExprKind::Assert { ty, .. } => ty,
            _ => unreachable!(),
        }
    }

    #[test]
    fn list_program_typechecks() {
        let p = parse_fgg(LIST).unwrap();
        assert_eq!(check_program(&p), Ok(ty("List[bool]")));
    }

    #[test]
    fn failing_line_names_function_bool_bool() {
        let p = parse_fgg(LIST_BAD).unwrap();
        let d = check_program(&p).unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("Function[bool, bool]"), "{}", d[0].message);
        assert!(d[0].message.starts_with("t-call"));
    }

    #[test]
    fn subtyping_from_the_list_program() {
        let p = parse_fgg(LIST).unwrap();
        let ck = Checker::new(&p);
        let d = TypeEnv::default();
        assert!(ck.subtype(&ty("GtFunc[int]"), &ty("Function[int, bool]"), &d));
        assert!(!ck.subtype(&ty("GtFunc[int]"), &ty("Function[bool, bool]"), &d));
        assert!(ck.subtype(&ty("int"), &ty("Ord[int]"), &d));
        assert!(!ck.subtype(&ty("bool"), &ty("Ord[bool]"), &d));
        assert!(ck.subtype(&ty("Cons[int]"), &ty("List[int]"), &d));
        assert!(!ck.subtype(&ty("Cons[int]"), &ty("List[bool]"), &d));
    }

    #[test]
    fn method_sets() {
        let p = parse_fgg(LIST).unwrap();
        let ck = Checker::new(&p);
        let ms = ck.methods(&ty("List[int]"), &TypeEnv::default());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].to_string(), "Map[R Any](f Function[int, R]) List[R]");
        assert!(ck.methods(&ty("Any"), &TypeEnv::default()).is_empty());
        let delta = TypeEnv(vec![(crate::ast::name("α"), Type::named("Ord", vec![Type::param("α")]))]);
        let ms = ck.methods(&Type::param("α"), &delta);
        assert_eq!(ms[0].to_string(), "Gt(x α) bool");
    }

    #[test]
    fn method_formal_is_renamed_to_avoid_capture() {
        let p = parse_fgg(LIST).unwrap();
        let ck = Checker::new(&p);
        let ms = ck.methods(&Type::named("Cons", vec![Type::param("R")]), &TypeEnv::default());
        assert_eq!(ms[0].to_string(), "Map[R' Any](f Function[R, R']) List[R']");
    }

    #[test]
    fn receiver_formal_must_match_declaration() {
        let src = "package main\ntype Any interface {}\ntype B[T Any] struct {}\n\
                   func (b B) m() Any { return b }\nfunc main() { _ = 1 }";
        let d = check_program(&parse_fgg(src).unwrap()).unwrap_err();
        assert!(d[0].message.starts_with("t-func"));
    }

    #[test]
    fn bounds_are_checked_on_literals() {
        let src = "package main\ntype Any interface {}\n\
                   type Ord[T Ord[T]] interface { Gt(x T) bool }\n\
                   type G[T Ord[T]] struct { v T }\nfunc main() { _ = G[bool]{true} }";
        let d = check_program(&parse_fgg(src).unwrap()).unwrap_err();
        assert!(d[0].message.contains("bool does not implement Ord[bool]"), "{}", d[0].message);
    }
}
