use crate::ast::fgg::*;
use crate::ast::{name, Name, Span};

use super::lexer::Tok;
use super::{Cursor, Diagnostic, PResult};

pub fn parse_fgg(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser { c: Cursor::new(src).map_err(|d| vec![d])?, scope: Vec::new() };
    p.program().map_err(|d| vec![d])
}

struct Parser {
    c: Cursor,
    /// Type parameters visible in the current declaration.
    scope: Vec<Name>,
}

impl Parser {
    fn program(&mut self) -> PResult<Program> {
        self.c.header()?;
        let mut decls = Vec::new();
        let mut main = None;
        loop {
            self.c.skip_semis();
            self.scope.clear();
            let span = self.c.span();
            if self.c.eat_kw("type") {
                decls.push(self.type_decl(span)?);
            } else if self.c.eat_kw("func") {
                if matches!(self.c.peek(), Tok::Ident(s) if s == "main") {
                    if main.is_some() {
                        return Err(Diagnostic::new("duplicate func main", span));
                    }
                    self.c.bump();
                    self.c.main_open()?;
                    main = Some(self.expr()?);
                    self.c.main_close()?;
                    continue;
                }
                decls.push(Decl::Method(self.method(span)?));
            } else if matches!(self.c.peek(), Tok::Eof) {
                return match main {
                    Some(main) => Ok(Program { decls, main }),
                    None => Err(Diagnostic::new("missing func main", self.c.span())),
                };
            } else {
                return self.c.error("declaration");
            }
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        let (t, _) = self.c.ident()?;
        let t = name(&t);
        if self.c.is_punct("[") {
            let args = self.types()?;
            return Ok(Type::Named(t, args));
        }
        if self.scope.contains(&t) {
            Ok(Type::Param(t))
        } else {
            Ok(Type::Named(t, vec![]))
        }
    }

    /// `[τ, ...]`, possibly empty.
    fn types(&mut self) -> PResult<Vec<Type>> {
        self.c.expect_punct("[")?;
        let mut ts = Vec::new();
        if self.c.eat_punct("]") {
            return Ok(ts);
        }
        loop {
            ts.push(self.ty()?);
            if self.c.eat_punct("]") {
                return Ok(ts);
            }
            self.c.expect_punct(",")?;
        }
    }

    /// `[α τ, ...]`. Parameter names enter scope before any bound is read, so
    /// bounds may mention each other.
    fn formal(&mut self) -> PResult<Vec<FormalEntry>> {
        if !self.c.is_punct("[") {
            return Ok(vec![]);
        }
        let save = self.c.pos;
        self.c.bump();
        // First pass: collect names.
        let mut depth = 0usize;
        let mut expect_name = true;
        loop {
            match self.c.peek().clone() {
                Tok::Ident(x) if expect_name && depth == 0 => {
                    self.scope.push(name(&x));
                    expect_name = false;
                }
                Tok::Punct("[") => depth += 1,
                Tok::Punct("]") if depth == 0 => break,
                Tok::Punct("]") => depth -= 1,
                Tok::Punct(",") if depth == 0 => expect_name = true,
                Tok::Eof => break,
                _ => {}
            }
            self.c.bump();
        }
        self.c.pos = save;
        self.c.bump();
        let mut entries = Vec::new();
        if self.c.eat_punct("]") {
            return Ok(entries);
        }
        loop {
            let (a, _) = self.c.ident()?;
            let bound = self.ty()?;
            entries.push(FormalEntry { param: name(&a), bound });
            if self.c.eat_punct("]") {
                return Ok(entries);
            }
            self.c.expect_punct(",")?;
        }
    }

    fn type_decl(&mut self, span: Span) -> PResult<Decl> {
        let (t, _) = self.c.ident()?;
        let formal = self.formal()?;
        if self.c.eat_kw("struct") {
            self.c.expect_punct("{")?;
            let mut fields = Vec::new();
            loop {
                self.c.skip_semis();
                if self.c.eat_punct("}") {
                    break;
                }
                let (f, _) = self.c.ident()?;
                let ty = self.ty()?;
                fields.push(Field { name: name(&f), ty });
            }
            Ok(Decl::Struct(StructDecl { name: name(&t), formal, fields, span }))
        } else if self.c.eat_kw("interface") {
            self.c.expect_punct("{")?;
            let mut specs = Vec::new();
            loop {
                self.c.skip_semis();
                if self.c.eat_punct("}") {
                    break;
                }
                let (m, _) = self.c.ident()?;
                let outer = self.scope.len();
                let sig = self.sig()?;
                self.scope.truncate(outer);
                specs.push(Spec { name: name(&m), sig });
            }
            Ok(Decl::Interface(InterfaceDecl { name: name(&t), formal, specs, span }))
        } else {
            self.c.error("`struct` or `interface`")
        }
    }

    fn sig(&mut self) -> PResult<Sig> {
        let formal = self.formal()?;
        self.c.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.c.eat_punct(")") {
            loop {
                let (x, _) = self.c.ident()?;
                let ty = self.ty()?;
                params.push(Param { name: name(&x), ty });
                if self.c.eat_punct(")") {
                    break;
                }
                self.c.expect_punct(",")?;
            }
        }
        let ret = self.ty()?;
        Ok(Sig { formal, params, ret })
    }

    fn method(&mut self, span: Span) -> PResult<MethodDecl> {
        self.c.expect_punct("(")?;
        let (x, _) = self.c.ident()?;
        let (t, _) = self.c.ident()?;
        let mut recv_params = Vec::new();
        if self.c.eat_punct("[") && !self.c.eat_punct("]") {
            loop {
                let (a, _) = self.c.ident()?;
                recv_params.push(name(&a));
                if self.c.eat_punct("]") {
                    break;
                }
                self.c.expect_punct(",")?;
            }
        }
        self.c.expect_punct(")")?;
        self.scope.extend(recv_params.iter().cloned());
        let (m, _) = self.c.ident()?;
        let sig = self.sig()?;
        self.c.expect_punct("{")?;
        let body = self.body()?;
        Ok(MethodDecl { recv: name(&x), recv_type: name(&t), recv_params, name: name(&m), sig, body, span })
    }

    /// `return e }` or an if-statement, through the closing `}`.
    fn body(&mut self) -> PResult<Expr> {
        self.c.skip_semis();
        let span = self.c.span();
        if self.c.eat_kw("return") {
            let e = self.expr()?;
            self.c.skip_semis();
            self.c.expect_punct("}")?;
            return Ok(e);
        }
        if self.c.eat_kw("if") {
            let cond = self.cond()?;
            self.c.expect_punct("{")?;
            let then = self.body()?;
            if self.c.eat_kw("else") {
                let els = self.else_branch()?;
                self.c.skip_semis();
                self.c.expect_punct("}")?;
                return Ok(Expr::if_else(cond, then, els).at(span));
            }
            let rest = self.body()?;
            return Ok(Expr::if_else(cond, then, rest).at(span));
        }
        if self.c.is_kw("panic") {
            return Err(Diagnostic::new("`panic` is not part of FGG", span));
        }
        if self.c.is_punct("}") {
            return Err(Diagnostic::new("missing return", span));
        }
        self.c.error("`return` or `if`")
    }

    fn else_branch(&mut self) -> PResult<Expr> {
        let span = self.c.span();
        if self.c.eat_kw("if") {
            return self.if_else(span);
        }
        self.c.expect_punct("{")?;
        self.body()
    }

    fn if_else(&mut self, span: Span) -> PResult<Expr> {
        let cond = self.cond()?;
        self.c.expect_punct("{")?;
        let then = self.body()?;
        self.c.expect_kw("else")?;
        let els = self.else_branch()?;
        Ok(Expr::if_else(cond, then, els).at(span))
    }

    fn cond(&mut self) -> PResult<Expr> {
        self.c.expect_punct("(")?;
        let e = self.expr()?;
        if self.c.is_punct("!=") {
            return Err(Diagnostic::new("`!=` is not part of FGG", self.c.span()));
        }
        self.c.expect_punct(")")?;
        Ok(e)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, prec: u8) -> PResult<Expr> {
        if prec > 2 {
            return self.postfix();
        }
        let mut lhs = self.binary(prec + 1)?;
        while let Some(op) = self.c.binop() {
            if op.precedence() != prec {
                break;
            }
            let span = self.c.span();
            self.c.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::binop(op, lhs, rhs).at(span);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.c.is_punct(".") {
            let span = self.c.span();
            self.c.bump();
            if self.c.eat_punct("(") {
                let ty = self.ty()?;
                self.c.expect_punct(")")?;
                e = Expr::new(ExprKind::Assert { recv: Box::new(e), ty }).at(span);
                continue;
            }
            let (m, _) = self.c.ident()?;
            let targs = if self.c.is_punct("[") { Some(self.types()?) } else { None };
            if self.c.is_punct("(") {
                let args = self.args("(", ")")?;
                e = Expr::new(ExprKind::Call {
                    recv: Box::new(e),
                    method: name(&m),
                    targs: targs.unwrap_or_default(),
                    args,
                })
                .at(span);
            } else if targs.is_some() {
                return self.c.error("`(` after method type arguments");
            } else {
                e = Expr::new(ExprKind::Select { recv: Box::new(e), field: name(&m) }).at(span);
            }
        }
        Ok(e)
    }

    fn args(&mut self, open: &str, close: &str) -> PResult<Vec<Expr>> {
        self.c.expect_punct(open)?;
        let mut args = Vec::new();
        if self.c.eat_punct(close) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.c.eat_punct(close) {
                return Ok(args);
            }
            self.c.expect_punct(",")?;
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.c.span();
        if let Some(n) = self.c.int_literal()? {
            return Ok(Expr::new(ExprKind::Int(n)).at(span));
        }
        match self.c.peek().clone() {
            Tok::Kw("true") => {
                self.c.bump();
                Ok(Expr::new(ExprKind::Bool(true)).at(span))
            }
            Tok::Kw("false") => {
                self.c.bump();
                Ok(Expr::new(ExprKind::Bool(false)).at(span))
            }
            Tok::Kw("if") => {
                self.c.bump();
                self.if_else(span)
            }
            Tok::Kw("panic") => Err(Diagnostic::new("`panic` is not part of FGG", span)),
            Tok::Ident(x) => {
                self.c.bump();
                let targs = if self.c.is_punct("[") { Some(self.types()?) } else { None };
                if self.c.is_punct("{") {
                    let args = self.args("{", "}")?;
                    Ok(Expr::new(ExprKind::Lit { ty: name(&x), targs: targs.unwrap_or_default(), args }).at(span))
                } else if targs.is_some() {
                    self.c.error("`{` after type arguments")
                } else {
                    Ok(Expr::new(ExprKind::Var(name(&x))).at(span))
                }
            }
            Tok::Punct("(") => {
                self.c.bump();
                let e = self.expr()?;
                if self.c.is_punct(";") {
                    return Err(Diagnostic::new("sequencing is not part of FGG", self.c.span()));
                }
                self.c.expect_punct(")")?;
                Ok(e)
            }
            _ => self.c.error("expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_formal_has_one_entry() {
        let src = "package main\ntype Any interface {}\ntype Box[α Any] struct { value α }\nfunc main() { _ = 1 }";
        let p = parse_fgg(src).unwrap();
        let Decl::Struct(s) = &p.decls[1] else { panic!() };
        assert_eq!(s.formal, vec![FormalEntry { param: name("α"), bound: Type::named("Any", vec![]) }]);
        assert_eq!(s.fields[0].ty, Type::param("α"));
    }

    #[test]
    fn f_bounded_formal_resolves_params_in_bounds() {
        let src = "package main\ntype Ord[T Ord[T]] interface { Gt(x T) bool }\nfunc main() { _ = 1 }";
        let p = parse_fgg(src).unwrap();
        let Decl::Interface(i) = &p.decls[0] else { panic!() };
        assert_eq!(i.formal[0].bound, Type::named("Ord", vec![Type::param("T")]));
        assert_eq!(i.specs[0].sig.params[0].ty, Type::param("T"));
    }

    #[test]
    fn method_formal_scopes_over_signature_and_body() {
        let src = "package main\n\
            type Any interface {}\n\
            type Box[T Any] struct { v T }\n\
            func (b Box[T]) Put[U Any](u U) Box[U] { return Box[U]{u} }\n\
            func main() { _ = Box[Any[]]{Box[Any]{}}.Put[int](1) }";
        let p = parse_fgg(src).unwrap();
        let Decl::Method(m) = &p.decls[2] else { panic!() };
        assert_eq!(m.recv_params, vec![name("T")]);
        assert_eq!(m.sig.ret, Type::named("Box", vec![Type::param("U")]));
        assert_eq!(m.body, Expr::lit("Box", vec![Type::param("U")], vec![Expr::var("u")]));
        // `Any[]` and `Any` are the same type.
        let ExprKind::Call { recv, .. } = &p.main.kind else { panic!() };
        let ExprKind::Lit { targs, .. } = &recv.kind else { panic!() };
        assert_eq!(targs[0], Type::named("Any", vec![]));
    }

    #[test]
    fn fg_extended_forms_are_rejected() {
        let body = |b: &str| {
            format!("package main\ntype A struct {{}}\nfunc (x A) m() A {{ {b} }}\nfunc main() {{ _ = A{{}} }}")
        };
        assert!(parse_fgg(&body("panic")).is_err());
        assert!(parse_fgg(&body("if (x != x) { return x } else { return x }")).is_err());
        assert!(parse_fgg(&body("return (x; x)")).is_err());
        assert!(parse_fgg(&body("if (true) { return x } else { return x }")).is_ok());
    }
}
