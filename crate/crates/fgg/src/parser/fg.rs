use crate::ast::fg::*;
use crate::ast::{name, Name, Span};

use super::lexer::Tok;
use super::{Cursor, Diagnostic, Dialect, PResult};

pub fn parse_fg(src: &str, dialect: Dialect) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser { c: Cursor::new(src).map_err(|d| vec![d])?, extended: dialect == Dialect::Extended };
    p.program().map_err(|d| vec![d])
}

struct Parser {
    c: Cursor,
    extended: bool,
}

impl Parser {
    fn require_extended(&self, construct: &str, span: Span) -> PResult<()> {
        if self.extended {
            Ok(())
        } else {
            Err(Diagnostic::new(format!("{construct} is only allowed in the extended FG dialect"), span))
        }
    }

    fn program(&mut self) -> PResult<Program> {
        self.c.header()?;
        let mut decls = Vec::new();
        let mut main = None;
        loop {
            self.c.skip_semis();
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

    fn ty(&mut self) -> PResult<Name> {
        let (t, _) = self.c.ident()?;
        if self.c.is_punct("[") {
            return Err(Diagnostic::new("type arguments are not part of FG", self.c.span()));
        }
        Ok(name(&t))
    }

    fn type_decl(&mut self, span: Span) -> PResult<Decl> {
        let (t, _) = self.c.ident()?;
        if self.c.is_punct("[") {
            return Err(Diagnostic::new("type formals are not part of FG", self.c.span()));
        }
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
            Ok(Decl::Struct(StructDecl { name: name(&t), fields, span }))
        } else if self.c.eat_kw("interface") {
            self.c.expect_punct("{")?;
            let mut specs = Vec::new();
            loop {
                self.c.skip_semis();
                if self.c.eat_punct("}") {
                    break;
                }
                let (m, _) = self.c.ident()?;
                let params = self.params()?;
                let ret = self.ty()?;
                specs.push(Spec { name: name(&m), params, ret });
            }
            Ok(Decl::Interface(InterfaceDecl { name: name(&t), specs, span }))
        } else {
            self.c.error("`struct` or `interface`")
        }
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.c.expect_punct("(")?;
        let mut ps = Vec::new();
        if !self.c.eat_punct(")") {
            loop {
                let (x, _) = self.c.ident()?;
                let ty = self.ty()?;
                ps.push(Param { name: name(&x), ty });
                if self.c.eat_punct(")") {
                    break;
                }
                self.c.expect_punct(",")?;
            }
        }
        Ok(ps)
    }

    fn method(&mut self, span: Span) -> PResult<MethodDecl> {
        self.c.expect_punct("(")?;
        let (x, _) = self.c.ident()?;
        let t = self.ty()?;
        self.c.expect_punct(")")?;
        let (m, _) = self.c.ident()?;
        let params = self.params()?;
        let ret = self.ty()?;
        self.c.expect_punct("{")?;
        let body = self.body()?;
        Ok(MethodDecl { recv: Param { name: name(&x), ty: t }, name: name(&m), params, ret, body, span })
    }

    /// Statements up to and including the closing `}`.
    fn body(&mut self) -> PResult<Expr> {
        self.c.skip_semis();
        let span = self.c.span();
        if self.c.eat_kw("return") {
            let e = self.expr()?;
            self.c.skip_semis();
            self.c.expect_punct("}")?;
            return Ok(e);
        }
        if self.c.is_kw("panic") {
            self.require_extended("`panic`", span)?;
            self.c.bump();
            self.c.skip_semis();
            self.c.expect_punct("}")?;
            return Ok(Expr::panic().at(span));
        }
        if self.c.eat_kw("if") {
            self.require_extended("`if`", span)?;
            let e = self.if_stmt(span)?;
            return Ok(e);
        }
        if self.c.is_punct("}") {
            return Err(Diagnostic::new("missing return", span));
        }
        self.require_extended("sequencing", span)?;
        let head = self.expr()?;
        let rest = self.body()?;
        Ok(Expr::seq(head, rest).at(span))
    }

    /// After `if`. Consumes through the end of the enclosing block, since an
    /// `if` without `else` takes the remaining statements as its else branch.
    fn if_stmt(&mut self, span: Span) -> PResult<Expr> {
        let cond = self.cond()?;
        self.c.expect_punct("{")?;
        let then = self.body()?;
        if self.c.eat_kw("else") {
            let els = self.else_branch()?;
            // Anything after an if-else is unreachable; only `}` may follow.
            self.c.skip_semis();
            self.c.expect_punct("}")?;
            return Ok(build_if(cond, then, els, span));
        }
        let rest = self.body()?;
        Ok(build_if(cond, then, rest, span))
    }

    /// After `else`: a block, or an if-else chain that ends in a block.
    fn else_branch(&mut self) -> PResult<Expr> {
        let span = self.c.span();
        if self.c.eat_kw("if") {
            return self.if_else(span);
        }
        self.c.expect_punct("{")?;
        self.body()
    }

    /// After `if`, with a mandatory else.
    fn if_else(&mut self, span: Span) -> PResult<Expr> {
        let cond = self.cond()?;
        self.c.expect_punct("{")?;
        let then = self.body()?;
        self.c.expect_kw("else")?;
        let els = self.else_branch()?;
        Ok(build_if(cond, then, els, span))
    }

    fn cond(&mut self) -> PResult<Cond> {
        self.c.expect_punct("(")?;
        let lhs = self.expr()?;
        let cond = if self.c.is_punct("!=") {
            let span = self.c.span();
            self.require_extended("`!=`", span)?;
            self.c.bump();
            let rhs = self.expr()?;
            Cond::Neq(Box::new(lhs), Box::new(rhs))
        } else {
            Cond::Bool(Box::new(lhs))
        };
        self.c.expect_punct(")")?;
        Ok(cond)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = if min_prec > 2 {
            return self.postfix();
        } else {
            self.binary(min_prec + 1)?
        };
        while let Some(op) = self.c.binop() {
            if op.precedence() != min_prec {
                break;
            }
            let span = self.c.span();
            self.c.bump();
            let rhs = self.binary(min_prec + 1)?;
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
                let t = self.ty()?;
                self.c.expect_punct(")")?;
                e = Expr::new(ExprKind::Assert { recv: Box::new(e), ty: t }).at(span);
                continue;
            }
            let (m, _) = self.c.ident()?;
            if self.c.is_punct("[") {
                return Err(Diagnostic::new("type arguments are not part of FG", self.c.span()));
            }
            if self.c.is_punct("(") {
                let args = self.args("(", ")")?;
                e = Expr::new(ExprKind::Call { recv: Box::new(e), method: name(&m), args }).at(span);
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
            Tok::Kw("panic") => {
                self.require_extended("`panic`", span)?;
                self.c.bump();
                Ok(Expr::panic().at(span))
            }
            Tok::Kw("if") => {
                self.require_extended("`if`", span)?;
                self.c.bump();
                self.if_else(span)
            }
            Tok::Ident(x) => {
                self.c.bump();
                if self.c.is_punct("[") {
                    return Err(Diagnostic::new("type arguments are not part of FG", self.c.span()));
                }
                if self.c.is_punct("{") {
                    let args = self.args("{", "}")?;
                    Ok(Expr::new(ExprKind::Lit { ty: name(&x), args }).at(span))
                } else {
                    Ok(Expr::new(ExprKind::Var(name(&x))).at(span))
                }
            }
            Tok::Punct("(") => {
                self.c.bump();
                let e = self.expr()?;
                if self.c.is_punct(";") {
                    self.require_extended("sequencing", self.c.span())?;
                    self.c.bump();
                    let rest = self.expr()?;
                    self.c.expect_punct(")")?;
                    return Ok(Expr::seq(e, rest).at(span));
                }
                self.c.expect_punct(")")?;
                Ok(e)
            }
            _ => self.c.error("expression"),
        }
    }
}

fn build_if(cond: Cond, then: Expr, els: Expr, span: Span) -> Expr {
    Expr::new(ExprKind::If { cond, then: Box::new(then), els: Box::new(els) }).at(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(body: &str) -> String {
        format!("package main\ntype A struct {{}}\nfunc (x A) m(y A) A {{\n{body}\n}}\nfunc main() {{ _ = A{{}} }}")
    }

    #[test]
    fn neq_panic_guard_needs_extended() {
        let src = wrap("if (x != y) { panic }; return x");
        let p = parse_fg(&src, Dialect::Extended).unwrap();
        let Decl::Method(m) = &p.decls[1] else { panic!() };
        assert_eq!(m.body, Expr::if_neq(Expr::var("x"), Expr::var("y"), Expr::panic(), Expr::var("x")));
        let d = parse_fg(&src, Dialect::Core).unwrap_err();
        assert!(d[0].message.contains("`if`"), "{}", d[0].message);
    }

    #[test]
    fn comparison_is_a_binop() {
        let p = parse_fg(&wrap("return 5 < 3"), Dialect::Extended).unwrap();
        let Decl::Method(m) = &p.decls[1] else { panic!() };
        assert_eq!(
            m.body,
            Expr::binop(crate::ast::BinOp::Lt, Expr::new(ExprKind::Int(5)), Expr::new(ExprKind::Int(3)))
        );
    }

    #[test]
    fn statement_sequence_and_else_if() {
        let src = wrap("x.m(y); if (true) { return x } else if (false) { return y } else { panic }");
        let p = parse_fg(&src, Dialect::Extended).unwrap();
        let Decl::Method(m) = &p.decls[1] else { panic!() };
        let ExprKind::Seq(_, rest) = &m.body.kind else { panic!() };
        let ExprKind::If { els, .. } = &rest.kind else { panic!() };
        assert!(matches!(els.kind, ExprKind::If { .. }));
        assert!(parse_fg(&src, Dialect::Core).is_err());
    }

    #[test]
    fn rejects_generic_syntax() {
        let src = "package main\ntype A[T Any] struct {}\nfunc main() { _ = A{} }";
        assert!(parse_fg(src, Dialect::Extended).is_err());
    }

    #[test]
    fn negative_literals_and_min_int() {
        let src = wrap("return -9223372036854775808 - -1");
        let p = parse_fg(&src, Dialect::Core).unwrap();
        let text = p.to_string();
        assert_eq!(parse_fg(&text, Dialect::Core).unwrap(), p);
    }

    #[test]
    fn missing_main_and_unbalanced_brace() {
        let d = parse_fg("package main\ntype A struct {}", Dialect::Core).unwrap_err();
        assert_eq!(d[0].message, "missing func main");
        let d = parse_fg("package main\nfunc main() { _ = A{ }", Dialect::Core).unwrap_err();
        assert!(d[0].message.contains("`}`"));
    }
}
