//! Recursive-descent parsers for FG (core and extended) and FGG.
//!
//! Both grammars share the lexer and a token cursor. Newlines carry no
//! meaning; `;` is accepted wherever one statement or member ends.

mod fg;
mod fgg;
mod lexer;

use std::fmt;

use serde::Serialize;

use crate::ast::Span;
use lexer::{Tok, Token};

pub use fg::parse_fg;
pub use fgg::parse_fgg;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    Core,
    #[default]
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub message: String,
    pub line: u32,
    pub column: u32,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            message: message.into(),
            line: span.line.max(1),
            column: span.col.max(1),
            severity: Severity::Error,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

type PResult<T> = Result<T, Diagnostic>;

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> PResult<Self> {
        let toks = lexer::lex(src)?;
        if matches!(toks[0].tok, Tok::Eof) {
            return Err(Diagnostic::new("missing package main", toks[0].span));
        }
        Ok(Cursor { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(q) if *q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(Diagnostic::new(format!("expected {what}, found {}", self.peek().describe()), self.span()))
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        let span = self.span();
        if self.eat_punct(p) {
            Ok(span)
        } else {
            self.error(&format!("`{p}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<Span> {
        let span = self.span();
        if self.eat_kw(k) {
            Ok(span)
        } else {
            self.error(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.span();
                self.bump();
                Ok((s, span))
            }
            _ => self.error("identifier"),
        }
    }

    fn skip_semis(&mut self) {
        while self.eat_punct(";") {}
    }

    fn header(&mut self) -> PResult<()> {
        if !self.is_kw("package") {
            return Err(Diagnostic::new("missing package main", self.span()));
        }
        self.bump();
        let (pkg, span) = self.ident()?;
        if pkg != "main" {
            return Err(Diagnostic::new(format!("expected package main, found package {pkg}"), span));
        }
        self.skip_semis();
        Ok(())
    }

    /// After `func main`: `() { _ = e }` with `e` supplied by the caller.
    fn main_open(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        match self.ident()? {
            (s, _) if s == "_" => {}
            (_, span) => return Err(Diagnostic::new("expected `_ = e` in main", span)),
        }
        self.expect_punct("=")?;
        Ok(())
    }

    fn main_close(&mut self) -> PResult<()> {
        self.skip_semis();
        self.expect_punct("}")?;
        Ok(())
    }

    /// `-` INT or INT, as an i64.
    fn int_literal(&mut self) -> PResult<Option<i64>> {
        let span = self.span();
        let neg = self.is_punct("-") && matches!(self.peek_at(1), Tok::Int(_));
        if neg {
            self.bump();
        }
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                let v = if neg { 0i64.checked_sub_unsigned(n) } else { i64::try_from(n).ok() };
                v.map(Some).ok_or_else(|| Diagnostic::new("integer literal out of range", span))
            }
            _ => Ok(None),
        }
    }

    fn binop(&self) -> Option<crate::ast::BinOp> {
        use crate::ast::BinOp;
        match self.peek() {
            Tok::Punct("<") => Some(BinOp::Lt),
            Tok::Punct(">") => Some(BinOp::Gt),
            Tok::Punct("+") => Some(BinOp::Add),
            Tok::Punct("-") => Some(BinOp::Sub),
            _ => None,
        }
    }
}
