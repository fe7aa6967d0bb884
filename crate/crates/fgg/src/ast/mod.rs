//! Abstract syntax for FG (with the extended dialect emitted by the
//! translators) and FGG, plus canonical printers and node counting.

pub mod fg;
pub mod fgg;
mod print;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Identifiers are shared strings; terms are cloned a lot during reduction.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A 1-based source position.
///
/// Positions are metadata: they never take part in structural equality or
/// hashing, so a reparsed tree compares equal to the tree that was printed.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Lt,
    Gt,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    /// Comparisons bind looser than additive operators.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Lt | BinOp::Gt => 1,
            BinOp::Add | BinOp::Sub => 2,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 1
    }

    pub fn eval(self, l: i64, r: i64) -> Literal {
        match self {
            BinOp::Lt => Literal::Bool(l < r),
            BinOp::Gt => Literal::Bool(l > r),
            BinOp::Add => Literal::Int(l.wrapping_add(r)),
            BinOp::Sub => Literal::Int(l.wrapping_sub(r)),
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Result of a builtin operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Literal {
    Int(i64),
    Bool(bool),
}

/// Names of the predeclared struct-kinded types.
pub const INT: &str = "int";
pub const BOOL: &str = "bool";

pub fn is_builtin_type(t: &str) -> bool {
    t == INT || t == BOOL
}
