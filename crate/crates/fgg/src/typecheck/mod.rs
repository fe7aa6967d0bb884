//! Typing for FG (core and extended) and FGG.
//!
//! Each failed judgement produces a [`TypeError`] naming the rule that did
//! not hold; program checking collects the first error of every
//! declaration.

pub mod fg;
pub mod fgg;

use std::fmt;

use crate::ast::Span;
use crate::parser::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub rule: &'static str,
    pub message: String,
    pub span: Span,
}

impl TypeError {
    pub fn new(rule: &'static str, message: impl Into<String>, span: Span) -> Self {
        TypeError { rule, message: message.into(), span }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

impl std::error::Error for TypeError {}

impl From<TypeError> for Diagnostic {
    fn from(e: TypeError) -> Diagnostic {
        Diagnostic::new(e.to_string(), e.span)
    }
}

pub(crate) type TResult<T> = Result<T, TypeError>;

/// Reports a repeated name among `names`, in first-repeat order.
pub(crate) fn first_duplicate<'a, I>(names: I) -> Option<&'a str>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut seen = std::collections::HashSet::new();
    names.into_iter().find(|n| !seen.insert(*n))
}
