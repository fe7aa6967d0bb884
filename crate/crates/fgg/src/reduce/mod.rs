//! Call-by-value small-step evaluation.
//!
//! A step first locates the redex (the leftmost non-value in evaluation
//! position, as a child-index path) and then contracts it in place.

pub mod fg;
pub mod fgg;

use serde::Serialize;

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "r-fields")]
    Fields,
    #[serde(rename = "r-call")]
    Call,
    #[serde(rename = "r-assert")]
    Assert,
    #[serde(rename = "r-ext-binop")]
    Binop,
    #[serde(rename = "r-ext-if")]
    If,
    #[serde(rename = "r-ext-seq")]
    Seq,
    #[serde(rename = "r-ext-panic")]
    Panic,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Fields => "r-fields",
            Rule::Call => "r-call",
            Rule::Assert => "r-assert",
            Rule::Binop => "r-ext-binop",
            Rule::If => "r-ext-if",
            Rule::Seq => "r-ext-seq",
            Rule::Panic => "r-ext-panic",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the next reduction happens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Redex {
    Value,
    At(Vec<usize>),
}

/// Why a contraction did not produce a term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "message", rename_all = "lowercase")]
pub enum Halt {
    /// A failed type assertion, or an explicit `panic`.
    Panic(String),
    /// No rule applies; never happens to well-typed terms.
    Stuck(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step<E> {
    Stepped { next: E, rule: Rule },
    Value,
    Halted(Halt),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome<V> {
    Value { value: V },
    Panic { message: String },
    Stuck { reason: String },
    BudgetExhausted,
}

impl<V> Outcome<V> {
    pub fn is_value(&self) -> bool {
        matches!(self, Outcome::Value { .. })
    }

    pub fn is_panic(&self) -> bool {
        matches!(self, Outcome::Panic { .. })
    }

    pub fn value(&self) -> Option<&V> {
        match self {
            Outcome::Value { value } => Some(value),
            _ => None,
        }
    }

    pub fn map_value<W>(self, f: impl FnOnce(V) -> W) -> Outcome<W> {
        match self {
            Outcome::Value { value } => Outcome::Value { value: f(value) },
            Outcome::Panic { message } => Outcome::Panic { message },
            Outcome::Stuck { reason } => Outcome::Stuck { reason },
            Outcome::BudgetExhausted => Outcome::BudgetExhausted,
        }
    }

    fn halted(h: Halt) -> Self {
        match h {
            Halt::Panic(message) => Outcome::Panic { message },
            Halt::Stuck(reason) => Outcome::Stuck { reason },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Run<V> {
    pub outcome: Outcome<V>,
    pub steps: usize,
}

/// Callback for `--trace`: the rule about to fire and its redex.
pub type Tracer<'a, E> = &'a mut dyn FnMut(Rule, &E);

pub(crate) fn assert_failure(from: impl std::fmt::Display, to: impl std::fmt::Display) -> Halt {
    Halt::Panic(format!("Unable to assert {from} as type {to}"))
}
