//! Featherweight Go and Featherweight Generic Go: parsing, typechecking,
//! small-step evaluation, translation of FGG to FG by dictionary passing or
//! by erasure, and a co-simulation checker relating source and target runs.

pub mod ast;
pub mod bench;
pub mod cli;
pub mod cosim;
pub mod dict;
pub mod erasure;
pub mod parser;
pub mod reduce;
pub mod typecheck;
