//! Uniform substitution proof kernel for differential dynamic logic.

pub mod parser;
pub mod printer;
pub mod sexpr;
pub mod statics;
pub mod syntax;
pub mod usubst;
pub mod axioms;
pub mod semantics;
pub mod kernel;
pub mod script;
pub mod random;
pub mod report;
