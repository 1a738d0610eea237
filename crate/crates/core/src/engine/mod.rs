//! Datalog programs, fragment classification, semi-naive evaluation and
//! derivation graphs.

mod eval;
mod graph;
mod parse;
mod program;

pub use eval::{evaluate, EvalOptions, Evaluation, Fact, FactStore};
pub use graph::{derivation_graph, ensure_linear, extract_derivation, replay, Derivation, DerivationGraph, DerivationStep, Grounding};
pub use program::{Atom, DatalogProgram, Fragment, Predicate, Rule};
