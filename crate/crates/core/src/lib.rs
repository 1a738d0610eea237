//! Finite-domain constraint satisfaction and symmetric Datalog.
//!
//! The crate is layered bottom-up:
//!
//! * [`algebra`]: relations, structures, polymorphisms, Hagemann-Mitschke chains
//! * [`instances`]: CSP instances, the brute-force oracle, path instances
//! * [`engine`]: a Datalog engine with linear/symmetric classification
//! * [`canon`]: the canonical width-`r` symmetric program and derivation stacking
//! * [`pathsolver`]: the recursive decision procedure for path instances
//! * [`bubble`]: bubble powers and the bounded-pathwidth pipeline
//! * [`workbench`]: file formats, generators, experiments and exports

pub mod algebra;
pub mod bubble;
pub mod canon;
pub mod engine;
mod error;
pub mod exec;
pub mod instances;
pub mod pathsolver;
pub mod workbench;

pub use error::{Error, Result};
pub use exec::Exec;
