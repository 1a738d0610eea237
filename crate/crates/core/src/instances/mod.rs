//! CSP instances, the brute-force oracle, path instances and path
//! decompositions.

mod csp;
mod decomposition;
mod dot;
mod oracle;
mod path;
pub mod search;

pub use csp::{induced_subinstance, Constraint, CspInstance, Issue, SatVerdict, Solution, ValidationReport, Var};
pub use decomposition::{check_path_decomposition, DecompositionIssue, PathDecomposition};
pub use dot::{microstructure_dot, unary_domains};
pub(crate) use dot::{escape, node};
pub use oracle::{brute_force_solutions, first_solution, is_satisfiable, OracleConfig, DEFAULT_ORACLE_BUDGET};
pub use path::PathInstance;
