//! Path instances: forward sets and backward edges, braids and their
//! zigzag solutions, `λ` reachability, the `I_λ` and shrinking reductions,
//! and the recursive decision procedure built from them.

mod bounds;
mod braid;
mod lambda;
mod profile;
mod reduce;
mod solve;

pub use bounds::{f_bound, BoundsReport};
pub use braid::{braid_to_solution, find_braid, Braid, BraidSearch, MarkedEdge};
pub use lambda::{forward_relation, lambda_derivation, lambda_relation, rho_facts, rho_relations, LambdaRelation};
pub use profile::{forward_sets, is_subdirect_at, path_profile, BackwardEdge, PathProfile};
pub use reduce::{build_i_lambda, interval_solution_sets, shrink_instance, solution_values, IntervalSolutionSets, LambdaReduction, Shrunk};
pub use solve::{check_refutation, solve_path, LevelStats, PathSolverConfig, PathVerdict, SolveStats};
