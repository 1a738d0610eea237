//! The canonical width-`r` symmetric program, evaluated lazily through
//! semantic consistency checks, and the derivation transformers that
//! compose derivations.

mod config;
mod derivation;
mod evaluate;
mod fact;
mod rule;
mod stacking;
mod trace;

pub use config::{CanonConfig, Family, DEFAULT_RELATION_CAP};
pub use derivation::{replay, Derivation, ReplayReport, SideAtom, Step};
pub use evaluate::{canon_evaluate, derive_instance, family_size, CanonFactStore, CanonRun, DeriveOutcome};
pub use fact::Fact;
pub use rule::{rule_consistent, symmetric_pair_consistent, SemanticAtom, SemanticRule};
pub use stacking::{conjoin_derivation, constraint_derivation, stack_derivation, window_derivation, StackSpec};
pub use trace::{derivation_to_trace, trace_id, trace_to_derivation};
