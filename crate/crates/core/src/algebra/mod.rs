//! Finite relational structures, operations and Hagemann-Mitschke chains.

mod hm;
mod operation;
mod relation;
mod structure;
mod unpack;

pub use hm::{chain_is_polymorphic, chain_preserves, find_hm_chain, verify_hm_chain, HmChain, HmViolation};
pub use operation::{
    check_preserves, enumerate_idempotent_polymorphisms, enumerate_polymorphisms, is_polymorphism,
    EnumerationConfig, OperationTable, DEFAULT_ENUMERATION_BUDGET,
};
pub use relation::{checked_pow, decode, encode, AllTuples, Elem, Relation, MAX_RELATION_SLOTS};
pub use structure::{ak2, az2, builtin, imp2, RelationalStructure, BUILTIN_NAMES};
pub use unpack::{pack_tuple, unpack, unpack_relation};
