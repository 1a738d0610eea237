use std::collections::BTreeSet;

use crate::algebra::Relation;

/// Default cap on `Σ_{n≤r} 2^(|A|^n)` for the full predicate family.
pub const DEFAULT_RELATION_CAP: u64 = 1024;

/// Which relations may label derived statements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Every relation of arity at most the width.
    All,
    /// Only these (normal-form) relations.
    Explicit(BTreeSet<Relation>),
}

impl Family {
    pub fn explicit(relations: impl IntoIterator<Item = Relation>) -> Family {
        Family::Explicit(relations.into_iter().collect())
    }

    pub fn contains(&self, r: &Relation) -> bool {
        match self {
            Family::All => true,
            Family::Explicit(s) => s.contains(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonConfig {
    /// Maximum number of variables per rule.
    pub width: usize,
    pub family: Family,
    pub relation_cap: u64,
    /// Stop at the first empty relation.
    pub stop_at_goal: bool,
}

impl CanonConfig {
    pub fn all(width: usize) -> Self {
        CanonConfig {
            width,
            family: Family::All,
            relation_cap: DEFAULT_RELATION_CAP,
            stop_at_goal: false,
        }
    }

    pub fn explicit(width: usize, relations: impl IntoIterator<Item = Relation>) -> Self {
        CanonConfig {
            family: Family::explicit(relations),
            ..Self::all(width)
        }
    }
}
