use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, Relation, RelationalStructure};
use crate::error::{Error, Result};

use super::search::{Atom, Search};

pub type Var = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub scope: Vec<Var>,
    pub relation: String,
}

/// Variables (interned to `0..n`) and constraints naming relations of an
/// attached structure. Duplicate constraints are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    structure: Arc<RelationalStructure>,
    names: Vec<String>,
    index: HashMap<String, Var>,
    constraints: Vec<Constraint>,
}

/// A total assignment, indexed by variable id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Solution(pub Vec<Elem>);

impl Solution {
    pub fn get(&self, v: Var) -> Elem {
        self.0[v]
    }

    pub fn values(&self) -> &[Elem] {
        &self.0
    }
}

/// Outcome of a decision procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatVerdict {
    pub satisfiable: bool,
    pub witness: Option<Solution>,
    pub refutation: Option<String>,
}

impl SatVerdict {
    pub fn sat(witness: Solution) -> Self {
        SatVerdict {
            satisfiable: true,
            witness: Some(witness),
            refutation: None,
        }
    }

    pub fn unsat(refutation: Option<String>) -> Self {
        SatVerdict {
            satisfiable: false,
            witness: None,
            refutation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    ArityMismatch {
        constraint: usize,
        expected: usize,
        found: usize,
    },
    UnknownRelation {
        constraint: usize,
        name: String,
    },
    VariableOutOfRange {
        constraint: usize,
        var: Var,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::ArityMismatch {
                constraint,
                expected,
                found,
            } => write!(
                f,
                "constraint {constraint}: relation has arity {expected}, scope has length {found}"
            ),
            Issue::UnknownRelation { constraint, name } => {
                write!(f, "constraint {constraint}: unknown relation `{name}`")
            }
            Issue::VariableOutOfRange { constraint, var } => {
                write!(f, "constraint {constraint}: variable {var} is not declared")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl CspInstance {
    pub fn new(structure: impl Into<Arc<RelationalStructure>>) -> Self {
        CspInstance {
            structure: structure.into(),
            names: Vec::new(),
            index: HashMap::new(),
            constraints: Vec::new(),
        }
    }

    /// An instance with variables named `v1 … vn`.
    pub fn with_variables(structure: impl Into<Arc<RelationalStructure>>, n: usize) -> Self {
        let mut out = Self::new(structure);
        for i in 1..=n {
            out.add_variable(format!("v{i}"));
        }
        out
    }

    /// Interns a variable; returns the existing id for a known name.
    pub fn add_variable(&mut self, name: impl Into<String>) -> Var {
        let name = name.into();
        if let Some(&v) = self.index.get(&name) {
            return v;
        }
        let v = self.names.len();
        self.index.insert(name.clone(), v);
        self.names.push(name);
        v
    }

    pub fn add_constraint(&mut self, scope: Vec<Var>, relation: impl Into<String>) {
        self.constraints.push(Constraint {
            scope,
            relation: relation.into(),
        });
    }

    /// Like [`add_constraint`](Self::add_constraint) but by variable names,
    /// interning unknown names.
    pub fn add_named_constraint(&mut self, scope: &[&str], relation: impl Into<String>) {
        let vars = scope.iter().map(|n| self.add_variable(*n)).collect();
        self.add_constraint(vars, relation);
    }

    pub fn structure(&self) -> &RelationalStructure {
        &self.structure
    }

    pub fn structure_arc(&self) -> &Arc<RelationalStructure> {
        &self.structure
    }

    pub fn domain_size(&self) -> usize {
        self.structure.domain_size()
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.names[v]
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn relation_of(&self, c: &Constraint) -> Result<&Relation> {
        self.structure.relation(&c.relation)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            match self.structure.get(&c.relation) {
                None => issues.push(Issue::UnknownRelation {
                    constraint: i,
                    name: c.relation.clone(),
                }),
                Some(r) if r.arity() != c.scope.len() => issues.push(Issue::ArityMismatch {
                    constraint: i,
                    expected: r.arity(),
                    found: c.scope.len(),
                }),
                _ => {}
            }
            for &v in &c.scope {
                if v >= self.names.len() {
                    issues.push(Issue::VariableOutOfRange {
                        constraint: i,
                        var: v,
                    });
                }
            }
        }
        ValidationReport { issues }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.validate().issues.into_iter().next() {
            None => Ok(()),
            Some(Issue::UnknownRelation { name, .. }) => Err(Error::UnknownRelation(name)),
            Some(Issue::ArityMismatch {
                expected, found, ..
            }) => Err(Error::ArityMismatch { expected, found }),
            Some(Issue::VariableOutOfRange { var, .. }) => Err(Error::VariableOutOfRange(var)),
        }
    }

    pub(crate) fn atoms(&self) -> Result<Vec<Atom<'_>>> {
        self.ensure_valid()?;
        self.constraints
            .iter()
            .map(|c| {
                Ok(Atom {
                    scope: &c.scope,
                    relation: self.relation_of(c)?,
                })
            })
            .collect()
    }

    pub(crate) fn search(&self) -> Result<Search<'_>> {
        Ok(Search::new(self.num_vars(), self.domain_size(), &self.atoms()?))
    }

    pub fn is_solution(&self, values: &[Elem]) -> bool {
        values.len() == self.num_vars()
            && values.iter().all(|&a| a < self.domain_size())
            && self.constraints.iter().all(|c| {
                let t: Vec<Elem> = c.scope.iter().map(|&v| values[v]).collect();
                self.structure.get(&c.relation).is_some_and(|r| r.contains(&t))
            })
    }

    /// Same variables and structure, no constraints.
    pub fn without_constraints(&self) -> Self {
        CspInstance {
            structure: self.structure.clone(),
            names: self.names.clone(),
            index: self.index.clone(),
            constraints: Vec::new(),
        }
    }
}

/// The subinstance on `u`, variables renumbered in increasing order.
/// Returns the instance and the map from new ids to old ids.
pub fn induced_subinstance(i: &CspInstance, u: &BTreeSet<Var>) -> Result<(CspInstance, Vec<Var>)> {
    if let Some(&v) = u.iter().find(|&&v| v >= i.num_vars()) {
        return Err(Error::VariableOutOfRange(v));
    }
    let old: Vec<Var> = u.iter().copied().collect();
    let mut new_of = vec![usize::MAX; i.num_vars()];
    let mut out = CspInstance::new(i.structure.clone());
    for &v in &old {
        new_of[v] = out.add_variable(i.var_name(v));
    }
    for c in &i.constraints {
        if c.scope.iter().all(|v| u.contains(v)) {
            out.add_constraint(c.scope.iter().map(|&v| new_of[v]).collect(), c.relation.clone());
        }
    }
    Ok((out, old))
}
