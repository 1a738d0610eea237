//! JSON file formats. Relations are written as tuple lists; path
//! instances name a relation of the structure where one matches.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{builtin, Elem, Relation, RelationalStructure};
use crate::error::{Error, Result};
use crate::instances::{check_path_decomposition, CspInstance, PathDecomposition, PathInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub arity: usize,
    pub tuples: Vec<Vec<Elem>>,
}

impl RelationSpec {
    pub fn of(r: &Relation) -> Self {
        RelationSpec {
            arity: r.arity(),
            tuples: r.tuples().collect(),
        }
    }

    pub fn to_relation(&self, domain: usize) -> Result<Relation> {
        if let Some(t) = self.tuples.iter().find(|t| t.len() != self.arity) {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: t.len(),
            });
        }
        if let Some(&v) = self.tuples.iter().flatten().find(|&&v| v >= domain) {
            return Err(Error::ValueOutOfRange { value: v, domain });
        }
        Relation::from_tuples(domain, self.arity, self.tuples.iter().cloned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub domain_size: usize,
    pub relations: BTreeMap<String, RelationSpec>,
}

impl StructureFile {
    pub fn of(s: &RelationalStructure) -> Self {
        StructureFile {
            domain_size: s.domain_size(),
            relations: s.relations().map(|(n, r)| (n.to_string(), RelationSpec::of(r))).collect(),
        }
    }

    pub fn to_structure(&self) -> Result<RelationalStructure> {
        let mut s = RelationalStructure::new(self.domain_size)?;
        for (name, spec) in &self.relations {
            s.add_relation(name.clone(), spec.to_relation(self.domain_size)?)?;
        }
        Ok(s)
    }
}

pub fn structure_to_json(s: &RelationalStructure) -> String {
    to_json(&StructureFile::of(s))
}

pub fn structure_from_json(text: &str) -> Result<RelationalStructure> {
    serde_json::from_str::<StructureFile>(text)?.to_structure()
}

/// A built-in name (`AK2`, `AZ2`, `IMP2`) or a structure in JSON.
pub fn load_structure(name_or_json: &str) -> Result<RelationalStructure> {
    match builtin(name_or_json.trim()) {
        Some(s) => Ok(s),
        None => structure_from_json(name_or_json),
    }
}

/// A relation given by name in the structure or by its members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationRef {
    Name(String),
    Elements(Vec<Elem>),
    Tuples(Vec<Vec<Elem>>),
}

impl RelationRef {
    fn of(r: &Relation, s: Option<&RelationalStructure>) -> Self {
        if let Some(name) = s.and_then(|s| s.name_of(r)) {
            return RelationRef::Name(name.to_string());
        }
        if r.arity() == 1 {
            RelationRef::Elements(r.elements())
        } else {
            RelationRef::Tuples(r.tuples().collect())
        }
    }

    fn resolve(&self, s: Option<&RelationalStructure>, domain: usize, arity: usize) -> Result<Relation> {
        let r = match self {
            RelationRef::Name(n) => s
                .ok_or_else(|| Error::Format(format!("relation {n} named without a structure")))?
                .relation(n)?
                .clone(),
            RelationRef::Elements(e) if arity == 1 => {
                if let Some(&v) = e.iter().find(|&&v| v >= domain) {
                    return Err(Error::ValueOutOfRange { value: v, domain });
                }
                Relation::unary(domain, e.iter().copied())?
            }
            RelationRef::Elements(e) if e.is_empty() => Relation::empty(domain, arity)?,
            RelationRef::Elements(_) => return Err(Error::Format(format!("expected tuples of arity {arity}"))),
            RelationRef::Tuples(t) => RelationSpec {
                arity,
                tuples: t.clone(),
            }
            .to_relation(domain)?,
        };
        if r.arity() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: r.arity(),
            });
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub relation: String,
    pub scope: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceFile {
    Csp {
        variables: Vec<String>,
        constraints: Vec<ConstraintSpec>,
    },
    Path {
        domain: usize,
        unary: Vec<RelationRef>,
        binary: Vec<RelationRef>,
    },
}

/// A general instance or a path instance as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadedInstance {
    Csp(CspInstance),
    Path(PathInstance),
}

impl LoadedInstance {
    pub fn to_csp(&self) -> CspInstance {
        match self {
            LoadedInstance::Csp(i) => i.clone(),
            LoadedInstance::Path(p) => p.to_csp(),
        }
    }
}

/// A path instance over `s` itself, when every relation has a name in `s`.
pub fn path_as_named_csp(p: &PathInstance, s: &RelationalStructure) -> Option<CspInstance> {
    let mut i = CspInstance::new(Arc::new(s.clone()));
    for v in 1..=p.len() {
        i.add_variable(PathInstance::var_name(v));
    }
    for (v, r) in p.unaries().iter().enumerate() {
        if !r.is_full() {
            i.add_constraint(vec![v], s.name_of(r)?);
        }
    }
    for (v, r) in p.binaries().iter().enumerate() {
        if !r.is_full() {
            i.add_constraint(vec![v, v + 1], s.name_of(r)?);
        }
    }
    Some(i)
}

pub fn csp_to_json(i: &CspInstance) -> String {
    to_json(&InstanceFile::Csp {
        variables: i.var_names().to_vec(),
        constraints: i
            .constraints()
            .iter()
            .map(|c| ConstraintSpec {
                relation: c.relation.clone(),
                scope: c.scope.iter().map(|&v| i.var_name(v).to_string()).collect(),
            })
            .collect(),
    })
}

/// Relations equal to one of `s` are written by name.
pub fn path_to_json(p: &PathInstance, s: Option<&RelationalStructure>) -> String {
    to_json(&InstanceFile::Path {
        domain: p.domain(),
        unary: p.unaries().iter().map(|r| RelationRef::of(r, s)).collect(),
        binary: p.binaries().iter().map(|r| RelationRef::of(r, s)).collect(),
    })
}

pub fn instance_from_json(text: &str, s: &RelationalStructure) -> Result<LoadedInstance> {
    match serde_json::from_str::<InstanceFile>(text)? {
        InstanceFile::Csp {
            variables,
            constraints,
        } => {
            let mut i = CspInstance::new(Arc::new(s.clone()));
            for v in &variables {
                i.add_variable(v.clone());
            }
            for c in constraints {
                let scope = c
                    .scope
                    .iter()
                    .map(|n| i.var(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
                    .collect::<Result<_>>()?;
                i.add_constraint(scope, c.relation);
            }
            let report = i.validate();
            if !report.is_ok() {
                let issues: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
                return Err(Error::Format(issues.join("; ")));
            }
            Ok(LoadedInstance::Csp(i))
        }
        InstanceFile::Path { domain, unary, binary } => {
            if domain != s.domain_size() {
                return Err(Error::DomainMismatch {
                    expected: s.domain_size(),
                    found: domain,
                });
            }
            let u = unary.iter().map(|r| r.resolve(Some(s), domain, 1)).collect::<Result<_>>()?;
            let b = binary.iter().map(|r| r.resolve(Some(s), domain, 2)).collect::<Result<_>>()?;
            Ok(LoadedInstance::Path(PathInstance::new(domain, u, b)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub width: usize,
    pub bags: Vec<Vec<String>>,
}

pub fn decomposition_to_json(d: &PathDecomposition, i: &CspInstance) -> String {
    to_json(&DecompositionFile {
        width: d.width,
        bags: d
            .bags
            .iter()
            .map(|b| b.iter().map(|&v| i.var_name(v).to_string()).collect())
            .collect(),
    })
}

/// Reads bags by variable name and validates them against `i`.
pub fn decomposition_from_json(text: &str, i: &CspInstance) -> Result<PathDecomposition> {
    let f: DecompositionFile = serde_json::from_str(text)?;
    let bags = f
        .bags
        .iter()
        .map(|b| {
            b.iter()
                .map(|n| i.var(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
                .collect::<Result<BTreeSet<_>>>()
        })
        .collect::<Result<_>>()?;
    let d = PathDecomposition::new(bags, f.width);
    if !check_path_decomposition(i, &d) {
        let issues: Vec<String> = d.issues(i).iter().map(ToString::to_string).collect();
        return Err(Error::InvalidDecomposition(issues.join("; ")));
    }
    Ok(d)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}
