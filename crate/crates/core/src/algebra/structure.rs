use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::relation::Relation;

/// A finite domain `{0, …, domain_size−1}` with named relations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationalStructure {
    domain_size: usize,
    relations: BTreeMap<String, Relation>,
}

impl RelationalStructure {
    pub fn new(domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Precondition("domain must be non-empty".into()));
        }
        Ok(RelationalStructure {
            domain_size,
            relations: BTreeMap::new(),
        })
    }

    pub fn with_relation(mut self, name: impl Into<String>, rel: Relation) -> Result<Self> {
        self.add_relation(name, rel)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, name: impl Into<String>, rel: Relation) -> Result<()> {
        if rel.domain() != self.domain_size {
            return Err(Error::DomainMismatch {
                expected: self.domain_size,
                found: rel.domain(),
            });
        }
        self.relations.insert(name.into(), rel);
        Ok(())
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.get(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(|k| k.as_str())
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Name of the first relation equal to `rel`, if any.
    pub fn name_of(&self, rel: &Relation) -> Option<&str> {
        self.relations
            .iter()
            .find(|(_, r)| *r == rel)
            .map(|(k, _)| k.as_str())
    }
}

fn boolean(pairs: &[(&str, Relation)]) -> RelationalStructure {
    let mut s = RelationalStructure::new(2).unwrap();
    for (name, rel) in pairs {
        s.add_relation(*name, rel.clone()).unwrap();
    }
    s
}

fn neq() -> Relation {
    Relation::from_tuples(2, 2, [[0, 1], [1, 0]]).unwrap()
}

fn c(a: usize) -> Relation {
    Relation::unary(2, [a]).unwrap()
}

/// `({0,1}; NEQ, C0, C1)`.
pub fn ak2() -> RelationalStructure {
    boolean(&[("NEQ", neq()), ("C0", c(0)), ("C1", c(1))])
}

/// `({0,1}; EQ, NEQ, C0, C1)`.
pub fn az2() -> RelationalStructure {
    boolean(&[
        ("EQ", Relation::equality(2).unwrap()),
        ("NEQ", neq()),
        ("C0", c(0)),
        ("C1", c(1)),
    ])
}

/// `({0,1}; IMP, C0, C1)` with `IMP = {(0,0),(0,1),(1,1)}`.
pub fn imp2() -> RelationalStructure {
    boolean(&[
        (
            "IMP",
            Relation::from_tuples(2, 2, [[0, 0], [0, 1], [1, 1]]).unwrap(),
        ),
        ("C0", c(0)),
        ("C1", c(1)),
    ])
}

/// Look up one of the built-in structures by name.
pub fn builtin(name: &str) -> Option<RelationalStructure> {
    match name.to_ascii_uppercase().as_str() {
        "AK2" => Some(ak2()),
        "AZ2" => Some(az2()),
        "IMP2" | "IMP" => Some(imp2()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: &[&str] = &["AK2", "AZ2", "IMP2"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        assert_eq!(ak2().len(), 3);
        assert_eq!(az2().relation("EQ").unwrap().len(), 2);
        assert!(builtin("imp2").is_some());
        assert!(builtin("nope").is_none());
        assert!(matches!(ak2().relation("EQ"), Err(Error::UnknownRelation(_))));
    }

    #[test]
    fn rejects_foreign_domain() {
        let mut s = RelationalStructure::new(3).unwrap();
        assert!(s.add_relation("R", neq()).is_err());
        assert!(RelationalStructure::new(0).is_err());
    }
}
