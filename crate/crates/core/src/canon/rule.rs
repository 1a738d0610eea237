use std::collections::HashMap;

use crate::algebra::{Relation, RelationalStructure};
use crate::error::{Error, Result};
use crate::instances::search::{Atom, Search};
use crate::instances::Var;

use super::fact::Fact;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemanticAtom {
    pub relation: Relation,
    pub vars: Vec<usize>,
}

/// A rule whose predicates are relations on the domain, read as the
/// implication `body ⇒ head` over rule variables `0..num_vars()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemanticRule {
    pub head: SemanticAtom,
    pub body: Vec<SemanticAtom>,
    pub idb_position: Option<usize>,
}

impl SemanticRule {
    pub fn num_vars(&self) -> usize {
        std::iter::once(&self.head)
            .chain(&self.body)
            .flat_map(|a| a.vars.iter())
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn mirror(&self) -> Result<SemanticRule> {
        let pos = self
            .idb_position
            .ok_or_else(|| Error::Precondition("rule has no IDB body atom".into()))?;
        let mut m = self.clone();
        std::mem::swap(&mut m.head, &mut m.body[pos]);
        Ok(m)
    }

    /// Repetition among the EDB atoms. The IDB atom is a separate
    /// predicate even when it carries the same relation as a side atom.
    pub fn has_repeated_body_atom(&self) -> bool {
        let side: Vec<&SemanticAtom> = (0..self.body.len())
            .filter(|&j| Some(j) != self.idb_position)
            .map(|j| &self.body[j])
            .collect();
        side.iter().enumerate().any(|(i, a)| side[..i].contains(a))
    }

    /// Renumbers a grounded step over instance variables into rule
    /// variables, in order of first appearance.
    pub fn from_step(head: &Fact, idb: Option<&Fact>, side: &[(&[Var], &Relation)]) -> SemanticRule {
        let mut local: HashMap<Var, usize> = HashMap::new();
        let mut map = |vs: &[Var]| -> Vec<usize> {
            vs.iter()
                .map(|&v| {
                    let n = local.len();
                    *local.entry(v).or_insert(n)
                })
                .collect()
        };
        let head_atom = SemanticAtom {
            vars: map(head.vars()),
            relation: head.relation().clone(),
        };
        let mut body = Vec::new();
        if let Some(f) = idb {
            body.push(SemanticAtom {
                vars: map(f.vars()),
                relation: f.relation().clone(),
            });
        }
        for (scope, rel) in side {
            body.push(SemanticAtom {
                vars: map(scope),
                relation: (*rel).clone(),
            });
        }
        SemanticRule {
            head: head_atom,
            body,
            idb_position: idb.map(|_| 0),
        }
    }
}

fn check_atom(a: &SemanticAtom, d: usize) -> Result<()> {
    if a.relation.domain() != d {
        return Err(Error::DomainMismatch {
            expected: d,
            found: a.relation.domain(),
        });
    }
    if a.relation.arity() != a.vars.len() {
        return Err(Error::ArityMismatch {
            expected: a.relation.arity(),
            found: a.vars.len(),
        });
    }
    Ok(())
}

/// Every assignment satisfying the body satisfies the head.
pub fn rule_consistent(rule: &SemanticRule, s: &RelationalStructure) -> Result<bool> {
    implication_holds(rule, s.domain_size())
}

pub(crate) fn implication_holds(rule: &SemanticRule, d: usize) -> Result<bool> {
    check_atom(&rule.head, d)?;
    for a in &rule.body {
        check_atom(a, d)?;
    }
    let atoms: Vec<Atom> = rule
        .body
        .iter()
        .map(|a| Atom {
            scope: &a.vars,
            relation: &a.relation,
        })
        .collect();
    let mut ok = true;
    let mut t = Vec::with_capacity(rule.head.vars.len());
    let _ = Search::new(rule.num_vars(), d, &atoms).run(&[], &mut |f| {
        t.clear();
        t.extend(rule.head.vars.iter().map(|&x| f[x]));
        if rule.head.relation.contains(&t) {
            std::ops::ControlFlow::Continue(())
        } else {
            ok = false;
            std::ops::ControlFlow::Break(())
        }
    });
    Ok(ok)
}

/// The rule and its mirror image are both consistent.
pub fn symmetric_pair_consistent(rule: &SemanticRule, s: &RelationalStructure) -> Result<bool> {
    let m = rule.mirror()?;
    Ok(rule_consistent(rule, s)? && rule_consistent(&m, s)?)
}
