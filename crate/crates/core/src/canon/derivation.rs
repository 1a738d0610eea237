use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instances::{CspInstance, Var};

use super::config::CanonConfig;
use super::fact::Fact;
use super::rule::{implication_holds, SemanticRule};

/// A basic constraint `R(scope)` of the instance used as a side atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SideAtom {
    pub relation: String,
    pub scope: Vec<Var>,
}

impl SideAtom {
    pub fn new(relation: impl Into<String>, scope: Vec<Var>) -> Self {
        SideAtom {
            relation: relation.into(),
            scope,
        }
    }
}

/// One rule application: `head ← previous, side…`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub head: Fact,
    pub side: Vec<SideAtom>,
}

/// A path in the derivation graph of the canonical program.
///
/// Without a premise the first step has no IDB body atom (usually the seed
/// `A(v) ←`); every later step consumes the previous head. With a premise
/// the first step consumes the premise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub premise: Option<Fact>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub final_fact: Fact,
    /// Largest number of variables in any rule used.
    pub width: usize,
    pub steps: usize,
}

impl Derivation {
    /// `A(v) ←`.
    pub fn seed(domain: usize, v: Var) -> Derivation {
        Derivation {
            premise: None,
            steps: vec![Step {
                head: Fact::full(domain, &[v]).expect("unary relation"),
                side: Vec::new(),
            }],
        }
    }

    pub fn final_fact(&self) -> Option<&Fact> {
        self.steps.last().map(|s| &s.head).or(self.premise.as_ref())
    }

    /// Premise (if any) followed by every head.
    pub fn facts(&self) -> Vec<&Fact> {
        self.premise
            .iter()
            .chain(self.steps.iter().map(|s| &s.head))
            .collect()
    }

    pub fn push(&mut self, head: Fact, side: Vec<SideAtom>) {
        self.steps.push(Step { head, side });
    }

    pub fn append(&mut self, other: Derivation) {
        self.steps.extend(other.steps);
    }

    /// The same path walked backwards, through mirror rules. A derivation
    /// without a premise reverses to one ending at its first head.
    pub fn reversed(&self) -> Derivation {
        let facts = self.facts();
        let n = facts.len();
        let mut steps = Vec::new();
        let offset = usize::from(self.premise.is_none());
        // the move facts[j] → facts[j+1] is steps[j + offset]
        for j in (0..n - 1).rev() {
            let producer = &self.steps[j + offset];
            steps.push(Step {
                head: facts[j].clone(),
                side: producer.side.clone(),
            });
        }
        Derivation {
            premise: facts.last().map(|f| (*f).clone()),
            steps,
        }
    }
}

/// Checks every step: side atoms are constraints of `i`, the rule and (for
/// steps consuming a fact) its mirror are consistent, the rule fits in the
/// configured width, and each head lies in the predicate family.
pub fn replay(i: &CspInstance, d: &Derivation, cfg: &CanonConfig) -> Result<ReplayReport> {
    let s = i.structure();
    let dom = s.domain_size();
    let constraints: HashSet<(&str, &[Var])> = i
        .constraints()
        .iter()
        .map(|c| (c.relation.as_str(), c.scope.as_slice()))
        .collect();
    let fail = |step: usize, reason: String| Error::Replay { step, reason };
    let mut prev = d.premise.as_ref();
    let mut width = 0;
    for (k, step) in d.steps.iter().enumerate() {
        let mut side = Vec::with_capacity(step.side.len());
        for a in &step.side {
            if !constraints.contains(&(a.relation.as_str(), a.scope.as_slice())) {
                return Err(fail(k, format!("side atom {}{:?} is not a constraint", a.relation, a.scope)));
            }
            side.push((a.scope.as_slice(), s.relation(&a.relation)?));
        }
        if step.head.domain() != dom {
            return Err(fail(k, "head over the wrong domain".into()));
        }
        let rule = SemanticRule::from_step(&step.head, prev, &side);
        if rule.has_repeated_body_atom() {
            return Err(fail(k, "repeated body atom".into()));
        }
        let n = rule.num_vars();
        width = width.max(n);
        if n > cfg.width {
            return Err(fail(k, format!("rule uses {n} variables, width is {}", cfg.width)));
        }
        if !implication_holds(&rule, dom)? {
            return Err(fail(k, format!("rule deriving {} is inconsistent", step.head)));
        }
        if rule.idb_position.is_some() && !implication_holds(&rule.mirror()?, dom)? {
            return Err(fail(k, format!("mirror of the rule deriving {} is inconsistent", step.head)));
        }
        if !cfg.family.contains(step.head.relation()) {
            return Err(fail(k, format!("{} is outside the predicate family", step.head)));
        }
        prev = Some(&step.head);
    }
    let final_fact = prev
        .cloned()
        .ok_or_else(|| fail(0, "empty derivation".into()))?;
    Ok(ReplayReport {
        final_fact,
        width,
        steps: d.steps.len(),
    })
}
