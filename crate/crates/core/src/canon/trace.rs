use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::Relation;
use crate::error::{Error, Result};
use crate::instances::{CspInstance, Var};

use super::derivation::{Derivation, SideAtom, Step};
use super::fact::Fact;

#[derive(Serialize, Deserialize)]
struct RelationEntry {
    id: usize,
    domain: usize,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize, PartialEq)]
struct AtomRecord {
    relation: usize,
    tuple: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SideRecord {
    relation: String,
    scope: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RuleRecord {
    idb_atom: Option<AtomRecord>,
    side_atoms: Vec<SideRecord>,
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    head: AtomRecord,
    rule: RuleRecord,
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    variables: Vec<String>,
    relations: Vec<RelationEntry>,
    premise: Option<AtomRecord>,
    steps: Vec<StepRecord>,
}

struct Dictionary {
    ids: BTreeMap<Relation, usize>,
    entries: Vec<RelationEntry>,
}

impl Dictionary {
    fn id(&mut self, r: &Relation) -> usize {
        if let Some(&id) = self.ids.get(r) {
            return id;
        }
        let id = self.entries.len();
        self.entries.push(RelationEntry {
            id,
            domain: r.domain(),
            arity: r.arity(),
            tuples: r.tuples().collect(),
        });
        self.ids.insert(r.clone(), id);
        id
    }
}

/// Replayable JSON text for a derivation over `i`.
pub fn derivation_to_trace(i: &CspInstance, d: &Derivation) -> Result<String> {
    let mut dict = Dictionary {
        ids: BTreeMap::new(),
        entries: Vec::new(),
    };
    let names = |vs: &[Var]| -> Vec<String> { vs.iter().map(|&v| i.var_name(v).to_string()).collect() };
    let mut atom = |f: &Fact| AtomRecord {
        relation: dict.id(f.relation()),
        tuple: names(f.vars()),
    };
    let premise = d.premise.as_ref().map(&mut atom);
    let mut prev = d.premise.clone();
    let mut steps = Vec::new();
    for s in &d.steps {
        steps.push(StepRecord {
            head: atom(&s.head),
            rule: RuleRecord {
                idb_atom: prev.as_ref().map(&mut atom),
                side_atoms: s
                    .side
                    .iter()
                    .map(|a| SideRecord {
                        relation: a.relation.clone(),
                        scope: names(&a.scope),
                    })
                    .collect(),
            },
        });
        prev = Some(s.head.clone());
    }
    let file = TraceFile {
        variables: i.var_names().to_vec(),
        relations: dict.entries,
        premise,
        steps,
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

/// Parses trace text back into a derivation over `i`.
pub fn trace_to_derivation(i: &CspInstance, text: &str) -> Result<Derivation> {
    let file: TraceFile = serde_json::from_str(text)?;
    let mut rels = Vec::with_capacity(file.relations.len());
    for (k, e) in file.relations.iter().enumerate() {
        if e.id != k {
            return Err(Error::Format(format!("relation ids must be 0..n, found {}", e.id)));
        }
        rels.push(Relation::from_tuples(e.domain, e.arity, &e.tuples)?);
    }
    let var = |name: &String| i.var(name).ok_or_else(|| Error::UnknownVariable(name.clone()));
    let fact = |a: &AtomRecord| -> Result<Fact> {
        let rel = rels
            .get(a.relation)
            .ok_or_else(|| Error::Format(format!("unknown relation id {}", a.relation)))?;
        let tuple: Vec<Var> = a.tuple.iter().map(var).collect::<Result<_>>()?;
        Fact::new(&tuple, rel)
    };
    let premise = file.premise.as_ref().map(fact).transpose()?;
    let mut prev = premise.clone();
    let mut steps = Vec::new();
    for (k, s) in file.steps.iter().enumerate() {
        let idb = s.rule.idb_atom.as_ref().map(fact).transpose()?;
        if idb != prev {
            return Err(Error::Format(format!("step {k}: IDB atom is not the previous head")));
        }
        let head = fact(&s.head)?;
        let side = s
            .rule
            .side_atoms
            .iter()
            .map(|a| Ok(SideAtom::new(a.relation.clone(), a.scope.iter().map(var).collect::<Result<_>>()?)))
            .collect::<Result<_>>()?;
        prev = Some(head.clone());
        steps.push(Step { head, side });
    }
    Ok(Derivation { premise, steps })
}

/// Hex SHA-256 of the trace text; used as its file name.
pub fn trace_id(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
