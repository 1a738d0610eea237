use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instances::{CspInstance, Var};

use super::program::{Atom, DatalogProgram, Rule};

/// A ground atom: predicate id and a tuple of instance variables.
pub type Fact = (usize, Vec<Var>);

/// Derived relations `R^V`, one tuple set per predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactStore {
    names: Vec<String>,
    facts: Vec<BTreeSet<Vec<Var>>>,
}

impl FactStore {
    pub fn get(&self, name: &str) -> Option<&BTreeSet<Vec<Var>>> {
        self.names.iter().position(|n| n == name).map(|p| &self.facts[p])
    }

    pub fn by_id(&self, p: usize) -> &BTreeSet<Vec<Var>> {
        &self.facts[p]
    }

    pub fn contains(&self, name: &str, tuple: &[Var]) -> bool {
        self.get(name).is_some_and(|s| s.contains(tuple))
    }

    pub fn contains_fact(&self, f: &Fact) -> bool {
        self.facts[f.0].contains(&f.1)
    }

    pub fn len(&self) -> usize {
        self.facts.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Fact> + '_ {
        self.facts
            .iter()
            .enumerate()
            .flat_map(|(p, s)| s.iter().map(move |t| (p, t.clone())))
    }

    /// Is every fact of `self` also in `other`?
    pub fn is_subset(&self, other: &FactStore) -> bool {
        self.facts.len() == other.facts.len()
            && self.facts.iter().zip(&other.facts).all(|(a, b)| a.is_subset(b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Stop as soon as a goal fact is derived.
    pub short_circuit: bool,
    pub exec: Exec,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            short_circuit: true,
            exec: Exec::Sequential,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub store: FactStore,
    pub goal_reached: bool,
    pub goal_fact: Option<Fact>,
    pub rounds: usize,
}

/// EDB facts of `i`; every relation name must be a declared EDB.
pub(crate) fn edb_facts(p: &DatalogProgram, i: &CspInstance) -> Result<Vec<Fact>> {
    let mut out = Vec::new();
    for c in i.constraints() {
        let id = p
            .predicate_id(&c.relation)
            .map_err(|_| Error::UnknownRelation(c.relation.clone()))?;
        let pred = p.predicate(id);
        if pred.idb {
            return Err(Error::Precondition(format!(
                "instance relation `{}` is declared as an IDB",
                c.relation
            )));
        }
        if pred.arity != c.scope.len() {
            return Err(Error::ArityMismatch {
                expected: pred.arity,
                found: c.scope.len(),
            });
        }
        if let Some(&v) = c.scope.iter().find(|&&v| v >= i.num_vars()) {
            return Err(Error::VariableOutOfRange(v));
        }
        out.push((id, c.scope.clone()));
    }
    Ok(out)
}

/// Calls `emit` for every head tuple obtained by joining `body` left to
/// right; `source(j)` gives the candidate tuples for atom `j`. Variables
/// not bound by the body range over `0..num_vars`.
pub(crate) fn ground<'a>(
    rule: &Rule,
    atoms: &[&Atom],
    source: &dyn Fn(usize) -> &'a [Vec<Var>],
    num_vars: usize,
    emit: &mut dyn FnMut(&[Var]),
) {
    let mut bind = vec![usize::MAX; rule.vars.len()];
    join(rule, atoms, 0, source, num_vars, &mut bind, emit);
}

fn join<'a>(
    rule: &Rule,
    atoms: &[&Atom],
    j: usize,
    source: &dyn Fn(usize) -> &'a [Vec<Var>],
    num_vars: usize,
    bind: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[Var]),
) {
    if j == atoms.len() {
        let free: Vec<usize> = (0..rule.vars.len()).filter(|&v| bind[v] == usize::MAX).collect();
        enumerate_free(&free, 0, num_vars, bind, emit);
        return;
    }
    let atom = atoms[j];
    for t in source(j) {
        let mut newly = Vec::new();
        let ok = atom.args.iter().zip(t).all(|(&x, &val)| {
            if bind[x] == usize::MAX {
                bind[x] = val;
                newly.push(x);
                true
            } else {
                bind[x] == val
            }
        });
        if ok {
            join(rule, atoms, j + 1, source, num_vars, bind, emit);
        }
        for x in newly {
            bind[x] = usize::MAX;
        }
    }
}

fn enumerate_free(free: &[usize], k: usize, num_vars: usize, bind: &mut Vec<usize>, emit: &mut dyn FnMut(&[Var])) {
    if k == free.len() {
        emit(bind);
        return;
    }
    for v in 0..num_vars {
        bind[free[k]] = v;
        enumerate_free(free, k + 1, num_vars, bind, emit);
    }
    bind[free[k]] = usize::MAX;
}

/// Semi-naive least fixpoint of `p` on the EDB facts of `i`.
pub fn evaluate(p: &DatalogProgram, i: &CspInstance, opts: &EvalOptions) -> Result<Evaluation> {
    let npred = p.predicates().len();
    let mut lists: Vec<Vec<Vec<Var>>> = vec![Vec::new(); npred];
    let mut seen: Vec<HashSet<Vec<Var>>> = vec![HashSet::new(); npred];
    for (id, t) in edb_facts(p, i)? {
        if seen[id].insert(t.clone()) {
            lists[id].push(t);
        }
    }
    let n = i.num_vars();
    let mut goal_fact = None;
    // delta ranges: facts of predicate q with index in [lo[q], hi[q]) are new
    let mut lo = vec![0usize; npred];
    let mut hi: Vec<usize> = lists.iter().map(|l| l.len()).collect();
    let mut rounds = 0;
    let mut first = true;
    loop {
        // (rule, delta position) tasks for this round
        let mut tasks: Vec<(usize, Option<usize>)> = Vec::new();
        for (r, rule) in p.rules().iter().enumerate() {
            let idb = p.idb_positions(rule);
            if first && idb.is_empty() {
                tasks.push((r, None));
            }
            for j in idb {
                if hi[rule.body[j].predicate] > lo[rule.body[j].predicate] {
                    tasks.push((r, Some(j)));
                }
            }
        }
        if tasks.is_empty() {
            break;
        }
        rounds += 1;
        let snapshot = &lists;
        let (lo_ref, hi_ref) = (&lo, &hi);
        let produced: Vec<Vec<Fact>> = opts.exec.map(&tasks, |&(r, delta)| {
            let rule = &p.rules()[r];
            let atoms: Vec<&Atom> = rule.body.iter().collect();
            let source = |j: usize| -> &[Vec<Var>] {
                let q = rule.body[j].predicate;
                if Some(j) == delta {
                    &snapshot[q][lo_ref[q]..hi_ref[q]]
                } else {
                    &snapshot[q][..hi_ref[q]]
                }
            };
            let mut out = Vec::new();
            ground(rule, &atoms, &source, n, &mut |bind| {
                let t: Vec<Var> = rule.head.args.iter().map(|&x| bind[x]).collect();
                out.push((rule.head.predicate, t));
            });
            out
        });
        first = false;
        lo.copy_from_slice(&hi);
        'commit: for batch in produced {
            for (q, t) in batch {
                if seen[q].insert(t.clone()) {
                    lists[q].push(t.clone());
                    if p.is_goal(q) && goal_fact.is_none() {
                        goal_fact = Some((q, t));
                        if opts.short_circuit {
                            break 'commit;
                        }
                    }
                }
            }
        }
        for (q, l) in lists.iter().enumerate() {
            hi[q] = l.len();
        }
        if goal_fact.is_some() && opts.short_circuit {
            break;
        }
    }
    let store = FactStore {
        names: p.predicates().iter().map(|q| q.name.clone()).collect(),
        facts: lists.into_iter().map(|l| l.into_iter().collect()).collect(),
    };
    Ok(Evaluation {
        store,
        goal_reached: goal_fact.is_some(),
        goal_fact,
        rounds,
    })
}
