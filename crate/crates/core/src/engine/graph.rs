use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::instances::{CspInstance, Var};

use super::eval::{edb_facts, ground, Fact};
use super::program::{Atom, DatalogProgram, Fragment};

/// How an edge or base vertex was grounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grounding {
    pub rule: usize,
    pub side: Vec<Fact>,
}

/// Vertices are IDB facts; an edge `u → v` means a rule derives `v` from
/// `u` together with EDB facts of the instance. Base vertices are derived
/// by rules without IDB body atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationGraph {
    pub edges: BTreeMap<(Fact, Fact), Grounding>,
    pub base: BTreeMap<Fact, Grounding>,
    pub goals: BTreeSet<usize>,
}

impl DerivationGraph {
    pub fn edge_set(&self) -> BTreeSet<(Fact, Fact)> {
        self.edges.keys().cloned().collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges.keys().all(|(u, v)| self.edges.contains_key(&(v.clone(), u.clone())))
    }

    pub fn successors(&self) -> BTreeMap<&Fact, Vec<&Fact>> {
        let mut out: BTreeMap<&Fact, Vec<&Fact>> = BTreeMap::new();
        for (u, v) in self.edges.keys() {
            out.entry(u).or_default().push(v);
        }
        out
    }

    /// Vertices reachable from base vertices, with BFS parents.
    pub fn reachable(&self) -> BTreeMap<Fact, Option<Fact>> {
        let succ = self.successors();
        let mut parent: BTreeMap<Fact, Option<Fact>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for b in self.base.keys() {
            parent.insert(b.clone(), None);
            queue.push_back(b.clone());
        }
        while let Some(u) = queue.pop_front() {
            for &v in succ.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !parent.contains_key(v) {
                    parent.insert(v.clone(), Some(u.clone()));
                    queue.push_back(v.clone());
                }
            }
        }
        parent
    }

    pub fn goal_reachable(&self) -> bool {
        self.reachable().keys().any(|f| self.goals.contains(&f.0))
    }
}

fn side_sources<'a>(
    atoms: &[&Atom],
    edb: &'a BTreeMap<usize, Vec<Vec<Var>>>,
) -> Vec<&'a [Vec<Var>]> {
    atoms
        .iter()
        .map(|a| edb.get(&a.predicate).map(|v| v.as_slice()).unwrap_or(&[]))
        .collect()
}

/// The derivation digraph of a linear program on `i`.
pub fn derivation_graph(p: &DatalogProgram, i: &CspInstance) -> Result<DerivationGraph> {
    if let Some(r) = p.rules().iter().position(|r| p.idb_positions(r).len() > 1) {
        return Err(Error::NonLinear(r));
    }
    let mut edb: BTreeMap<usize, Vec<Vec<Var>>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for f in edb_facts(p, i)? {
        if seen.insert(f.clone()) {
            edb.entry(f.0).or_default().push(f.1);
        }
    }
    let n = i.num_vars();
    let mut g = DerivationGraph {
        edges: BTreeMap::new(),
        base: BTreeMap::new(),
        goals: p.goals().iter().copied().collect(),
    };
    for (r, rule) in p.rules().iter().enumerate() {
        let idb = p.idb_positions(rule).first().copied();
        let side: Vec<&Atom> = (0..rule.body.len())
            .filter(|&j| Some(j) != idb)
            .map(|j| &rule.body[j])
            .collect();
        let sources = side_sources(&side, &edb);
        let source = |j: usize| sources[j];
        ground(rule, &side, &source, n, &mut |bind| {
            let head: Fact = (rule.head.predicate, rule.head.args.iter().map(|&x| bind[x]).collect());
            let used: Vec<Fact> = side
                .iter()
                .map(|a| (a.predicate, a.args.iter().map(|&x| bind[x]).collect()))
                .collect();
            let grounding = Grounding { rule: r, side: used };
            match idb {
                None => {
                    g.base.entry(head).or_insert(grounding);
                }
                Some(j) => {
                    let a = &rule.body[j];
                    let from: Fact = (a.predicate, a.args.iter().map(|&x| bind[x]).collect());
                    g.edges.entry((from, head)).or_insert(grounding);
                }
            }
        });
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub fact: Fact,
    pub rule: usize,
    pub side: Vec<Fact>,
}

/// `U₁(φ₁) … U_m(φ_m)`; no steps means the target is an EDB fact of the
/// instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub target: Fact,
    pub steps: Vec<DerivationStep>,
}

/// A shortest derivation of `fact`, if it is derivable.
pub fn extract_derivation(p: &DatalogProgram, i: &CspInstance, fact: &Fact) -> Result<Option<Derivation>> {
    if !p.is_idb(fact.0) {
        let seeded = edb_facts(p, i)?.contains(fact);
        return Ok(seeded.then(|| Derivation {
            target: fact.clone(),
            steps: Vec::new(),
        }));
    }
    let g = derivation_graph(p, i)?;
    Ok(derivation_in(&g, &g.reachable(), fact))
}

pub(crate) fn derivation_in(
    g: &DerivationGraph,
    parents: &BTreeMap<Fact, Option<Fact>>,
    fact: &Fact,
) -> Option<Derivation> {
    parents.get(fact)?;
    let mut chain = vec![fact.clone()];
    while let Some(Some(prev)) = parents.get(chain.last().unwrap()) {
        chain.push(prev.clone());
    }
    chain.reverse();
    let mut steps = Vec::with_capacity(chain.len());
    let b = &g.base[&chain[0]];
    steps.push(DerivationStep {
        fact: chain[0].clone(),
        rule: b.rule,
        side: b.side.clone(),
    });
    for w in chain.windows(2) {
        let e = &g.edges[&(w[0].clone(), w[1].clone())];
        steps.push(DerivationStep {
            fact: w[1].clone(),
            rule: e.rule,
            side: e.side.clone(),
        });
    }
    Some(Derivation {
        target: fact.clone(),
        steps,
    })
}

/// Re-derives the target by matching every step against its rule.
pub fn replay(p: &DatalogProgram, i: &CspInstance, d: &Derivation) -> Result<()> {
    let edb: HashSet<Fact> = edb_facts(p, i)?.into_iter().collect();
    let fail = |step: usize, reason: &str| Error::Replay {
        step,
        reason: reason.to_string(),
    };
    if d.steps.is_empty() {
        return if edb.contains(&d.target) {
            Ok(())
        } else {
            Err(fail(0, "target is not a constraint of the instance"))
        };
    }
    let mut prev: Option<&Fact> = None;
    for (s, step) in d.steps.iter().enumerate() {
        let rule = p
            .rules()
            .get(step.rule)
            .ok_or_else(|| fail(s, "unknown rule"))?;
        let idb = p.idb_positions(rule).first().copied();
        if idb.is_some() != prev.is_some() {
            return Err(fail(s, "IDB body atom does not match the previous step"));
        }
        if let Some(f) = step.side.iter().find(|f| !edb.contains(f)) {
            return Err(fail(s, &format!("side fact {f:?} is not a constraint")));
        }
        let mut bind = vec![usize::MAX; rule.vars.len()];
        let mut unify = |a: &Atom, f: &Fact| -> bool {
            a.predicate == f.0
                && a.args.len() == f.1.len()
                && a.args.iter().zip(&f.1).all(|(&x, &v)| {
                    if bind[x] == usize::MAX {
                        bind[x] = v;
                        true
                    } else {
                        bind[x] == v
                    }
                })
        };
        if !unify(&rule.head, &step.fact) {
            return Err(fail(s, "head does not match"));
        }
        if let (Some(j), Some(pf)) = (idb, prev) {
            if !unify(&rule.body[j], pf) {
                return Err(fail(s, "IDB body atom does not match"));
            }
        }
        let side: Vec<&Atom> = (0..rule.body.len()).filter(|&j| Some(j) != idb).map(|j| &rule.body[j]).collect();
        if side.len() != step.side.len() || !side.iter().zip(&step.side).all(|(a, f)| unify(a, f)) {
            return Err(fail(s, "side atoms do not match"));
        }
        prev = Some(&step.fact);
    }
    if prev != Some(&d.target) {
        return Err(fail(d.steps.len(), "last step is not the target"));
    }
    Ok(())
}

/// Convenience wrapper raising on non-linear programs.
pub fn ensure_linear(p: &DatalogProgram) -> Result<Fragment> {
    match p.classify() {
        Fragment::General => Err(Error::NonLinear(
            p.rules().iter().position(|r| p.idb_positions(r).len() > 1).unwrap_or(0),
        )),
        f => Ok(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Relation, RelationalStructure};
    use crate::engine::eval::{evaluate, EvalOptions};

    fn chain(n: usize) -> CspInstance {
        let s = RelationalStructure::new(2)
            .unwrap()
            .with_relation("E", Relation::full(2, 2).unwrap())
            .unwrap();
        let mut i = CspInstance::with_variables(s, n);
        for v in 0..n - 1 {
            i.add_constraint(vec![v, v + 1], "E");
        }
        i
    }

    const TC: &str = "#edb E/2\n#idb T/2\nT(x,y) :- E(x,y).\nT(x,y) :- T(x,z), E(z,y).";

    #[test]
    fn extraction() {
        let p = DatalogProgram::parse(TC).unwrap();
        let i = chain(3);
        let t = p.predicate_id("T").unwrap();
        let e = p.predicate_id("E").unwrap();
        let d = extract_derivation(&p, &i, &(t, vec![0, 2])).unwrap().unwrap();
        assert_eq!(d.steps.len(), 2);
        replay(&p, &i, &d).unwrap();
        let seeded = extract_derivation(&p, &i, &(e, vec![0, 1])).unwrap().unwrap();
        assert!(seeded.steps.is_empty());
        replay(&p, &i, &seeded).unwrap();
        assert!(extract_derivation(&p, &i, &(t, vec![2, 0])).unwrap().is_none());
    }

    #[test]
    fn replay_rejects_tampering() {
        let p = DatalogProgram::parse(TC).unwrap();
        let i = chain(3);
        let t = p.predicate_id("T").unwrap();
        let mut d = extract_derivation(&p, &i, &(t, vec![0, 2])).unwrap().unwrap();
        d.steps[1].side[0].1 = vec![0, 2];
        assert!(replay(&p, &i, &d).is_err());
    }

    #[test]
    fn graph_examples() {
        let sym = DatalogProgram::parse(
            "#edb E/2\n#idb R/1\n#idb S/1\nR(x) :- E(x,y).\nS(y) :- R(x), E(x,y).\nR(x) :- S(y), E(x,y).",
        )
        .unwrap();
        assert_eq!(sym.classify(), Fragment::Symmetric);
        let i = chain(2);
        let g = derivation_graph(&sym, &i).unwrap();
        assert!(g.is_symmetric());
        assert_eq!(g.edges.len(), 2);

        let flat = DatalogProgram::parse("#edb E/2\n#idb R/2\nR(x,y) :- E(x,y).").unwrap();
        assert!(derivation_graph(&flat, &i).unwrap().edges.is_empty());

        let gen = DatalogProgram::parse("#edb E/2\n#idb R/2\nR(x,y) :- R(x,z), R(z,y).").unwrap();
        assert!(matches!(derivation_graph(&gen, &i), Err(Error::NonLinear(0))));
    }

    #[test]
    fn fixpoint_equals_reachability() {
        let p = DatalogProgram::parse(TC).unwrap();
        let i = chain(5);
        let e = evaluate(&p, &i, &EvalOptions { short_circuit: false, ..Default::default() }).unwrap();
        let g = derivation_graph(&p, &i).unwrap();
        let reach: BTreeSet<Fact> = g.reachable().into_keys().collect();
        let idb: BTreeSet<Fact> = e.store.iter().filter(|f| p.is_idb(f.0)).collect();
        assert_eq!(reach, idb);
    }
}
