use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::algebra::{checked_pow, Relation, RelationalStructure};
use crate::error::{budget_error, Error, Result};
use crate::instances::{CspInstance, Var};

use super::config::{CanonConfig, Family};
use super::derivation::{Derivation, SideAtom, Step};
use super::fact::Fact;

/// Derived relations, grouped by the (sorted) variables they constrain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonFactStore {
    by_vars: BTreeMap<Vec<Var>, BTreeSet<Relation>>,
}

impl CanonFactStore {
    pub fn contains(&self, f: &Fact) -> bool {
        self.by_vars
            .get(f.vars())
            .is_some_and(|s| s.contains(f.relation()))
    }

    pub fn relations_on(&self, vars: &[Var]) -> Option<&BTreeSet<Relation>> {
        self.by_vars.get(vars)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Var], &Relation)> {
        self.by_vars
            .iter()
            .flat_map(|(v, s)| s.iter().map(move |r| (v.as_slice(), r)))
    }

    pub fn len(&self) -> usize {
        self.by_vars.values().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_vars.is_empty()
    }

    fn insert(&mut self, f: &Fact) {
        self.by_vars
            .entry(f.vars().to_vec())
            .or_default()
            .insert(f.relation().clone());
    }
}

#[derive(Clone, Debug)]
struct Parent {
    prev: Option<Fact>,
    side: Arc<Vec<SideAtom>>,
}

/// Result of evaluating the canonical program.
#[derive(Clone, Debug)]
pub struct CanonRun {
    pub store: CanonFactStore,
    pub goal: bool,
    pub goal_fact: Option<Fact>,
    parents: HashMap<Fact, Parent>,
}

impl CanonRun {
    pub fn contains(&self, f: &Fact) -> bool {
        self.parents.contains_key(f)
    }

    /// The BFS derivation of a stored fact, starting from a seed.
    pub fn derivation_of(&self, f: &Fact) -> Option<Derivation> {
        let mut chain = vec![(f.clone(), self.parents.get(f)?)];
        while let Some(prev) = &chain.last().unwrap().1.prev {
            chain.push((prev.clone(), &self.parents[prev]));
        }
        chain.reverse();
        Some(Derivation {
            premise: None,
            steps: chain
                .into_iter()
                .map(|(head, p)| Step {
                    head,
                    side: p.side.as_ref().clone(),
                })
                .collect(),
        })
    }

    pub fn goal_derivation(&self) -> Option<Derivation> {
        self.goal_fact.as_ref().and_then(|g| self.derivation_of(g))
    }
}

struct Hub {
    vars: Vec<Var>,
    side: Arc<Vec<SideAtom>>,
    base: Fact,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Number of relations of arity `1..=r` on a `d`-element domain, if it fits.
pub fn family_size(d: usize, r: usize) -> Option<u64> {
    let mut total: u64 = 0;
    for n in 1..=r {
        let slots = checked_pow(d, n)?;
        if slots >= 63 {
            return None;
        }
        total = total.checked_add(1u64 << slots)?;
    }
    Some(total)
}

fn check_all_cap(d: usize, cfg: &CanonConfig) -> Result<()> {
    match family_size(d, cfg.width) {
        Some(n) if n <= cfg.relation_cap => Ok(()),
        _ => Err(budget_error(
            format!("all relations of arity ≤ {} on {d} elements", cfg.width),
            format!("Σ 2^({d}^n)"),
            cfg.relation_cap,
        )),
    }
}

/// Least fixpoint of the width-`r` canonical symmetric program on `i`.
///
/// Every rule of at most `r` variables can be widened to exactly
/// `min(r, |V|)` variables carrying all constraints inside them without
/// losing consistency in either direction, so rules are generated only
/// over such windows. With the full family, moves through a window are
/// further factored through the conjunction of the window's constraints.
/// Constraints of arity above `r` are never usable and are ignored.
pub fn canon_evaluate(s: &RelationalStructure, cfg: &CanonConfig, i: &CspInstance) -> Result<CanonRun> {
    let d = s.domain_size();
    if i.domain_size() != d {
        return Err(Error::DomainMismatch {
            expected: d,
            found: i.domain_size(),
        });
    }
    if cfg.width == 0 {
        return Err(Error::Precondition("width must be positive".into()));
    }
    if cfg.family == Family::All {
        check_all_cap(d, cfg)?;
    }
    let full1 = Relation::full(d, 1)?;
    if !cfg.family.contains(&full1) {
        return Err(Error::FamilyTooSmall("the full unary relation".into()));
    }
    i.ensure_valid()?;
    let mut atoms: BTreeSet<(Vec<Var>, String)> = BTreeSet::new();
    for c in i.constraints() {
        let r = s.relation(&c.relation)?;
        if r.arity() != c.scope.len() {
            return Err(Error::ArityMismatch {
                expected: r.arity(),
                found: c.scope.len(),
            });
        }
        let mut distinct = c.scope.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() <= cfg.width {
            atoms.insert((c.scope.clone(), c.relation.clone()));
        }
    }
    let n = i.num_vars();
    let r = cfg.width.min(n);
    let hubs: Vec<Hub> = subsets(n, r)
        .into_iter()
        .map(|vars| {
            let inside: Vec<&(Vec<Var>, String)> = atoms
                .iter()
                .filter(|(scope, _)| scope.iter().all(|v| vars.binary_search(v).is_ok()))
                .collect();
            let rels: Vec<(&[Var], &Relation)> = inside
                .iter()
                .map(|(scope, name)| (scope.as_slice(), s.get(name).unwrap()))
                .collect();
            let base = Fact::conjunction(d, &vars, &rels)?;
            let side = inside
                .iter()
                .map(|(scope, name)| SideAtom::new(name.clone(), scope.clone()))
                .collect();
            Ok(Hub {
                vars,
                side: Arc::new(side),
                base,
            })
        })
        .collect::<Result<_>>()?;

    let by_arity: BTreeMap<usize, Vec<&Relation>> = match &cfg.family {
        Family::All => BTreeMap::new(),
        Family::Explicit(f) => {
            let mut m: BTreeMap<usize, Vec<&Relation>> = BTreeMap::new();
            for rel in f {
                m.entry(rel.arity()).or_default().push(rel);
            }
            m
        }
    };

    let mut run = CanonRun {
        store: CanonFactStore::default(),
        goal: false,
        goal_fact: None,
        parents: HashMap::new(),
    };
    let mut queue = VecDeque::new();
    let empty_side = Arc::new(Vec::new());
    let insert = |run: &mut CanonRun, queue: &mut VecDeque<Fact>, f: Fact, parent: Parent| {
        if run.parents.contains_key(&f) {
            return;
        }
        run.store.insert(&f);
        if f.is_empty() && !run.goal {
            run.goal = true;
            run.goal_fact = Some(f.clone());
        }
        run.parents.insert(f.clone(), parent);
        queue.push_back(f);
    };
    for v in 0..n {
        insert(
            &mut run,
            &mut queue,
            Fact::full(d, &[v])?,
            Parent {
                prev: None,
                side: empty_side.clone(),
            },
        );
    }
    while let Some(f) = queue.pop_front() {
        if run.goal && cfg.stop_at_goal {
            break;
        }
        for hub in hubs
            .iter()
            .filter(|h| f.vars().iter().all(|v| h.vars.binary_search(v).is_ok()))
        {
            let h = f.conjoin(&hub.base)?;
            let parent = || Parent {
                prev: Some(f.clone()),
                side: hub.side.clone(),
            };
            match &cfg.family {
                Family::All => {
                    if h == f {
                        for g in ports_all(&h, hub)? {
                            insert(&mut run, &mut queue, g, parent());
                        }
                    } else {
                        insert(&mut run, &mut queue, h, parent());
                    }
                }
                Family::Explicit(_) => {
                    for g in ports_explicit(&h, hub, &by_arity)? {
                        insert(&mut run, &mut queue, g, parent());
                    }
                }
            }
        }
    }
    Ok(run)
}

fn nonempty_subsets(vars: &[Var]) -> impl Iterator<Item = Vec<Var>> + '_ {
    (1u64..(1u64 << vars.len())).map(move |mask| {
        vars.iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// All `S(W2)` with `S(W2) ∧ T ⇔ h`, where `h` is a conjunction with the
/// window constraints `T`.
fn ports_all(h: &Fact, hub: &Hub) -> Result<Vec<Fact>> {
    let outside = Fact::conjunction(
        h.domain(),
        &hub.vars,
        &[(hub.base.vars(), &hub.base.relation().difference(h.relation())?)],
    )?;
    let mut out = Vec::new();
    for w2 in nonempty_subsets(&hub.vars) {
        let p = h.project(&w2)?;
        let smax = outside.project(&w2)?.relation().complement();
        if !p.relation().is_subset(&smax) {
            continue;
        }
        let free: Vec<usize> = smax.difference(p.relation())?.ranks().collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut rel = p.relation().clone();
            for (j, &rank) in free.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    rel.insert_rank(rank);
                }
            }
            out.push(Fact::new(&w2, &rel)?);
        }
    }
    Ok(out)
}

fn ports_explicit(h: &Fact, hub: &Hub, by_arity: &BTreeMap<usize, Vec<&Relation>>) -> Result<Vec<Fact>> {
    let mut out = Vec::new();
    for w2 in nonempty_subsets(&hub.vars) {
        let Some(cands) = by_arity.get(&w2.len()) else {
            continue;
        };
        let p = h.project(&w2)?;
        for &rel in cands {
            if !p.relation().is_subset(rel) {
                continue;
            }
            let g = Fact::new(&w2, rel)?;
            if g.conjoin(&hub.base)?.relation().is_subset(h.relation()) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Outcome of [`derive_instance`].
#[derive(Clone, Debug)]
pub struct DeriveOutcome {
    pub derived: Vec<bool>,
    /// The derived instance, when every target succeeds: same variables,
    /// constraints `T1, T2, …` in target order.
    pub instance: Option<CspInstance>,
    pub derivations: Vec<Option<Derivation>>,
}

pub fn derive_instance(
    s: &RelationalStructure,
    cfg: &CanonConfig,
    i: &CspInstance,
    targets: &[(Vec<Var>, Relation)],
) -> Result<DeriveOutcome> {
    let run = canon_evaluate(s, cfg, i)?;
    let mut derived = Vec::new();
    let mut derivations = Vec::new();
    for (scope, rel) in targets {
        let f = Fact::new(scope, rel)?;
        let d = run.derivation_of(&f);
        derived.push(d.is_some());
        derivations.push(d);
    }
    let instance = if derived.iter().all(|&b| b) {
        let mut st = RelationalStructure::new(s.domain_size())?;
        for (k, (_, rel)) in targets.iter().enumerate() {
            st.add_relation(format!("T{}", k + 1), rel.clone())?;
        }
        let mut j = CspInstance::new(st);
        for name in i.var_names() {
            j.add_variable(name.clone());
        }
        for (k, (scope, _)) in targets.iter().enumerate() {
            j.add_constraint(scope.clone(), format!("T{}", k + 1));
        }
        Some(j)
    } else {
        None
    };
    Ok(DeriveOutcome {
        derived,
        instance,
        derivations,
    })
}
