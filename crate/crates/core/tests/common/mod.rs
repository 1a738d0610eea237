//! Helpers shared by the integration tests: random instances, the program
//! corpus and independent oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use symdl::algebra::{Elem, Relation, RelationalStructure};
use symdl::engine::{DerivationGraph, Fact};
use symdl::instances::{CspInstance, PathInstance};

/// `m` constraints with distinct-variable scopes over `n` variables.
pub fn random_csp(rng: &mut ChaCha8Rng, s: &RelationalStructure, n: usize, m: usize) -> CspInstance {
    let mut i = CspInstance::with_variables(Arc::new(s.clone()), n);
    let rels: Vec<(&str, usize)> = s.relations().filter(|(_, r)| r.arity() <= n).map(|(a, r)| (a, r.arity())).collect();
    let vars: Vec<usize> = (0..n).collect();
    for _ in 0..m {
        let &(name, k) = rels.choose(rng).unwrap();
        i.add_constraint(vars.choose_multiple(rng, k).copied().collect(), name);
    }
    i
}

/// Random unary and binary relations, not necessarily preserved by anything.
pub fn random_path(rng: &mut ChaCha8Rng, d: usize, len: usize, pu: f64, pb: f64) -> PathInstance {
    let u = (0..len).map(|_| Relation::from_predicate(d, 1, |_| rng.random_bool(pu)).unwrap()).collect();
    let b = (1..len).map(|_| Relation::from_predicate(d, 2, |_| rng.random_bool(pb)).unwrap()).collect();
    PathInstance::new(d, u, b).unwrap()
}

/// Arc consistency: prunes unary sets to the projections of the binary
/// constraints and the binaries to the unary sets. `None` if a set empties.
pub fn make_subdirect(p: &PathInstance) -> Option<PathInstance> {
    let d = p.domain();
    let mut u: Vec<Relation> = p.unaries().to_vec();
    let mut b: Vec<Relation> = p.binaries().to_vec();
    loop {
        let mut changed = false;
        for i in 0..b.len() {
            let r = b[i].restrict_binary(&u[i], &u[i + 1]).unwrap();
            let left = r.project(&[0]).unwrap();
            let right = r.project(&[1]).unwrap();
            let nl = u[i].intersection(&left).unwrap();
            let nr = u[i + 1].intersection(&right).unwrap();
            changed |= nl != u[i] || nr != u[i + 1] || r != b[i];
            u[i] = nl;
            u[i + 1] = nr;
            b[i] = r;
        }
        if u.iter().any(Relation::is_empty) {
            return None;
        }
        if !changed {
            return Some(PathInstance::new(d, u, b).unwrap());
        }
    }
}

/// `λ` by union-find over the window's microstructure: nodes `(k, a)` with
/// `a ∈ B_k`, an undirected edge for each tuple between allowed values.
pub fn lambda_by_union_find(p: &PathInstance, i: usize, j: usize) -> Vec<(Elem, Elem)> {
    let d = p.domain();
    let id = |k: usize, a: Elem| (k - i) * d + a;
    let mut parent: Vec<usize> = (0..(j - i + 1) * d).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let nx = parent[x];
            parent[x] = r;
            x = nx;
        }
        r
    }
    for k in i..j {
        for t in p.binary(k).tuples() {
            if p.unary(k).contains(&[t[0]]) && p.unary(k + 1).contains(&[t[1]]) {
                let (x, y) = (find(&mut parent, id(k, t[0])), find(&mut parent, id(k + 1, t[1])));
                parent[x] = y;
            }
        }
    }
    let mut out = Vec::new();
    for a in p.unary(i).elements() {
        for b in p.unary(j).elements() {
            if find(&mut parent, id(i, a)) == find(&mut parent, id(j, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Goal vertex reachable from a base vertex, by plain BFS over the edges.
pub fn bfs_goal(g: &DerivationGraph) -> bool {
    let mut adj: BTreeMap<&Fact, Vec<&Fact>> = BTreeMap::new();
    for (u, v) in g.edges.keys() {
        adj.entry(u).or_default().push(v);
    }
    let mut seen: BTreeSet<&Fact> = g.base.keys().collect();
    let mut queue: VecDeque<&Fact> = g.base.keys().collect();
    while let Some(u) = queue.pop_front() {
        if g.goals.contains(&u.0) {
            return true;
        }
        for &v in adj.get(u).into_iter().flatten() {
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    false
}

const HEADER: &str = "#edb C0/1\n#edb C1/1\n#edb EQ/2\n#edb NEQ/2\n";

/// Ten symmetric and ten linear, non-symmetric programs over the
/// vocabulary of AZ2, each with goal `G`.
pub const SYMMETRIC_PROGRAMS: [&str; 10] = [
    "#idb A/1\n#idb B/1\n#idb G/1\n#goal G\n\
     A(x) :- C0(x).\nB(x) :- C1(x).\n\
     B(y) :- A(x), NEQ(x,y).\nA(x) :- B(y), NEQ(x,y).\n\
     A(y) :- B(x), NEQ(x,y).\nB(x) :- A(y), NEQ(x,y).\n\
     G(x) :- B(x), C0(x).\nB(x) :- G(x), C0(x).\n\
     G(x) :- A(x), C1(x).\nA(x) :- G(x), C1(x).\n",
    "#idb R/1\n#idb G/1\n#goal G\n\
     R(x) :- C0(x).\nR(y) :- R(x), EQ(x,y).\nR(x) :- R(y), EQ(x,y).\n\
     G(x) :- R(x), C1(x).\nR(x) :- G(x), C1(x).\n",
    "#idb T/2\n#idb G/1\n#goal G\n\
     T(x,y) :- EQ(x,y).\nT(x,z) :- T(x,y), EQ(y,z).\nT(x,y) :- T(x,z), EQ(y,z).\n\
     G(x) :- T(x,y), C0(x), C1(y).\nT(x,y) :- G(x), C0(x), C1(y).\n",
    "#idb A/1\n#idb B/1\n#idb G/1\n#goal G\n\
     A(x) :- C0(x).\nB(x) :- C1(x).\n\
     A(y) :- A(x), EQ(x,y).\nA(x) :- A(y), EQ(x,y).\n\
     B(y) :- B(x), EQ(x,y).\nB(x) :- B(y), EQ(x,y).\n\
     B(y) :- A(x), NEQ(x,y).\nA(x) :- B(y), NEQ(x,y).\n\
     A(y) :- B(x), NEQ(x,y).\nB(x) :- A(y), NEQ(x,y).\n\
     G(x) :- B(x), C0(x).\nB(x) :- G(x), C0(x).\n\
     G(x) :- A(x), C1(x).\nA(x) :- G(x), C1(x).\n",
    "#idb G/1\n#goal G\nG(x) :- C0(x), C1(x).\n",
    "#idb R/1\n#idb G/1\n#goal G\n\
     R(x) :- C0(x).\nR(y) :- R(x), NEQ(x,y).\nR(x) :- R(y), NEQ(x,y).\n\
     G(x) :- R(x), C0(x), C1(x).\nR(x) :- G(x), C0(x), C1(x).\n",
    "#idb P/2\n#idb G/1\n#goal G\n\
     P(x,y) :- NEQ(x,y).\nP(x,z) :- P(x,y), NEQ(y,z).\nP(x,y) :- P(x,z), NEQ(y,z).\n\
     G(x) :- P(x,y), EQ(x,y).\nP(x,y) :- G(x), EQ(x,y).\n",
    "#idb R/1\n#idb G/1\n#goal G\n\
     R(x) :- C1(x).\nG(x) :- R(x), C0(x).\nR(x) :- G(x), C0(x).\n",
    "#idb A/1\n#idb B/1\n#idb G/1\n#goal G\n\
     B(x) :- C1(x).\n\
     A(y) :- B(x), NEQ(x,y).\nB(x) :- A(y), NEQ(x,y).\n\
     B(y) :- B(x), EQ(x,y).\nB(x) :- B(y), EQ(x,y).\n\
     G(x) :- A(x), C1(x).\nA(x) :- G(x), C1(x).\n",
    "#idb Q/3\n#idb G/1\n#goal G\n\
     Q(x,y,z) :- NEQ(x,y), EQ(y,z).\n\
     Q(x,y,w) :- Q(x,y,z), EQ(z,w).\nQ(x,y,z) :- Q(x,y,w), EQ(z,w).\n\
     G(x) :- Q(x,y,z), C0(x), NEQ(y,z).\nQ(x,y,z) :- G(x), C0(x), NEQ(y,z).\n",
];

pub const LINEAR_PROGRAMS: [&str; 10] = [
    "#idb R/1\n#idb G/1\n#goal G\nR(x) :- C0(x).\nR(y) :- R(x), NEQ(x,y).\nG(x) :- R(x), C1(x).\n",
    "#idb T/2\n#idb G/1\n#goal G\nT(x,y) :- EQ(x,y).\nT(x,z) :- T(x,y), NEQ(y,z).\nG(x) :- T(x,y), EQ(x,y).\n",
    "#idb A/1\n#idb B/1\n#idb G/1\n#goal G\n\
     A(x) :- C0(x).\nB(y) :- A(x), NEQ(x,y).\nA(y) :- B(x), NEQ(x,y).\nG(x) :- A(x), C1(x).\n",
    "#idb R/1\n#idb G/1\n#goal G\nR(y) :- C0(x), EQ(x,y).\nR(y) :- R(x), EQ(y,x).\nG(y) :- R(y), C1(y).\n",
    "#idb R/1\n#idb G/1\n#goal G\nR(y) :- R(x), NEQ(x,y).\nG(x) :- R(x), C0(x).\n",
    "#idb R/1\n#idb G/1\n#goal G\nR(x) :- C0(x), C1(x).\nG(x) :- R(x).\n",
    "#idb P/2\n#idb G/1\n#goal G\nP(x,y) :- NEQ(x,y), C0(x).\nP(x,z) :- P(x,y), EQ(y,z).\nG(x) :- P(x,y), C0(y).\n",
    "#idb R/1\n#idb S/1\n#idb G/1\n#goal G\nR(x) :- C1(x).\nS(y) :- R(x), NEQ(x,y).\nG(y) :- S(y), C1(y).\n",
    "#idb R/1\n#idb G/1\n#goal G\nR(x) :- C0(x).\nR(y) :- R(x), NEQ(x,y).\nR(y) :- R(x), EQ(x,y).\nG(x) :- R(x), C1(x).\n",
    "#idb T/2\n#idb G/1\n#goal G\nT(x,y) :- NEQ(x,y).\nT(y,z) :- T(x,y), NEQ(y,z).\nG(x) :- T(x,y), C0(x), C0(y).\n",
];

pub fn program_text(body: &str) -> String {
    format!("{HEADER}{body}")
}
