//! Backtracking search over a conjunction of atoms.
//!
//! Variables are assigned in index order; an atom is checked as soon as
//! the largest variable in its scope is assigned.

use std::ops::ControlFlow;

use crate::algebra::{Elem, Relation};

#[derive(Clone, Copy, Debug)]
pub struct Atom<'a> {
    pub scope: &'a [usize],
    pub relation: &'a Relation,
}

pub struct Search<'a> {
    num_vars: usize,
    domain: usize,
    by_last: Vec<Vec<Atom<'a>>>,
    unsat: bool,
}

impl<'a> Search<'a> {
    pub fn new(num_vars: usize, domain: usize, atoms: &[Atom<'a>]) -> Self {
        let mut by_last = vec![Vec::new(); num_vars];
        let mut unsat = false;
        for a in atoms {
            match a.scope.iter().max() {
                Some(&m) => by_last[m].push(*a),
                None => unsat |= a.relation.is_empty(),
            }
        }
        Search {
            num_vars,
            domain,
            by_last,
            unsat,
        }
    }

    /// Visit every solution extending `prefix`, in lexicographic order.
    pub fn run(&self, prefix: &[Elem], f: &mut dyn FnMut(&[Elem]) -> ControlFlow<()>) -> ControlFlow<()> {
        if self.unsat {
            return ControlFlow::Continue(());
        }
        let mut assignment = vec![0; self.num_vars];
        assignment[..prefix.len()].copy_from_slice(prefix);
        for v in 0..prefix.len() {
            if !self.check(v, &assignment) {
                return ControlFlow::Continue(());
            }
        }
        self.rec(prefix.len(), &mut assignment, f)
    }

    fn check(&self, v: usize, assignment: &[Elem]) -> bool {
        let mut buf = [0usize; 16];
        self.by_last[v].iter().all(|a| {
            if a.scope.len() <= buf.len() {
                for (slot, &x) in buf.iter_mut().zip(a.scope) {
                    *slot = assignment[x];
                }
                a.relation.contains(&buf[..a.scope.len()])
            } else {
                let t: Vec<Elem> = a.scope.iter().map(|&x| assignment[x]).collect();
                a.relation.contains(&t)
            }
        })
    }

    fn rec(
        &self,
        v: usize,
        assignment: &mut Vec<Elem>,
        f: &mut dyn FnMut(&[Elem]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if v == self.num_vars {
            return f(assignment);
        }
        for a in 0..self.domain {
            assignment[v] = a;
            if self.check(v, assignment) {
                self.rec(v + 1, assignment, f)?;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn first(&self) -> Option<Vec<Elem>> {
        let mut out = None;
        let _ = self.run(&[], &mut |s| {
            out = Some(s.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    pub fn exists(&self) -> bool {
        self.first().is_some()
    }

    pub fn all(&self) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        let _ = self.run(&[], &mut |s| {
            out.push(s.to_vec());
            ControlFlow::Continue(())
        });
        out
    }
}
