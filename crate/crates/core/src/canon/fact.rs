use std::fmt;

use crate::algebra::{decode, encode, Elem, Relation};
use crate::error::{Error, Result};
use crate::instances::search::{Atom, Search};
use crate::instances::Var;

/// A statement `R(σ)` over instance variables, kept in normal form: the
/// variables are sorted and distinct, and the relation is the set of
/// assignments to them satisfying the original statement. Two statements
/// are equivalent exactly when their normal forms are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    vars: Vec<Var>,
    relation: Relation,
}

impl Fact {
    pub fn new(tuple: &[Var], rel: &Relation) -> Result<Fact> {
        if tuple.len() != rel.arity() {
            return Err(Error::ArityMismatch {
                expected: rel.arity(),
                found: tuple.len(),
            });
        }
        let mut vars = tuple.to_vec();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() == tuple.len() && tuple.windows(2).all(|w| w[0] < w[1]) {
            return Ok(Fact {
                vars,
                relation: rel.clone(),
            });
        }
        let pos: Vec<usize> = tuple
            .iter()
            .map(|v| vars.binary_search(v).unwrap())
            .collect();
        let d = rel.domain();
        let mut out = Relation::empty(d, vars.len())?;
        let mut w = vec![usize::MAX; vars.len()];
        for t in rel.tuples() {
            w.iter_mut().for_each(|x| *x = usize::MAX);
            let ok = t.iter().zip(&pos).all(|(&a, &p)| {
                if w[p] == usize::MAX {
                    w[p] = a;
                    true
                } else {
                    w[p] == a
                }
            });
            if ok {
                out.insert_rank(encode(d, &w));
            }
        }
        Ok(Fact {
            vars,
            relation: out,
        })
    }

    /// The full relation on `vars` (which need not be sorted).
    pub fn full(domain: usize, vars: &[Var]) -> Result<Fact> {
        let mut v = vars.to_vec();
        v.sort_unstable();
        v.dedup();
        Ok(Fact {
            relation: Relation::full(domain, v.len())?,
            vars: v,
        })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn domain(&self) -> usize {
        self.relation.domain()
    }

    pub fn is_empty(&self) -> bool {
        self.relation.is_empty()
    }

    /// Relation on the sorted, distinct `vars` (a superset of every
    /// scope) satisfying all `atoms`.
    pub fn conjunction(domain: usize, vars: &[Var], atoms: &[(&[Var], &Relation)]) -> Result<Fact> {
        let mut w = vars.to_vec();
        for (scope, _) in atoms {
            w.extend_from_slice(scope);
        }
        w.sort_unstable();
        w.dedup();
        let local: Vec<Vec<usize>> = atoms
            .iter()
            .map(|(scope, _)| scope.iter().map(|v| w.binary_search(v).unwrap()).collect())
            .collect();
        let search_atoms: Vec<Atom> = atoms
            .iter()
            .zip(&local)
            .map(|((_, rel), scope)| Atom { scope, relation: rel })
            .collect();
        let mut out = Relation::empty(domain, w.len())?;
        let _ = Search::new(w.len(), domain, &search_atoms).run(&[], &mut |s| {
            out.insert_rank(encode(domain, s));
            std::ops::ControlFlow::Continue(())
        });
        Ok(Fact {
            vars: w,
            relation: out,
        })
    }

    pub fn conjoin(&self, other: &Fact) -> Result<Fact> {
        if self.domain() != other.domain() {
            return Err(Error::DomainMismatch {
                expected: self.domain(),
                found: other.domain(),
            });
        }
        Fact::conjunction(
            self.domain(),
            &[],
            &[(&self.vars, &self.relation), (&other.vars, &other.relation)],
        )
    }

    /// Same statement padded with unconstrained variables.
    pub fn lift(&self, vars: &[Var]) -> Result<Fact> {
        let mut all = self.vars.clone();
        all.extend_from_slice(vars);
        Fact::conjunction(self.domain(), &all, &[(&self.vars, &self.relation)])
    }

    /// Projection onto a subset of the variables.
    pub fn project(&self, sub: &[Var]) -> Result<Fact> {
        let mut s = sub.to_vec();
        s.sort_unstable();
        s.dedup();
        let coords: Vec<usize> = s
            .iter()
            .map(|v| {
                self.vars
                    .binary_search(v)
                    .map_err(|_| Error::UnknownVariable(v.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(Fact {
            relation: self.relation.project(&coords)?,
            vars: s,
        })
    }

    /// Does `self` imply `other`, with `other`'s variables among ours?
    pub fn implies(&self, other: &Fact) -> Result<bool> {
        if !other.vars.iter().all(|v| self.vars.binary_search(v).is_ok()) {
            return Ok(false);
        }
        Ok(self.project(&other.vars)?.relation.is_subset(&other.relation))
    }

    pub fn holds(&self, assignment: &[Elem]) -> bool {
        let t: Vec<Elem> = self.vars.iter().map(|&v| assignment[v]).collect();
        self.relation.contains(&t)
    }

    /// Satisfying assignments to `vars()`.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        let (d, n) = (self.domain(), self.arity());
        self.relation.ranks().map(move |r| decode(d, n, r))
    }
}

impl fmt::Debug for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.relation, self.vars)
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neq() -> Relation {
        Relation::from_tuples(2, 2, [[0, 1], [1, 0]]).unwrap()
    }

    #[test]
    fn normalization() {
        let eq = Relation::equality(2).unwrap();
        let a = Fact::new(&[3, 3], &eq).unwrap();
        assert_eq!(a, Fact::full(2, &[3]).unwrap());
        let b = Fact::new(&[3, 3], &neq()).unwrap();
        assert!(b.is_empty());
        let swapped = Fact::new(&[5, 2], &Relation::from_tuples(2, 2, [[0, 1]]).unwrap()).unwrap();
        assert_eq!(swapped.vars(), &[2, 5]);
        assert_eq!(swapped.tuples().collect::<Vec<_>>(), vec![vec![1, 0]]);
    }

    #[test]
    fn conjunction_and_projection() {
        let x = Fact::new(&[0, 1], &neq()).unwrap();
        let y = Fact::new(&[1, 2], &neq()).unwrap();
        let xy = x.conjoin(&y).unwrap();
        assert_eq!(xy.vars(), &[0, 1, 2]);
        assert_eq!(xy.relation().len(), 2);
        let ends = xy.project(&[0, 2]).unwrap();
        assert_eq!(ends, Fact::new(&[0, 2], &Relation::equality(2).unwrap()).unwrap());
        assert!(xy.implies(&x).unwrap());
        assert!(!x.implies(&ends).unwrap());
        let lifted = x.lift(&[4]).unwrap();
        assert_eq!(lifted.relation().len(), 4);
        assert_eq!(lifted.project(&[0, 1]).unwrap(), x);
    }
}
