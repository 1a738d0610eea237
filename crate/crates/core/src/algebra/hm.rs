use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::operation::{enumerate_idempotent_polymorphisms, is_polymorphism, EnumerationConfig, OperationTable};
use super::relation::{Elem, Relation};
use super::structure::RelationalStructure;

/// Ternary terms `p₀ … pₙ` with `p₀ = x`, `pₙ = z` and
/// `pᵢ(x,x,y) = pᵢ₊₁(x,y,y)` for `i = 0 … n−1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HmChain {
    terms: Vec<OperationTable>,
}

/// Why a candidate chain is not a Hagemann-Mitschke chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HmViolation {
    TooShort,
    NotTernary { term: usize },
    DomainMismatch { term: usize },
    FirstNotProjection { args: [Elem; 3] },
    LastNotProjection { args: [Elem; 3] },
    NotIdempotent { term: usize, x: Elem },
    Equation { i: usize, x: Elem, y: Elem, left: Elem, right: Elem },
    NotPolymorphism { term: usize, relation: String },
}

impl fmt::Display for HmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HmViolation::TooShort => write!(f, "chain needs at least two terms"),
            HmViolation::NotTernary { term } => write!(f, "p{term} is not ternary"),
            HmViolation::DomainMismatch { term } => write!(f, "p{term} has the wrong domain"),
            HmViolation::FirstNotProjection { args } => {
                write!(f, "p0 differs from the first projection at {args:?}")
            }
            HmViolation::LastNotProjection { args } => {
                write!(f, "pn differs from the third projection at {args:?}")
            }
            HmViolation::NotIdempotent { term, x } => {
                write!(f, "p{term}({x},{x},{x}) ≠ {x}")
            }
            HmViolation::Equation { i, x, y, left, right } => write!(
                f,
                "p{i}({x},{x},{y}) = {left} but p{}({x},{y},{y}) = {right}",
                i + 1
            ),
            HmViolation::NotPolymorphism { term, relation } => {
                write!(f, "p{term} does not preserve {relation}")
            }
        }
    }
}

impl HmChain {
    /// Wraps terms without checking them; see [`verify_hm_chain`].
    pub fn from_terms(terms: Vec<OperationTable>) -> Self {
        HmChain { terms }
    }

    /// `(proj₁, p, proj₃)`.
    pub fn with_middle(p: OperationTable) -> Self {
        let d = p.domain();
        HmChain {
            terms: vec![
                OperationTable::projection(d, 3, 0).unwrap(),
                p,
                OperationTable::projection(d, 3, 2).unwrap(),
            ],
        }
    }

    pub fn n(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn terms(&self) -> &[OperationTable] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &OperationTable {
        &self.terms[i]
    }

    pub fn domain(&self) -> usize {
        self.terms.first().map_or(0, |t| t.domain())
    }

    /// The chain acting coordinatewise on `A^k`.
    pub fn power(&self, k: usize) -> Result<HmChain> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.power(k))
            .collect::<Result<_>>()?;
        Ok(HmChain { terms })
    }

    /// Checks every invariant except polymorphism membership.
    pub fn check_equations(&self) -> std::result::Result<(), HmViolation> {
        if self.terms.len() < 2 {
            return Err(HmViolation::TooShort);
        }
        let d = self.domain();
        for (i, t) in self.terms.iter().enumerate() {
            if t.arity() != 3 {
                return Err(HmViolation::NotTernary { term: i });
            }
            if t.domain() != d {
                return Err(HmViolation::DomainMismatch { term: i });
            }
        }
        let n = self.n();
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    if self.terms[0].apply(&[x, y, z]) != x {
                        return Err(HmViolation::FirstNotProjection { args: [x, y, z] });
                    }
                    if self.terms[n].apply(&[x, y, z]) != z {
                        return Err(HmViolation::LastNotProjection { args: [x, y, z] });
                    }
                }
            }
        }
        for (i, t) in self.terms.iter().enumerate() {
            if let Some(x) = (0..d).find(|&x| t.apply(&[x, x, x]) != x) {
                return Err(HmViolation::NotIdempotent { term: i, x });
            }
        }
        for i in 0..n {
            for x in 0..d {
                for y in 0..d {
                    let left = self.terms[i].apply(&[x, x, y]);
                    let right = self.terms[i + 1].apply(&[x, y, y]);
                    if left != right {
                        return Err(HmViolation::Equation { i, x, y, left, right });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Full check: the equations hold and every term is a polymorphism of `s`.
pub fn verify_hm_chain(chain: &HmChain, s: &RelationalStructure) -> std::result::Result<(), HmViolation> {
    chain.check_equations()?;
    for (i, t) in chain.terms.iter().enumerate() {
        if t.domain() != s.domain_size() {
            return Err(HmViolation::DomainMismatch { term: i });
        }
        for (name, rel) in s.relations() {
            if !super::operation::check_preserves(t, rel).unwrap_or(false) {
                return Err(HmViolation::NotPolymorphism {
                    term: i,
                    relation: name.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Does every term of `chain` preserve `rel`?
pub fn chain_preserves(chain: &HmChain, rel: &Relation) -> Result<bool> {
    for t in chain.terms() {
        if !super::operation::check_preserves(t, rel)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn binary_key(p: &OperationTable, f: impl Fn(Elem, Elem) -> [Elem; 3]) -> Vec<Elem> {
    let d = p.domain();
    let mut out = Vec::with_capacity(d * d);
    for x in 0..d {
        for y in 0..d {
            out.push(p.apply(&f(x, y)));
        }
    }
    out
}

/// Shortest chain of length at most `n_max`.
///
/// Ties are broken term by term: a candidate fixed by more argument
/// permutations comes first, then lexicographic table order.
pub fn find_hm_chain(
    s: &RelationalStructure,
    n_max: usize,
    cfg: &EnumerationConfig,
) -> Result<Option<HmChain>> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be positive".into()));
    }
    let d = s.domain_size();
    if d == 1 {
        return Ok(Some(HmChain {
            terms: vec![
                OperationTable::projection(1, 3, 0)?,
                OperationTable::projection(1, 3, 2)?,
            ],
        }));
    }
    if n_max < 2 {
        return Ok(None);
    }
    let mut cands = enumerate_idempotent_polymorphisms(s, 3, cfg)?;
    let sym: HashMap<OperationTable, usize> = cands
        .iter()
        .map(|p| (p.clone(), p.symmetry_count()))
        .collect();
    cands.sort_by(|a, b| sym[b].cmp(&sym[a]).then_with(|| a.cmp(b)));

    let xxy: Vec<Vec<Elem>> = cands.iter().map(|p| binary_key(p, |x, y| [x, x, y])).collect();
    let xyy: Vec<Vec<Elem>> = cands.iter().map(|p| binary_key(p, |x, y| [x, y, y])).collect();
    let proj_x: Vec<Elem> = (0..d).flat_map(|x| (0..d).map(move |_| x)).collect();
    let proj_y: Vec<Elem> = (0..d).flat_map(|_| 0..d).collect();

    // dist[p] = number of middle terms still needed after p.
    let mut by_xyy: HashMap<&[Elem], Vec<usize>> = HashMap::new();
    for (i, k) in xyy.iter().enumerate() {
        by_xyy.entry(k.as_slice()).or_default().push(i);
    }
    let mut by_xxy: HashMap<&[Elem], Vec<usize>> = HashMap::new();
    for (i, k) in xxy.iter().enumerate() {
        by_xxy.entry(k.as_slice()).or_default().push(i);
    }
    let mut dist = vec![usize::MAX; cands.len()];
    let mut queue = VecDeque::new();
    for (i, k) in xxy.iter().enumerate() {
        if *k == proj_y {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(q) = queue.pop_front() {
        // predecessors p with xxy(p) = xyy(q)
        if let Some(preds) = by_xxy.get(xyy[q].as_slice()) {
            for &p in preds {
                if dist[p] == usize::MAX {
                    dist[p] = dist[q] + 1;
                    queue.push_back(p);
                }
            }
        }
    }
    let best = (0..cands.len())
        .filter(|&i| xyy[i] == proj_x && dist[i] != usize::MAX)
        .map(|i| dist[i])
        .min();
    let Some(best) = best else {
        return Ok(None);
    };
    if best + 2 > n_max {
        return Ok(None);
    }
    let mut current = (0..cands.len())
        .find(|&i| xyy[i] == proj_x && dist[i] == best)
        .unwrap();
    let mut terms = vec![OperationTable::projection(d, 3, 0)?, cands[current].clone()];
    while dist[current] > 0 {
        let want = dist[current] - 1;
        current = by_xyy[xxy[current].as_slice()]
            .iter()
            .copied()
            .find(|&q| dist[q] == want)
            .unwrap();
        terms.push(cands[current].clone());
    }
    terms.push(OperationTable::projection(d, 3, 2)?);
    let chain = HmChain { terms };
    debug_assert!(verify_hm_chain(&chain, s).is_ok());
    if let Err(v) = verify_hm_chain(&chain, s) {
        return Err(Error::Inconsistent(format!("search produced an invalid chain: {v}")));
    }
    Ok(Some(chain))
}

/// Convenience wrapper over [`is_polymorphism`] for every term.
pub fn chain_is_polymorphic(chain: &HmChain, s: &RelationalStructure) -> Result<bool> {
    for t in chain.terms() {
        if !is_polymorphism(t, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::relation::AllTuples;
    use crate::algebra::structure::{ak2, az2, imp2};
    use crate::exec::Exec;

    fn cfg() -> EnumerationConfig {
        EnumerationConfig {
            budget: 1 << 20,
            exec: Exec::Sequential,
        }
    }

    #[test]
    fn verify_examples() {
        assert_eq!(verify_hm_chain(&HmChain::with_middle(OperationTable::xor3()), &az2()), Ok(()));
        match verify_hm_chain(&HmChain::with_middle(OperationTable::majority()), &az2()) {
            Err(HmViolation::Equation { x, y, .. }) => assert_eq!((x, y), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
        let c0 = OperationTable::constant(2, 3, 0).unwrap();
        assert_eq!(
            verify_hm_chain(&HmChain::with_middle(c0), &az2()),
            Err(HmViolation::NotIdempotent { term: 1, x: 1 })
        );
    }

    #[test]
    fn finds_xor3() {
        for s in [ak2(), az2()] {
            let c = find_hm_chain(&s, 2, &cfg()).unwrap().unwrap();
            assert_eq!(c.n(), 2);
            assert_eq!(c.term(1), &OperationTable::xor3());
        }
    }

    /// Exhaustive reference: is there any chain of exactly `n` terms among
    /// all 256 ternary tables?
    fn naive_exists(s: &RelationalStructure, n: usize) -> bool {
        let all: Vec<OperationTable> = (0..256usize)
            .map(|i| {
                let table = (0..8).map(|b| (i >> (7 - b)) & 1).collect();
                OperationTable::new(2, 3, table).unwrap()
            })
            .filter(|p| is_polymorphism(p, s).unwrap())
            .collect();
        fn rec(s: &RelationalStructure, all: &[OperationTable], pre: &mut Vec<OperationTable>, left: usize) -> bool {
            if left == 0 {
                let mut terms = pre.clone();
                terms.push(OperationTable::projection(2, 3, 2).unwrap());
                return verify_hm_chain(&HmChain::from_terms(terms), s).is_ok();
            }
            for p in all {
                let last = pre.last().unwrap();
                let ok = AllTuples::new(2, 2).all(|t| last.apply(&[t[0], t[0], t[1]]) == p.apply(&[t[0], t[1], t[1]]));
                if ok {
                    pre.push(p.clone());
                    if rec(s, all, pre, left - 1) {
                        return true;
                    }
                    pre.pop();
                }
            }
            false
        }
        let mut pre = vec![OperationTable::projection(2, 3, 0).unwrap()];
        rec(s, &all, &mut pre, n - 1)
    }

    #[test]
    fn minimality_against_naive_search() {
        for s in [ak2(), az2(), imp2()] {
            let found = find_hm_chain(&s, 4, &cfg()).unwrap();
            let naive_min = (1..=4).find(|&n| naive_exists(&s, n));
            assert_eq!(found.as_ref().map(|c| c.n()), naive_min);
        }
    }

    #[test]
    fn imp_has_none() {
        assert!(find_hm_chain(&imp2(), 4, &cfg()).unwrap().is_none());
    }
}
