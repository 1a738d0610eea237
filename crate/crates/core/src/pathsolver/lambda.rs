use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, Relation};
use crate::canon::{Derivation, Fact, SideAtom};
use crate::error::Result;
use crate::instances::PathInstance;

/// `λ_{I,i,j}`: pairs `(a,b) ∈ Bᵢ × B_j` joined by a path in the window's
/// microstructure when edges may be walked in either direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaRelation {
    pub i: usize,
    pub j: usize,
    pub pairs: Vec<(Elem, Elem)>,
}

impl LambdaRelation {
    pub fn relation(&self, domain: usize) -> Relation {
        Relation::from_tuples(domain, 2, self.pairs.iter().map(|&(a, b)| [a, b])).expect("binary relation")
    }
}

/// For every `a ∈ Bᵢ`, the vertices `(k, b)` with `i ≤ k ≤ j` reachable
/// from `(i, a)`; `seen[k - i][b]`.
fn components(p: &PathInstance, i: usize, j: usize, both_ways: bool) -> Vec<(Elem, Vec<Vec<bool>>)> {
    let d = p.domain();
    let edges: Vec<Relation> = (i..j)
        .map(|k| p.binary(k).restrict_binary(p.unary(k), p.unary(k + 1)).expect("binary relation"))
        .collect();
    p.unary(i)
        .elements()
        .into_iter()
        .map(|a| {
            let mut seen = vec![vec![false; d]; j - i + 1];
            seen[0][a] = true;
            let mut queue = VecDeque::from([(0usize, a)]);
            let levels = seen.len();
            while let Some((lvl, x)) = queue.pop_front() {
                let mut next = Vec::new();
                for y in 0..d {
                    if lvl + 1 < levels && edges[lvl].contains(&[x, y]) {
                        next.push((lvl + 1, y));
                    }
                    if both_ways && lvl > 0 && edges[lvl - 1].contains(&[y, x]) {
                        next.push((lvl - 1, y));
                    }
                }
                for (l, y) in next {
                    if !seen[l][y] {
                        seen[l][y] = true;
                        queue.push_back((l, y));
                    }
                }
            }
            (a, seen)
        })
        .collect()
}

fn pairs_at(comps: &[(Elem, Vec<Vec<bool>>)], level: usize) -> Vec<(Elem, Elem)> {
    let mut out = Vec::new();
    for (a, seen) in comps {
        for (b, &hit) in seen[level].iter().enumerate() {
            if hit {
                out.push((*a, b));
            }
        }
    }
    out
}

pub fn lambda_relation(p: &PathInstance, i: usize, j: usize) -> Result<LambdaRelation> {
    p.check_range(i, j)?;
    let comps = components(p, i, j, true);
    Ok(LambdaRelation {
        i,
        j,
        pairs: pairs_at(&comps, j - i),
    })
}

/// Pairs `(a,b) ∈ Bᵢ × B_j` joined by a path that only moves forward; on
/// `[1, j]` its image is the forward set `C_j`.
pub fn forward_relation(p: &PathInstance, i: usize, j: usize) -> Result<LambdaRelation> {
    p.check_range(i, j)?;
    let comps = components(p, i, j, false);
    Ok(LambdaRelation {
        i,
        j,
        pairs: pairs_at(&comps, j - i),
    })
}

/// `ρ_k` for `k = i..=j`: pairs `(a,b) ∈ Bᵢ × B_k` joined by an undirected
/// path staying inside levels `i..=j`. The last one is `λ_{I,i,j}`.
pub fn rho_relations(p: &PathInstance, i: usize, j: usize) -> Result<Vec<Relation>> {
    p.check_range(i, j)?;
    let comps = components(p, i, j, true);
    Ok((0..=j - i)
        .map(|lvl| {
            Relation::from_tuples(p.domain(), 2, pairs_at(&comps, lvl).into_iter().map(|(a, b)| [a, b]))
                .expect("binary relation")
        })
        .collect())
}

/// The facts `ρ_k(xᵢ, x_k)` in normal form, over the variables of
/// [`PathInstance::to_csp`].
pub fn rho_facts(p: &PathInstance, i: usize, j: usize) -> Result<Vec<Fact>> {
    rho_relations(p, i, j)?
        .iter()
        .enumerate()
        .map(|(off, r)| Fact::new(&[i - 1, i - 1 + off], r))
        .collect()
}

/// `ρᵢ(xᵢ,xᵢ) ← Bᵢ(xᵢ)`, then for each `k`
/// `ρ_{k+1}(xᵢ,x_{k+1}) ← ρ_k(xᵢ,x_k), B_{k,k+1}(x_k,x_{k+1}), B_k(x_k), B_{k+1}(x_{k+1})`.
///
/// The unary guards keep the mirror rule consistent when `B_{k,k+1}` has
/// tuples outside `B_k × B_{k+1}`. Over the variables of
/// [`PathInstance::to_csp`]; every rule has at most 3 variables.
pub fn lambda_derivation(p: &PathInstance, i: usize, j: usize) -> Result<Derivation> {
    let facts = rho_facts(p, i, j)?;
    let mut d = Derivation {
        premise: None,
        steps: Vec::with_capacity(facts.len()),
    };
    let unary = |k: usize| SideAtom::new(PathInstance::unary_name(k), vec![k - 1]);
    let mut facts = facts.into_iter();
    d.push(facts.next().expect("ρᵢ"), vec![unary(i)]);
    for (k, f) in (i..j).zip(facts) {
        d.push(
            f,
            vec![
                SideAtom::new(PathInstance::binary_name(k), vec![k - 1, k]),
                unary(k),
                unary(k + 1),
            ],
        );
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{replay, CanonConfig};

    fn rel(t: &[[Elem; 2]]) -> Relation {
        Relation::from_tuples(2, 2, t.iter().copied()).unwrap()
    }

    fn full3(b12: Relation, b23: Relation) -> PathInstance {
        PathInstance::new(2, vec![Relation::full(2, 1).unwrap(); 3], vec![b12, b23]).unwrap()
    }

    #[test]
    fn examples() {
        let p = full3(rel(&[[0, 0]]), rel(&[[0, 1]]));
        assert_eq!(lambda_relation(&p, 2, 2).unwrap().pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(lambda_relation(&p, 1, 3).unwrap().pairs, vec![(0, 1)]);

        let p = full3(rel(&[[0, 0], [1, 0]]), rel(&[[0, 1]]));
        let l = lambda_relation(&p, 1, 3).unwrap();
        assert!(l.pairs.contains(&(1, 1)));
        assert_eq!(forward_relation(&p, 1, 3).unwrap().pairs, vec![(0, 1), (1, 1)]);
        assert!(lambda_relation(&p, 3, 1).is_err());
        assert!(lambda_relation(&p, 1, 4).is_err());
    }

    #[test]
    fn zigzag_is_not_forward() {
        let p = full3(rel(&[[0, 0], [1, 0], [1, 1]]), rel(&[[1, 0]]));
        // 0@1 – 0@2 – 1@1 – 1@2 – 0@3
        let l = lambda_relation(&p, 1, 2).unwrap();
        assert_eq!(l.pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(forward_relation(&p, 1, 2).unwrap().pairs, vec![(0, 0), (1, 0), (1, 1)]);
    }

    #[test]
    fn derivations_replay() {
        let p = full3(rel(&[[0, 0], [1, 0]]), rel(&[[0, 1]]));
        let i = p.to_csp();
        for (a, b) in [(1, 1), (1, 2), (1, 3), (2, 3)] {
            let d = lambda_derivation(&p, a, b).unwrap();
            assert_eq!(d.steps.len(), b - a + 1);
            let fam: Vec<Relation> = d.steps.iter().map(|s| s.head.relation().clone()).collect();
            let rep = replay(&i, &d, &CanonConfig::explicit(3, fam)).unwrap();
            assert!(rep.width <= 3);
            let lam = lambda_relation(&p, a, b).unwrap().relation(2);
            assert_eq!(rep.final_fact, Fact::new(&[a - 1, b - 1], &lam).unwrap());
        }
    }
}
