use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, Relation};
use crate::instances::PathInstance;

/// An edge `(from, to)` of `B_{i,i+1}` with `from ∈ Bᵢ∖Cᵢ` and `to ∈ C_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BackwardEdge {
    pub index: usize,
    pub from: Elem,
    pub to: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathProfile {
    /// `C₁ … C_ℓ`.
    pub forward_sets: Vec<Vec<Elem>>,
    pub backward_edges: Vec<BackwardEdge>,
    /// One flag per binary constraint, `subdirect[i-1]` for `B_{i,i+1}`.
    pub subdirect: Vec<bool>,
}

impl PathProfile {
    /// Indices `i` whose `B_{i,i+1}` holds a backward edge, ascending.
    pub fn backward_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.backward_edges.iter().map(|e| e.index).collect();
        out.dedup();
        out
    }

    pub fn is_subdirect(&self) -> bool {
        self.subdirect.iter().all(|&b| b)
    }
}

/// `C_{i+1}`: the members of `B_{i+1}` reachable from `Cᵢ` along `B_{i,i+1}`.
pub fn forward_sets(p: &PathInstance) -> Vec<Relation> {
    let mut out = vec![p.unary(1).clone()];
    for i in 1..p.len() {
        let prev = &out[i - 1];
        let next = p.unary(i + 1);
        let c = Relation::from_predicate(p.domain(), 1, |t| {
            next.contains(t) && prev.elements().iter().any(|&a| p.binary(i).contains(&[a, t[0]]))
        })
        .expect("unary relation");
        out.push(c);
    }
    out
}

/// `B_{i,i+1}` is subdirect: both sides non-empty and each covered by the
/// projections of `B_{i,i+1} ∩ (Bᵢ × B_{i+1})`.
pub fn is_subdirect_at(p: &PathInstance, i: usize) -> bool {
    let (l, r) = (p.unary(i), p.unary(i + 1));
    if l.is_empty() || r.is_empty() {
        return false;
    }
    let e = p.binary(i).restrict_binary(l, r).expect("binary relation");
    let left = e.project(&[0]).expect("projection");
    let right = e.project(&[1]).expect("projection");
    l.is_subset(&left) && r.is_subset(&right)
}

pub fn path_profile(p: &PathInstance) -> PathProfile {
    let c = forward_sets(p);
    let mut backward_edges = Vec::new();
    for i in 1..p.len() {
        for t in p.binary(i).tuples() {
            let (b, d) = (t[0], t[1]);
            if p.unary(i).contains(&[b]) && !c[i - 1].contains(&[b]) && c[i].contains(&[d]) {
                backward_edges.push(BackwardEdge {
                    index: i,
                    from: b,
                    to: d,
                });
            }
        }
    }
    PathProfile {
        forward_sets: c.iter().map(Relation::elements).collect(),
        backward_edges,
        subdirect: (1..p.len()).map(|i| is_subdirect_at(p, i)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(d: usize, a: usize, t: &[&[Elem]]) -> Relation {
        Relation::from_tuples(d, a, t.iter().map(|x| x.to_vec())).unwrap()
    }

    #[test]
    fn examples() {
        let eq = Relation::equality(2).unwrap();
        let p = PathInstance::new(
            2,
            vec![Relation::unary(2, [0]).unwrap(), Relation::full(2, 1).unwrap()],
            vec![eq.clone()],
        )
        .unwrap();
        let prof = path_profile(&p);
        assert_eq!(prof.forward_sets, vec![vec![0], vec![0]]);
        assert!(prof.backward_edges.is_empty());

        let p = PathInstance::new(
            2,
            vec![
                Relation::unary(2, [0]).unwrap(),
                Relation::full(2, 1).unwrap(),
                Relation::full(2, 1).unwrap(),
            ],
            vec![eq.clone(), rel(2, 2, &[&[0, 0], &[1, 1], &[1, 0]])],
        )
        .unwrap();
        let prof = path_profile(&p);
        assert_eq!(prof.forward_sets[2], vec![0]);
        assert_eq!(
            prof.backward_edges,
            vec![BackwardEdge {
                index: 2,
                from: 1,
                to: 0
            }]
        );
        assert_eq!(prof.backward_indices(), vec![2]);
        assert_eq!(prof.subdirect, vec![false, true]);

        let full = Relation::full(2, 1).unwrap();
        let p = PathInstance::new(2, vec![full.clone(); 4], vec![Relation::full(2, 2).unwrap(); 3]).unwrap();
        let prof = path_profile(&p);
        assert!(prof.is_subdirect());
        assert!(prof.backward_edges.is_empty());
    }

    #[test]
    fn outside_tuples_do_not_count_for_subdirectness() {
        let p = PathInstance::new(
            2,
            vec![Relation::unary(2, [0]).unwrap(), Relation::unary(2, [0]).unwrap()],
            vec![rel(2, 2, &[&[0, 1], &[1, 0]])],
        )
        .unwrap();
        assert!(!is_subdirect_at(&p, 1));
    }
}
