use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::csp::{CspInstance, Var};

/// Bags `U₁ … U_m` of a path decomposition of declared width `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub bags: Vec<BTreeSet<Var>>,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionIssue {
    BagTooLarge { bag: usize, size: usize },
    NotConvex { var: Var },
    UncoveredConstraint { constraint: usize },
    UnknownVariable { var: Var },
}

impl fmt::Display for DecompositionIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionIssue::BagTooLarge { bag, size } => {
                write!(f, "bag {bag} has {size} variables")
            }
            DecompositionIssue::NotConvex { var } => {
                write!(f, "bags containing variable {var} are not consecutive")
            }
            DecompositionIssue::UncoveredConstraint { constraint } => {
                write!(f, "no bag covers constraint {constraint}")
            }
            DecompositionIssue::UnknownVariable { var } => {
                write!(f, "variable {var} is not part of the instance")
            }
        }
    }
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<Var>>, width: usize) -> Self {
        PathDecomposition { bags, width }
    }

    pub fn from_slices(bags: &[&[Var]], width: usize) -> Self {
        PathDecomposition {
            bags: bags.iter().map(|b| b.iter().copied().collect()).collect(),
            width,
        }
    }

    /// Every violated condition, in bag/variable/constraint order.
    pub fn issues(&self, i: &CspInstance) -> Vec<DecompositionIssue> {
        let mut out = Vec::new();
        for (b, bag) in self.bags.iter().enumerate() {
            if bag.len() > self.width + 1 {
                out.push(DecompositionIssue::BagTooLarge {
                    bag: b,
                    size: bag.len(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for bag in &self.bags {
            for &v in bag {
                if v >= i.num_vars() && seen.insert(v) {
                    out.push(DecompositionIssue::UnknownVariable { var: v });
                }
            }
        }
        for v in 0..i.num_vars() {
            let idx: Vec<usize> = (0..self.bags.len())
                .filter(|&b| self.bags[b].contains(&v))
                .collect();
            if let (Some(&lo), Some(&hi)) = (idx.first(), idx.last()) {
                if hi - lo + 1 != idx.len() {
                    out.push(DecompositionIssue::NotConvex { var: v });
                }
            }
        }
        for (c, con) in i.constraints().iter().enumerate() {
            if !self
                .bags
                .iter()
                .any(|bag| con.scope.iter().all(|v| bag.contains(v)))
            {
                out.push(DecompositionIssue::UncoveredConstraint { constraint: c });
            }
        }
        out
    }
}

pub fn check_path_decomposition(i: &CspInstance, d: &PathDecomposition) -> bool {
    d.issues(i).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ak2;

    #[test]
    fn examples() {
        let mut i = CspInstance::with_variables(ak2(), 3);
        i.add_constraint(vec![0, 1], "NEQ");
        i.add_constraint(vec![1, 2], "NEQ");
        let ok = PathDecomposition::from_slices(&[&[0, 1], &[1, 2]], 1);
        assert!(check_path_decomposition(&i, &ok));
        let narrow = PathDecomposition::from_slices(&[&[0, 1], &[1, 2]], 0);
        assert!(!check_path_decomposition(&i, &narrow));
        let gap = PathDecomposition::from_slices(&[&[0, 1], &[2], &[1, 2]], 1);
        assert_eq!(gap.issues(&i), vec![DecompositionIssue::NotConvex { var: 1 }]);
        let uncovered = PathDecomposition::from_slices(&[&[0], &[1, 2]], 1);
        assert_eq!(
            uncovered.issues(&i),
            vec![DecompositionIssue::UncoveredConstraint { constraint: 0 }]
        );
    }
}
