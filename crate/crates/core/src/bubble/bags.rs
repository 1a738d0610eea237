use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{PathDecomposition, Var};

/// A bag listed as a `k`-tuple: increasing in the chosen order, the largest
/// member repeated to fill the tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BagTuple {
    pub chi: Vec<Var>,
}

impl BagTuple {
    /// `rank[v]` is the position of `v` in the linear order.
    pub fn new(bag: &BTreeSet<Var>, k: usize, rank: &[usize]) -> Result<BagTuple> {
        if bag.is_empty() || bag.len() > k {
            return Err(Error::InvalidDecomposition(format!(
                "bag of {} variables does not fit a {k}-tuple",
                bag.len()
            )));
        }
        let mut chi: Vec<Var> = bag.iter().copied().collect();
        if let Some(&v) = chi.iter().find(|&&v| v >= rank.len()) {
            return Err(Error::VariableOutOfRange(v));
        }
        chi.sort_by_key(|&v| rank[v]);
        let last = *chi.last().unwrap();
        chi.resize(k, last);
        Ok(BagTuple { chi })
    }

    /// Positions `j` with `chi[j] == v`.
    pub fn positions(&self, v: Var) -> impl Iterator<Item = usize> + '_ {
        self.chi.iter().enumerate().filter(move |(_, &w)| w == v).map(|(j, _)| j)
    }

    pub fn members(&self) -> BTreeSet<Var> {
        self.chi.iter().copied().collect()
    }
}

fn check_convex(d: &PathDecomposition) -> Result<()> {
    let vars: BTreeSet<Var> = d.bags.iter().flatten().copied().collect();
    for v in vars {
        let idx: Vec<usize> = (0..d.bags.len()).filter(|&b| d.bags[b].contains(&v)).collect();
        if idx.last().unwrap() - idx[0] + 1 != idx.len() {
            return Err(Error::InvalidDecomposition(format!(
                "bags containing variable {v} are not consecutive"
            )));
        }
    }
    Ok(())
}

/// Repeatedly drops a bag contained in a neighbour, so that neighbouring
/// bags are incomparable and all bags are distinct.
pub fn normalize_bags(d: &PathDecomposition) -> Result<PathDecomposition> {
    check_convex(d)?;
    let mut bags: Vec<BTreeSet<Var>> = d.bags.clone();
    let mut i = 0;
    while i + 1 < bags.len() {
        if bags[i].is_subset(&bags[i + 1]) {
            bags.remove(i);
            i = i.saturating_sub(1);
        } else if bags[i + 1].is_subset(&bags[i]) {
            bags.remove(i + 1);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    Ok(PathDecomposition::new(bags, d.width))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bags(d: &PathDecomposition) -> Vec<Vec<Var>> {
        d.bags.iter().map(|b| b.iter().copied().collect()).collect()
    }

    #[test]
    fn normalization_examples() {
        let d = PathDecomposition::from_slices(&[&[0], &[0, 1]], 1);
        assert_eq!(bags(&normalize_bags(&d).unwrap()), vec![vec![0, 1]]);
        let d = PathDecomposition::from_slices(&[&[0, 1], &[1, 2]], 1);
        assert_eq!(normalize_bags(&d).unwrap(), d);
        let d = PathDecomposition::from_slices(&[&[0, 1], &[0, 1], &[1, 2]], 1);
        assert_eq!(bags(&normalize_bags(&d).unwrap()), vec![vec![0, 1], vec![1, 2]]);
        let d = PathDecomposition::from_slices(&[&[0, 1], &[1], &[1, 2], &[2], &[2]], 1);
        assert_eq!(bags(&normalize_bags(&d).unwrap()), vec![vec![0, 1], vec![1, 2]]);
        let bad = PathDecomposition::from_slices(&[&[0, 1], &[1, 2], &[2, 0]], 1);
        assert!(normalize_bags(&bad).is_err());
    }

    #[test]
    fn tuples_pad_with_the_maximum() {
        let rank = [2, 0, 1];
        let t = BagTuple::new(&BTreeSet::from([0, 2]), 3, &rank).unwrap();
        assert_eq!(t.chi, vec![2, 0, 0]);
        assert_eq!(t.positions(0).collect::<Vec<_>>(), vec![1, 2]);
        assert!(BagTuple::new(&BTreeSet::new(), 2, &rank).is_err());
        assert!(BagTuple::new(&BTreeSet::from([0, 1, 2]), 2, &rank).is_err());
    }
}
