use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values of the width recursion `f(n,1) = 2`, `f(n,N) = f(n,N-1) + 2m(N) + 6`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub m_values: BTreeMap<usize, u64>,
    pub f_values: BTreeMap<usize, u64>,
    /// `L = 2m + 2` for each `N′ ≥ 2`.
    pub window_lengths: BTreeMap<usize, u64>,
}

impl BoundsReport {
    pub fn f(&self) -> u64 {
        self.f_values[&self.big_n]
    }
}

fn overflow() -> Error {
    Error::Precondition("width bound overflows u64".into())
}

pub fn f_bound(n: usize, big_n: usize, m_of: &BTreeMap<usize, u64>) -> Result<BoundsReport> {
    if n == 0 || big_n == 0 {
        return Err(Error::Precondition("n and N must be positive".into()));
    }
    let mut f_values = BTreeMap::from([(1, 2u64)]);
    let mut m_values = BTreeMap::new();
    let mut window_lengths = BTreeMap::new();
    let mut f = 2u64;
    for k in 2..=big_n {
        let m = *m_of
            .get(&k)
            .ok_or_else(|| Error::Precondition(format!("no m given for N′ = {k}")))?;
        let l = m.checked_mul(2).and_then(|x| x.checked_add(2)).ok_or_else(overflow)?;
        f = f.checked_add(l).and_then(|x| x.checked_add(4)).ok_or_else(overflow)?;
        m_values.insert(k, m);
        window_lengths.insert(k, l);
        f_values.insert(k, f);
    }
    Ok(BoundsReport {
        n,
        big_n,
        m_values,
        f_values,
        window_lengths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(f_bound(2, 1, &BTreeMap::new()).unwrap().f(), 2);
        assert_eq!(f_bound(3, 2, &BTreeMap::from([(2, 10)])).unwrap().f(), 28);
        let ones: BTreeMap<usize, u64> = (2..=3).map(|k| (k, 1)).collect();
        let r = f_bound(2, 3, &ones).unwrap();
        assert_eq!(r.f_values.values().copied().collect::<Vec<_>>(), vec![2, 10, 18]);
        assert_eq!(r.window_lengths[&2], 4);
        assert!(f_bound(2, 3, &BTreeMap::from([(2, 1)])).is_err());
        assert!(f_bound(2, 2, &BTreeMap::from([(2, u64::MAX)])).is_err());
    }
}
