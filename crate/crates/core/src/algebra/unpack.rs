use crate::error::{Error, Result};

use super::relation::{checked_pow, decode, encode, Elem, Relation};

/// Flattens a tuple of `k`-tuples into one tuple of length `k·ℓ`.
pub fn unpack<T: Clone>(sigma: &[Vec<T>]) -> Result<Vec<T>> {
    let k = sigma.first().map_or(0, |s| s.len());
    let mut out = Vec::with_capacity(k * sigma.len());
    for s in sigma {
        if s.len() != k {
            return Err(Error::RaggedTuples {
                expected: k,
                found: s.len(),
            });
        }
        out.extend_from_slice(s);
    }
    Ok(out)
}

/// The element of `A^k` encoding `coords`.
pub fn pack_tuple(base_domain: usize, coords: &[Elem]) -> Elem {
    encode(base_domain, coords)
}

/// Relation over `A^k` (elements encoded as ranks) to its unpacked
/// relation over `A` of arity `k·arity`.
pub fn unpack_relation(rel: &Relation, base_domain: usize, k: usize) -> Result<Relation> {
    let big = checked_pow(base_domain, k).ok_or(Error::RelationTooLarge {
        domain: base_domain,
        arity: k,
    })?;
    if rel.domain() != big {
        return Err(Error::DomainMismatch {
            expected: big,
            found: rel.domain(),
        });
    }
    let mut out = Relation::empty(base_domain, k * rel.arity())?;
    for t in rel.tuples() {
        let flat: Vec<Elem> = t.iter().flat_map(|&e| decode(base_domain, k, e)).collect();
        out.insert(&flat)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(unpack(&[vec![0, 1], vec![1, 1]]).unwrap(), vec![0, 1, 1, 1]);
        assert_eq!(unpack(&[vec![5]]).unwrap(), vec![5]);
        assert!(matches!(
            unpack(&[vec![0, 1], vec![1]]),
            Err(Error::RaggedTuples { .. })
        ));
        let r = Relation::from_tuples(4, 1, [[0]]).unwrap();
        let u = unpack_relation(&r, 2, 2).unwrap();
        assert_eq!(u.tuples().collect::<Vec<_>>(), vec![vec![0, 0]]);
    }

    proptest! {
        #[test]
        fn unpack_shape_and_injective(a in proptest::collection::vec(proptest::collection::vec(0usize..3, 3), 1..5),
                                      b in proptest::collection::vec(proptest::collection::vec(0usize..3, 3), 1..5)) {
            let ua = unpack(&a).unwrap();
            prop_assert_eq!(ua.len(), 3 * a.len());
            if a.len() == b.len() {
                prop_assert_eq!(ua == unpack(&b).unwrap(), a == b);
            }
        }
    }
}
