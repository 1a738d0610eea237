use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type Elem = usize;

/// Largest number of tuple slots a single relation may address.
pub const MAX_RELATION_SLOTS: usize = 1 << 26;

/// Mixed-radix rank of a tuple, first coordinate most significant.
pub fn encode(domain: usize, tuple: &[Elem]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * domain + a)
}

/// Inverse of [`encode`].
pub fn decode(domain: usize, arity: usize, mut rank: usize) -> Vec<Elem> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = rank % domain;
        rank /= domain;
    }
    out
}

pub fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn slots(domain: usize, arity: usize) -> Result<usize> {
    if arity == 0 {
        return Err(Error::NullaryRelation);
    }
    match checked_pow(domain, arity) {
        Some(n) if n <= MAX_RELATION_SLOTS => Ok(n),
        _ => Err(Error::RelationTooLarge { domain, arity }),
    }
}

/// Odometer over all tuples of `A^arity` in lexicographic order.
#[derive(Clone, Debug)]
pub struct AllTuples {
    domain: usize,
    current: Option<Vec<Elem>>,
}

impl AllTuples {
    pub fn new(domain: usize, arity: usize) -> Self {
        let current = if domain == 0 && arity > 0 {
            None
        } else {
            Some(vec![0; arity])
        };
        AllTuples { domain, current }
    }
}

impl Iterator for AllTuples {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.domain {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// A finite relation `R ⊆ A^arity`, stored as a bitset over tuple ranks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    domain: usize,
    arity: usize,
    bits: FixedBitSet,
}

impl Relation {
    pub fn empty(domain: usize, arity: usize) -> Result<Self> {
        let n = slots(domain, arity)?;
        Ok(Relation {
            domain,
            arity,
            bits: FixedBitSet::with_capacity(n),
        })
    }

    pub fn full(domain: usize, arity: usize) -> Result<Self> {
        let mut r = Self::empty(domain, arity)?;
        r.bits.insert_range(..);
        Ok(r)
    }

    pub fn from_tuples<I, T>(domain: usize, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Elem]>,
    {
        let mut r = Self::empty(domain, arity)?;
        for t in tuples {
            r.insert(t.as_ref())?;
        }
        Ok(r)
    }

    pub fn from_predicate(
        domain: usize,
        arity: usize,
        mut pred: impl FnMut(&[Elem]) -> bool,
    ) -> Result<Self> {
        let mut r = Self::empty(domain, arity)?;
        for (rank, t) in AllTuples::new(domain, arity).enumerate() {
            if pred(&t) {
                r.bits.insert(rank);
            }
        }
        Ok(r)
    }

    /// Unary relation from a set of elements.
    pub fn unary(domain: usize, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        Self::from_tuples(domain, 1, elems.into_iter().map(|a| [a]))
    }

    pub fn equality(domain: usize) -> Result<Self> {
        Self::from_predicate(domain, 2, |t| t[0] == t[1])
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn slot_count(&self) -> usize {
        self.bits.len()
    }

    fn check_tuple(&self, tuple: &[Elem]) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: tuple.len(),
            });
        }
        if let Some(&a) = tuple.iter().find(|&&a| a >= self.domain) {
            return Err(Error::ValueOutOfRange {
                value: a,
                domain: self.domain,
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, tuple: &[Elem]) -> Result<()> {
        self.check_tuple(tuple)?;
        self.bits.insert(encode(self.domain, tuple));
        Ok(())
    }

    pub fn remove(&mut self, tuple: &[Elem]) -> Result<()> {
        self.check_tuple(tuple)?;
        self.bits.set(encode(self.domain, tuple), false);
        Ok(())
    }

    /// Membership; tuples of the wrong shape are simply not members.
    pub fn contains(&self, tuple: &[Elem]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&a| a < self.domain)
            && self.bits.contains(encode(self.domain, tuple))
    }

    pub fn contains_rank(&self, rank: usize) -> bool {
        self.bits.contains(rank)
    }

    pub fn insert_rank(&mut self, rank: usize) {
        self.bits.insert(rank);
    }

    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        self.bits
            .ones()
            .map(move |r| decode(self.domain, self.arity, r))
    }

    fn same_shape(&self, other: &Relation) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain,
                found: other.domain,
            });
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        Ok(out)
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &Relation) -> Result<Relation> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        Ok(out)
    }

    pub fn complement(&self) -> Relation {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.domain == other.domain && self.arity == other.arity && self.bits.is_subset(&other.bits)
    }

    /// Projection onto the given coordinates, in the given order.
    pub fn project(&self, coords: &[usize]) -> Result<Relation> {
        if let Some(&c) = coords.iter().find(|&&c| c >= self.arity) {
            return Err(Error::IndexOutOfRange {
                index: c,
                len: self.arity,
            });
        }
        let mut out = Relation::empty(self.domain, coords.len())?;
        for t in self.tuples() {
            let p: Vec<Elem> = coords.iter().map(|&c| t[c]).collect();
            out.bits.insert(encode(self.domain, &p));
        }
        Ok(out)
    }

    /// Reversal of a binary relation.
    pub fn converse(&self) -> Result<Relation> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: self.arity,
            });
        }
        self.project(&[1, 0])
    }

    /// Elements of a unary relation.
    pub fn elements(&self) -> Vec<Elem> {
        self.bits.ones().collect()
    }

    /// Restriction of a binary relation to `left × right`.
    pub fn restrict_binary(&self, left: &Relation, right: &Relation) -> Result<Relation> {
        if self.arity != 2 || left.arity != 1 || right.arity != 1 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: self.arity,
            });
        }
        let mut out = Relation::empty(self.domain, 2)?;
        for t in self.tuples() {
            if left.contains_rank(t[0]) && right.contains_rank(t[1]) {
                out.insert_rank(encode(self.domain, &t));
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation[d={}, n={}]{}", self.domain, self.arity, self)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let parts: Vec<String> = t.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_roundtrip() {
        for r in 0..27 {
            assert_eq!(encode(3, &decode(3, 3, r)), r);
        }
        assert_eq!(encode(2, &[1, 0, 1]), 5);
    }

    #[test]
    fn all_tuples_lex() {
        let v: Vec<_> = AllTuples::new(2, 2).collect();
        assert_eq!(v, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(AllTuples::new(3, 0).count(), 1);
        assert_eq!(AllTuples::new(0, 2).count(), 0);
    }

    #[test]
    fn membership_and_shape_errors() {
        let mut r = Relation::empty(2, 2).unwrap();
        r.insert(&[0, 1]).unwrap();
        assert!(r.contains(&[0, 1]));
        assert!(!r.contains(&[1, 0]));
        assert!(!r.contains(&[0]));
        assert!(r.insert(&[2, 0]).is_err());
        assert!(r.insert(&[0]).is_err());
        assert_eq!(Relation::empty(2, 0), Err(Error::NullaryRelation));
        assert!(matches!(
            Relation::empty(8, 40),
            Err(Error::RelationTooLarge { .. })
        ));
    }

    #[test]
    fn projection_and_display() {
        let r = Relation::from_tuples(2, 3, [[0, 1, 1], [1, 0, 1]]).unwrap();
        assert_eq!(r.project(&[2]).unwrap().elements(), vec![1]);
        assert_eq!(r.project(&[1, 0]).unwrap().to_string(), "{(0,1), (1,0)}");
        assert!(r.project(&[3]).is_err());
    }

    proptest! {
        #[test]
        fn set_algebra(a in proptest::collection::vec(any::<bool>(), 9),
                       b in proptest::collection::vec(any::<bool>(), 9)) {
            let ra = Relation::from_predicate(3, 2, |t| a[encode(3, t)]).unwrap();
            let rb = Relation::from_predicate(3, 2, |t| b[encode(3, t)]).unwrap();
            let i = ra.intersection(&rb).unwrap();
            let u = ra.union(&rb).unwrap();
            prop_assert!(i.is_subset(&ra) && i.is_subset(&rb));
            prop_assert!(ra.is_subset(&u) && rb.is_subset(&u));
            prop_assert_eq!(i.len() + u.len(), ra.len() + rb.len());
            prop_assert_eq!(ra.complement().complement(), ra.clone());
            prop_assert_eq!(ra.converse().unwrap().converse().unwrap(), ra);
        }
    }
}
