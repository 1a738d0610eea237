use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{budget_error, Error, Result};
use crate::exec::Exec;

use super::relation::{checked_pow, decode, encode, AllTuples, Elem, Relation};
use super::structure::RelationalStructure;

/// Default cap on the number of candidate tables an enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 20;

/// A total `arity`-ary operation on `{0, …, domain−1}`.
///
/// `table[encode(domain, args)]` is the value on `args`, so the table is
/// listed in lexicographic input order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperationTable {
    domain: usize,
    arity: usize,
    table: Vec<Elem>,
}

impl OperationTable {
    pub fn new(domain: usize, arity: usize, table: Vec<Elem>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::NullaryRelation);
        }
        let expected = checked_pow(domain, arity)
            .ok_or(Error::RelationTooLarge { domain, arity })?;
        if table.len() != expected {
            return Err(Error::TableLength {
                expected,
                found: table.len(),
            });
        }
        if let Some(&v) = table.iter().find(|&&v| v >= domain) {
            return Err(Error::ValueOutOfRange { value: v, domain });
        }
        Ok(OperationTable {
            domain,
            arity,
            table,
        })
    }

    pub fn from_fn(domain: usize, arity: usize, f: impl Fn(&[Elem]) -> Elem) -> Result<Self> {
        let table = AllTuples::new(domain, arity).map(|t| f(&t)).collect();
        Self::new(domain, arity, table)
    }

    /// The `i`-th projection (0-based).
    pub fn projection(domain: usize, arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: arity,
            });
        }
        Self::from_fn(domain, arity, |t| t[i])
    }

    pub fn constant(domain: usize, arity: usize, value: Elem) -> Result<Self> {
        Self::from_fn(domain, arity, |_| value)
    }

    /// `x ⊕ y ⊕ z` on `{0,1}`.
    pub fn xor3() -> Self {
        Self::from_fn(2, 3, |t| t[0] ^ t[1] ^ t[2]).unwrap()
    }

    /// Boolean majority.
    pub fn majority() -> Self {
        Self::from_fn(2, 3, |t| usize::from(t[0] + t[1] + t[2] >= 2)).unwrap()
    }

    pub fn min2(domain: usize) -> Self {
        Self::from_fn(domain, 2, |t| t[0].min(t[1])).unwrap()
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, args: &[Elem]) -> Elem {
        debug_assert_eq!(args.len(), self.arity);
        self.table[encode(self.domain, args)]
    }

    /// Coordinatewise application to `arity` rows of equal length.
    pub fn apply_rows(&self, rows: &[&[Elem]]) -> Vec<Elem> {
        let len = rows.first().map_or(0, |r| r.len());
        let mut args = vec![0; self.arity];
        (0..len)
            .map(|c| {
                for (a, r) in args.iter_mut().zip(rows) {
                    *a = r[c];
                }
                self.apply(&args)
            })
            .collect()
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.domain).all(|a| self.apply(&vec![a; self.arity]) == a)
    }

    /// Number of argument permutations leaving the operation unchanged.
    pub fn symmetry_count(&self) -> usize {
        let mut perm: Vec<usize> = (0..self.arity).collect();
        let mut count = 0;
        loop {
            let fixed = AllTuples::new(self.domain, self.arity).all(|t| {
                let p: Vec<Elem> = perm.iter().map(|&i| t[i]).collect();
                self.apply(&p) == self.apply(&t)
            });
            if fixed {
                count += 1;
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        count
    }

    /// The same operation acting coordinatewise on `A^k`, whose elements are
    /// encoded as mixed-radix ranks of `k`-tuples.
    pub fn power(&self, k: usize) -> Result<OperationTable> {
        let big = checked_pow(self.domain, k).ok_or(Error::RelationTooLarge {
            domain: self.domain,
            arity: k,
        })?;
        let d = self.domain;
        OperationTable::from_fn(big, self.arity, |args| {
            let rows: Vec<Vec<Elem>> = args.iter().map(|&a| decode(d, k, a)).collect();
            let refs: Vec<&[Elem]> = rows.iter().map(|r| r.as_slice()).collect();
            encode(d, &self.apply_rows(&refs))
        })
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

impl fmt::Debug for OperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Op[d={}, n={}]{:?}", self.domain, self.arity, self.table)
    }
}

impl fmt::Display for OperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.table.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Does `op` map every `arity`-selection of rows of `rel` back into `rel`?
pub fn check_preserves(op: &OperationTable, rel: &Relation) -> Result<bool> {
    if op.domain != rel.domain() {
        return Err(Error::DomainMismatch {
            expected: op.domain,
            found: rel.domain(),
        });
    }
    let rows: Vec<Vec<Elem>> = rel.tuples().collect();
    if rows.is_empty() {
        return Ok(true);
    }
    let mut pick = vec![0usize; op.arity];
    let mut args = vec![0; op.arity];
    let mut image = vec![0; rel.arity()];
    loop {
        for (c, slot) in image.iter_mut().enumerate() {
            for (a, &p) in args.iter_mut().zip(&pick) {
                *a = rows[p][c];
            }
            *slot = op.apply(&args);
        }
        if !rel.contains(&image) {
            return Ok(false);
        }
        let mut i = op.arity;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < rows.len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

pub fn is_polymorphism(op: &OperationTable, s: &RelationalStructure) -> Result<bool> {
    if op.domain != s.domain_size() {
        return Err(Error::DomainMismatch {
            expected: s.domain_size(),
            found: op.domain,
        });
    }
    for (_, rel) in s.relations() {
        if !check_preserves(op, rel)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub budget: u64,
    pub exec: Exec,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            budget: DEFAULT_ENUMERATION_BUDGET,
            exec: Exec::default(),
        }
    }
}

/// Tables with the given entries pinned, in lexicographic order of the table.
fn enumerate_tables(
    s: &RelationalStructure,
    arity: usize,
    pinned: &[(usize, Elem)],
    cfg: &EnumerationConfig,
) -> Result<Vec<OperationTable>> {
    let d = s.domain_size();
    let entries = checked_pow(d, arity).ok_or(Error::RelationTooLarge { domain: d, arity })?;
    let free: Vec<usize> = (0..entries)
        .filter(|e| !pinned.iter().any(|(p, _)| p == e))
        .collect();
    let count = checked_pow(d, free.len())
        .map(|c| c as u64)
        .filter(|&c| c <= cfg.budget)
        .ok_or_else(|| {
            budget_error(
                format!("enumerating {arity}-ary tables over a {d}-element domain"),
                format!("{d}^{}", free.len()),
                cfg.budget,
            )
        })?;
    let mut template = vec![0; entries];
    for &(p, v) in pinned {
        template[p] = v;
    }
    let out = cfg.exec.filter_map_range(0..count, |idx| {
        let mut table = template.clone();
        let digits = decode(d, free.len(), idx as usize);
        for (&slot, v) in free.iter().zip(digits) {
            table[slot] = v;
        }
        let op = OperationTable {
            domain: d,
            arity,
            table,
        };
        match is_polymorphism(&op, s) {
            Ok(true) => Some(op),
            _ => None,
        }
    });
    Ok(out)
}

/// All polymorphisms of the given arity, in lexicographic table order.
pub fn enumerate_polymorphisms(
    s: &RelationalStructure,
    arity: usize,
    cfg: &EnumerationConfig,
) -> Result<Vec<OperationTable>> {
    if arity == 0 {
        return Err(Error::NullaryRelation);
    }
    enumerate_tables(s, arity, &[], cfg)
}

/// Idempotent polymorphisms only; the diagonal entries are pinned, so the
/// budget applies to the remaining `|A|^arity − |A|` entries.
pub fn enumerate_idempotent_polymorphisms(
    s: &RelationalStructure,
    arity: usize,
    cfg: &EnumerationConfig,
) -> Result<Vec<OperationTable>> {
    if arity == 0 {
        return Err(Error::NullaryRelation);
    }
    let d = s.domain_size();
    let pinned: Vec<(usize, Elem)> = (0..d).map(|a| (encode(d, &vec![a; arity]), a)).collect();
    enumerate_tables(s, arity, &pinned, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure::{ak2, az2};

    fn neq() -> Relation {
        Relation::from_tuples(2, 2, [[0, 1], [1, 0]]).unwrap()
    }

    #[test]
    fn preserves_examples() {
        assert!(check_preserves(&OperationTable::majority(), &neq()).unwrap());
        assert!(!check_preserves(&OperationTable::min2(2), &neq()).unwrap());
        let c0 = Relation::unary(2, [0]).unwrap();
        assert!(check_preserves(&OperationTable::xor3(), &c0).unwrap());
        let r3 = Relation::full(3, 1).unwrap();
        assert!(check_preserves(&OperationTable::xor3(), &r3).is_err());
    }

    #[test]
    fn polymorphism_examples() {
        assert!(is_polymorphism(&OperationTable::xor3(), &ak2()).unwrap());
        assert!(!is_polymorphism(&OperationTable::min2(2), &ak2()).unwrap());
        let id = OperationTable::projection(2, 1, 0).unwrap();
        assert!(is_polymorphism(&id, &az2()).unwrap());
    }

    #[test]
    fn table_validation() {
        assert!(matches!(
            OperationTable::new(2, 2, vec![0, 1, 1]),
            Err(Error::TableLength { .. })
        ));
        assert!(matches!(
            OperationTable::new(2, 1, vec![0, 2]),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert_eq!(OperationTable::xor3().table(), &[0, 1, 1, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn symmetry_and_power() {
        assert_eq!(OperationTable::xor3().symmetry_count(), 6);
        assert_eq!(OperationTable::projection(2, 3, 0).unwrap().symmetry_count(), 2);
        let p = OperationTable::xor3().power(2).unwrap();
        assert_eq!(p.domain(), 4);
        // (0,1) ⊕ (1,1) ⊕ (1,0) = (0,0)
        assert_eq!(p.apply(&[1, 3, 2]), 0);
        assert!(p.is_idempotent());
    }

    #[test]
    fn budget_enforced() {
        let cfg = EnumerationConfig {
            budget: 100,
            exec: Exec::Sequential,
        };
        assert!(matches!(
            enumerate_polymorphisms(&ak2(), 3, &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
        assert_eq!(enumerate_idempotent_polymorphisms(&ak2(), 3, &cfg).unwrap().len(), 8);
    }
}
