use std::sync::Arc;

use crate::algebra::{Elem, Relation, RelationalStructure};
use crate::error::{Error, Result};

use super::csp::CspInstance;

/// A chain `x₁ … x_ℓ` with one unary constraint `Bᵢ` per variable and one
/// binary constraint `B_{i,i+1}` per consecutive pair.
///
/// Indices in the public API are 1-based. Binary constraints may contain
/// tuples outside `Bᵢ × B_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathInstance {
    domain: usize,
    unary: Vec<Relation>,
    binary: Vec<Relation>,
}

impl PathInstance {
    pub fn new(domain: usize, unary: Vec<Relation>, binary: Vec<Relation>) -> Result<Self> {
        if unary.is_empty() {
            return Err(Error::Precondition("a path instance needs at least one variable".into()));
        }
        if binary.len() + 1 != unary.len() {
            return Err(Error::Precondition(format!(
                "{} unary constraints need {} binary constraints, found {}",
                unary.len(),
                unary.len() - 1,
                binary.len()
            )));
        }
        for (r, arity) in unary.iter().map(|r| (r, 1)).chain(binary.iter().map(|r| (r, 2))) {
            if r.domain() != domain {
                return Err(Error::DomainMismatch {
                    expected: domain,
                    found: r.domain(),
                });
            }
            if r.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: r.arity(),
                });
            }
        }
        Ok(PathInstance {
            domain,
            unary,
            binary,
        })
    }

    /// Compact form: relation names resolved in `s`.
    pub fn from_names(s: &RelationalStructure, unary: &[&str], binary: &[&str]) -> Result<Self> {
        let u = unary
            .iter()
            .map(|n| s.relation(n).cloned())
            .collect::<Result<_>>()?;
        let b = binary
            .iter()
            .map(|n| s.relation(n).cloned())
            .collect::<Result<_>>()?;
        Self::new(s.domain_size(), u, b)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.unary.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Bᵢ`, 1-based.
    pub fn unary(&self, i: usize) -> &Relation {
        &self.unary[i - 1]
    }

    /// `B_{i,i+1}`, 1-based.
    pub fn binary(&self, i: usize) -> &Relation {
        &self.binary[i - 1]
    }

    pub fn unaries(&self) -> &[Relation] {
        &self.unary
    }

    pub fn binaries(&self) -> &[Relation] {
        &self.binary
    }

    /// Largest unary constraint size `N`.
    pub fn max_unary(&self) -> usize {
        self.unary.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    pub fn check_range(&self, a: usize, b: usize) -> Result<()> {
        for x in [a, b] {
            if x == 0 || x > self.len() {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: self.len(),
                });
            }
        }
        if a > b {
            return Err(Error::Precondition(format!("empty range [{a},{b}]")));
        }
        Ok(())
    }

    /// The induced path instance on `a..=b`, reindexed from 1.
    pub fn restrict(&self, a: usize, b: usize) -> Result<PathInstance> {
        self.check_range(a, b)?;
        Ok(PathInstance {
            domain: self.domain,
            unary: self.unary[a - 1..b].to_vec(),
            binary: self.binary[a - 1..b - 1].to_vec(),
        })
    }

    pub fn is_solution(&self, values: &[Elem]) -> bool {
        values.len() == self.len()
            && values
                .iter()
                .zip(&self.unary)
                .all(|(&a, r)| r.contains(&[a]))
            && values
                .windows(2)
                .zip(&self.binary)
                .all(|(w, r)| r.contains(w))
    }

    pub fn unary_name(i: usize) -> String {
        format!("B{i}")
    }

    pub fn binary_name(i: usize) -> String {
        format!("B{i}_{}", i + 1)
    }

    pub fn var_name(i: usize) -> String {
        format!("x{i}")
    }

    /// The structure holding `B{i}` and `B{i}_{i+1}` by name.
    pub fn structure(&self) -> RelationalStructure {
        let mut s = RelationalStructure::new(self.domain).expect("non-empty domain");
        for (i, r) in self.unary.iter().enumerate() {
            s.add_relation(Self::unary_name(i + 1), r.clone()).unwrap();
        }
        for (i, r) in self.binary.iter().enumerate() {
            s.add_relation(Self::binary_name(i + 1), r.clone()).unwrap();
        }
        s
    }

    /// As a general instance: variable `xᵢ` has id `i−1`; constraints are
    /// `B1(x1), B1_2(x1,x2), B2(x2), …`.
    pub fn to_csp(&self) -> CspInstance {
        let mut out = CspInstance::new(Arc::new(self.structure()));
        for i in 1..=self.len() {
            out.add_variable(Self::var_name(i));
        }
        for i in 1..=self.len() {
            out.add_constraint(vec![i - 1], Self::unary_name(i));
            if i < self.len() {
                out.add_constraint(vec![i - 1, i], Self::binary_name(i));
            }
        }
        out
    }

    /// Solutions by forward/backward propagation; the first one in
    /// lexicographic order, if any.
    pub fn first_solution(&self) -> Option<Vec<Elem>> {
        let l = self.len();
        // alive[i] = values at i that extend to a solution of [i, ℓ]
        let mut alive = vec![Vec::new(); l];
        alive[l - 1] = self.unary[l - 1].elements();
        for i in (0..l - 1).rev() {
            alive[i] = self.unary[i]
                .elements()
                .into_iter()
                .filter(|&a| alive[i + 1].iter().any(|&b| self.binary[i].contains(&[a, b])))
                .collect();
        }
        let mut out = Vec::with_capacity(l);
        let mut prev: Option<Elem> = None;
        for (i, vals) in alive.iter().enumerate() {
            let pick = vals
                .iter()
                .copied()
                .find(|&b| prev.is_none_or(|a| self.binary[i - 1].contains(&[a, b])))?;
            out.push(pick);
            prev = Some(pick);
        }
        Some(out)
    }

    pub fn is_satisfiable(&self) -> bool {
        self.first_solution().is_some()
    }
}
