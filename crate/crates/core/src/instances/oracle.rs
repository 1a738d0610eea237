use std::ops::ControlFlow;

use crate::algebra::checked_pow;
use crate::error::{budget_error, Result};
use crate::exec::Exec;

use super::csp::{CspInstance, Solution};

pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub budget: u64,
    pub exec: Exec,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            budget: DEFAULT_ORACLE_BUDGET,
            exec: Exec::default(),
        }
    }
}

fn check_budget(i: &CspInstance, cfg: &OracleConfig) -> Result<()> {
    let d = i.domain_size();
    let n = i.num_vars();
    match checked_pow(d, n) {
        Some(c) if c as u64 <= cfg.budget => Ok(()),
        _ => Err(budget_error(
            "brute-force enumeration",
            format!("{d}^{n}"),
            cfg.budget,
        )),
    }
}

/// Every solution, in lexicographic order of assignment vectors.
pub fn brute_force_solutions(i: &CspInstance, cfg: &OracleConfig) -> Result<Vec<Solution>> {
    check_budget(i, cfg)?;
    let search = i.search()?;
    if i.num_vars() == 0 || !cfg.exec.is_parallel() {
        return Ok(search.all().into_iter().map(Solution).collect());
    }
    let parts = cfg.exec.map_range(0..i.domain_size(), |a| {
        let mut out = Vec::new();
        let _ = search.run(&[a], &mut |s| {
            out.push(Solution(s.to_vec()));
            ControlFlow::Continue(())
        });
        out
    });
    Ok(parts.into_iter().flatten().collect())
}

/// The lexicographically first solution, if any.
pub fn first_solution(i: &CspInstance, cfg: &OracleConfig) -> Result<Option<Solution>> {
    check_budget(i, cfg)?;
    Ok(i.search()?.first().map(Solution))
}

pub fn is_satisfiable(i: &CspInstance, cfg: &OracleConfig) -> Result<bool> {
    Ok(first_solution(i, cfg)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ak2, checked_pow, AllTuples};
    use crate::instances::csp::induced_subinstance;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn examples() {
        let cfg = OracleConfig::default();
        let mut i = CspInstance::with_variables(ak2(), 2);
        i.add_constraint(vec![0, 1], "NEQ");
        i.add_constraint(vec![0], "C0");
        assert_eq!(brute_force_solutions(&i, &cfg).unwrap(), vec![Solution(vec![0, 1])]);

        let mut tri = CspInstance::with_variables(ak2(), 3);
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            tri.add_constraint(vec![a, b], "NEQ");
        }
        assert!(brute_force_solutions(&tri, &cfg).unwrap().is_empty());

        let one = CspInstance::with_variables(ak2(), 1);
        assert_eq!(brute_force_solutions(&one, &cfg).unwrap().len(), 2);
    }

    #[test]
    fn budget() {
        let big = CspInstance::with_variables(ak2(), 30);
        assert!(brute_force_solutions(&big, &OracleConfig::default()).is_err());
    }

    fn arb_instance() -> impl Strategy<Value = CspInstance> {
        let names = ["NEQ", "C0", "C1"];
        (1usize..6, proptest::collection::vec((0usize..3, 0usize..6, 0usize..6), 0..8)).prop_map(
            move |(n, cs)| {
                let mut i = CspInstance::with_variables(ak2(), n);
                for (r, a, b) in cs {
                    let scope = if r == 0 { vec![a % n, b % n] } else { vec![a % n] };
                    i.add_constraint(scope, names[r]);
                }
                i
            },
        )
    }

    proptest! {
        #[test]
        fn matches_naive_enumeration(i in arb_instance()) {
            let seq = OracleConfig { exec: Exec::Sequential, ..Default::default() };
            let got = brute_force_solutions(&i, &seq).unwrap();
            let par = brute_force_solutions(&i, &OracleConfig::default()).unwrap();
            let want: Vec<Solution> = AllTuples::new(2, i.num_vars())
                .filter(|t| i.is_solution(t))
                .map(Solution)
                .collect();
            prop_assert_eq!(&got, &want);
            prop_assert_eq!(&par, &want);
            prop_assert_eq!(checked_pow(2, i.num_vars()).unwrap() >= want.len(), true);
        }

        #[test]
        fn unsat_subinstance_implies_unsat(i in arb_instance(), mask in 0u32..64) {
            let u: BTreeSet<usize> = (0..i.num_vars()).filter(|v| mask >> v & 1 == 1).collect();
            let (sub, _) = induced_subinstance(&i, &u).unwrap();
            let cfg = OracleConfig::default();
            if !is_satisfiable(&sub, &cfg).unwrap() {
                prop_assert!(!is_satisfiable(&i, &cfg).unwrap());
            }
        }

        #[test]
        fn induced_is_monotone(i in arb_instance(), m1 in 0u32..64, m2 in 0u32..64) {
            let n = i.num_vars();
            let u1: BTreeSet<usize> = (0..n).filter(|v| m1 >> v & 1 == 1).collect();
            let u2: BTreeSet<usize> = (0..n).filter(|v| m2 >> v & 1 == 1).collect();
            let (s1, map1) = induced_subinstance(&i, &u1).unwrap();
            let inner: BTreeSet<usize> = (0..s1.num_vars()).filter(|&v| u2.contains(&map1[v])).collect();
            let (s12, _) = induced_subinstance(&s1, &inner).unwrap();
            let both: BTreeSet<usize> = u1.intersection(&u2).copied().collect();
            let (direct, _) = induced_subinstance(&i, &both).unwrap();
            prop_assert_eq!(s12, direct);
        }
    }
}
