use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{HmChain, Relation, RelationalStructure};
use crate::error::{Error, Result};
use crate::instances::{CspInstance, PathDecomposition, PathInstance};

/// Where generated relations come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    /// Relations of the structure, chosen by name.
    Named,
    /// Random relations closed under every term of the chain.
    Closed(HmChain),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathGenConfig {
    pub length: usize,
    /// Named mode: chance of a full binary constraint. Closed mode: chance
    /// of each pair being drawn before closure.
    pub density: f64,
    /// Closed mode: chance of each element being drawn for a unary constraint.
    pub unary_density: f64,
    pub seed: u64,
    pub mode: GenMode,
}

impl PathGenConfig {
    pub fn named(length: usize, density: f64, seed: u64) -> Self {
        PathGenConfig {
            length,
            density,
            unary_density: 0.75,
            seed,
            mode: GenMode::Named,
        }
    }

    pub fn closed(length: usize, density: f64, seed: u64, chain: HmChain) -> Self {
        PathGenConfig {
            mode: GenMode::Closed(chain),
            ..PathGenConfig::named(length, density, seed)
        }
    }
}

/// Smallest superset of `r` closed under every ternary term of `chain`.
pub fn close_under_chain(r: &Relation, chain: &HmChain) -> Result<Relation> {
    if chain.domain() != r.domain() {
        return Err(Error::DomainMismatch {
            expected: r.domain(),
            found: chain.domain(),
        });
    }
    let mut out = r.clone();
    loop {
        let tuples: Vec<Vec<usize>> = out.tuples().collect();
        let mut grown = false;
        for a in &tuples {
            for b in &tuples {
                for c in &tuples {
                    for t in chain.terms() {
                        let row = t.apply_rows(&[a, b, c]);
                        if !out.contains(&row) {
                            out.insert(&row)?;
                            grown = true;
                        }
                    }
                }
            }
        }
        if !grown {
            return Ok(out);
        }
    }
}

pub fn gen_random_path_instance(s: &RelationalStructure, cfg: &PathGenConfig) -> Result<PathInstance> {
    if cfg.length == 0 {
        return Err(Error::Precondition("path length must be positive".into()));
    }
    let d = s.domain_size();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (unary, binary) = match &cfg.mode {
        GenMode::Named => {
            let of_arity = |k: usize| -> Vec<&Relation> { s.relations().filter(|(_, r)| r.arity() == k).map(|(_, r)| r).collect() };
            let (us, bs) = (of_arity(1), of_arity(2));
            if us.is_empty() || bs.is_empty() {
                return Err(Error::Precondition("no suitable relations: need a unary and a binary relation".into()));
            }
            let full = Relation::full(d, 2)?;
            let unary = (0..cfg.length).map(|_| (*us.choose(&mut rng).unwrap()).clone()).collect();
            let binary = (1..cfg.length)
                .map(|_| {
                    if rng.random_bool(cfg.density.clamp(0.0, 1.0)) {
                        full.clone()
                    } else {
                        (*bs.choose(&mut rng).unwrap()).clone()
                    }
                })
                .collect();
            (unary, binary)
        }
        GenMode::Closed(chain) => {
            let mut draw = |arity: usize, p: f64| -> Result<Relation> {
                let r = Relation::from_predicate(d, arity, |_| rng.random_bool(p.clamp(0.0, 1.0)))?;
                close_under_chain(&r, chain)
            };
            let unary = (0..cfg.length).map(|_| draw(1, cfg.unary_density)).collect::<Result<_>>()?;
            let binary = (1..cfg.length).map(|_| draw(2, cfg.density)).collect::<Result<_>>()?;
            (unary, binary)
        }
    };
    PathInstance::new(d, unary, binary)
}

/// A chain of `bag_count` sliding bags `{i, …, i+k}` with one to two random
/// constraints placed inside each bag.
pub fn gen_random_pw_instance(
    s: &RelationalStructure,
    k: usize,
    bag_count: usize,
    seed: u64,
) -> Result<(CspInstance, PathDecomposition)> {
    if k == 0 {
        return Err(Error::Precondition("width must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = if bag_count == 0 { 0 } else { bag_count + k };
    let mut i = CspInstance::with_variables(Arc::new(s.clone()), n);
    let rels: Vec<(&str, usize)> = s
        .relations()
        .filter(|(_, r)| r.arity() <= k + 1)
        .map(|(name, r)| (name, r.arity()))
        .collect();
    let mut bags = Vec::with_capacity(bag_count);
    for b in 0..bag_count {
        let bag: Vec<usize> = (b..=b + k).collect();
        if !rels.is_empty() {
            for _ in 0..rng.random_range(1..=2) {
                let &(name, arity) = rels.choose(&mut rng).unwrap();
                let scope: Vec<usize> = bag.choose_multiple(&mut rng, arity).copied().collect();
                i.add_constraint(scope, name);
            }
        }
        bags.push(bag.into_iter().collect::<BTreeSet<_>>());
    }
    Ok((i, PathDecomposition::new(bags, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ak2, az2, check_preserves, find_hm_chain, EnumerationConfig, OperationTable};
    use crate::instances::check_path_decomposition;

    #[test]
    fn path_generation_is_deterministic() {
        let cfg = PathGenConfig::named(5, 0.5, 42);
        assert_eq!(
            gen_random_path_instance(&az2(), &cfg).unwrap(),
            gen_random_path_instance(&az2(), &cfg).unwrap()
        );
        let other = PathGenConfig::named(5, 0.5, 43);
        let runs: BTreeSet<_> = (0..8)
            .map(|s| format!("{:?}", gen_random_path_instance(&az2(), &PathGenConfig { seed: s, ..other.clone() }).unwrap()))
            .collect();
        assert!(runs.len() > 1);
    }

    #[test]
    fn full_density_gives_full_binaries() {
        let p = gen_random_path_instance(&az2(), &PathGenConfig::named(6, 1.0, 1)).unwrap();
        assert!(p.binaries().iter().all(Relation::is_full));
    }

    #[test]
    fn closed_mode_is_preserved() {
        let chain = find_hm_chain(&az2(), 4, &EnumerationConfig::default()).unwrap().unwrap();
        let xor = OperationTable::xor3();
        for seed in 0..20 {
            let p = gen_random_path_instance(&az2(), &PathGenConfig::closed(6, 0.4, seed, chain.clone())).unwrap();
            for r in p.unaries().iter().chain(p.binaries()) {
                assert!(check_preserves(&xor, r).unwrap());
            }
        }
    }

    #[test]
    fn closure_adds_the_missing_tuple() {
        let chain = HmChain::with_middle(OperationTable::xor3());
        let r = Relation::from_tuples(2, 2, [[0, 0], [0, 1], [1, 0]]).unwrap();
        assert!(close_under_chain(&r, &chain).unwrap().is_full());
    }

    #[test]
    fn named_mode_needs_relations() {
        let s = RelationalStructure::new(2).unwrap().with_relation("C0", Relation::unary(2, [0]).unwrap()).unwrap();
        assert!(matches!(
            gen_random_path_instance(&s, &PathGenConfig::named(3, 0.5, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pathwidth_instances_validate() {
        let (i, d) = gen_random_pw_instance(&ak2(), 1, 4, 7).unwrap();
        assert_eq!(d.bags.len(), 4);
        assert!(check_path_decomposition(&i, &d));
        let (i1, d1) = gen_random_pw_instance(&ak2(), 2, 1, 7).unwrap();
        assert_eq!(d1.bags.len(), 1);
        assert!(check_path_decomposition(&i1, &d1));
        assert_eq!(gen_random_pw_instance(&ak2(), 2, 5, 9).unwrap(), gen_random_pw_instance(&ak2(), 2, 5, 9).unwrap());
        for seed in 0..30 {
            let (i, d) = gen_random_pw_instance(&az2(), 2, 6, seed).unwrap();
            assert!(check_path_decomposition(&i, &d));
        }
    }
}
