mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symdl::algebra::az2;
use symdl::engine::{derivation_graph, evaluate, extract_derivation, replay, DatalogProgram, EvalOptions, Fact};
use symdl::instances::CspInstance;

fn programs() -> Vec<DatalogProgram> {
    common::SYMMETRIC_PROGRAMS
        .iter()
        .chain(common::LINEAR_PROGRAMS.iter())
        .map(|b| DatalogProgram::parse(&common::program_text(b)).unwrap())
        .collect()
}

fn full() -> EvalOptions {
    EvalOptions {
        short_circuit: false,
        ..EvalOptions::default()
    }
}

fn instance(seed: u64, n: usize, m: usize) -> CspInstance {
    common::random_csp(&mut ChaCha8Rng::seed_from_u64(seed), &az2(), n, m)
}

#[test]
fn programs_round_trip_through_text() {
    for p in programs() {
        assert_eq!(DatalogProgram::parse(&p.to_string()).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_fact_replays(pi in 0usize..20, seed in any::<u64>(), n in 1usize..6, m in 0usize..8) {
        let p = &programs()[pi];
        let i = instance(seed, n, m);
        let e = evaluate(p, &i, &full()).unwrap();
        for f in e.store.iter() {
            let d = extract_derivation(p, &i, &f).unwrap();
            prop_assert!(d.is_some());
            prop_assert!(replay(p, &i, &d.unwrap()).is_ok());
        }
    }

    #[test]
    fn more_constraints_more_facts(pi in 0usize..20, seed in any::<u64>(), n in 1usize..6, m in 0usize..6, extra in 1usize..4) {
        let p = &programs()[pi];
        let big = instance(seed, n, m + extra);
        let mut small = big.without_constraints();
        for c in &big.constraints()[..m] {
            small.add_constraint(c.scope.clone(), c.relation.clone());
        }
        let a = evaluate(p, &small, &full()).unwrap();
        let b = evaluate(p, &big, &full()).unwrap();
        prop_assert!(a.store.is_subset(&b.store));
    }

    #[test]
    fn fixpoint_is_graph_reachability(pi in 0usize..20, seed in any::<u64>(), n in 1usize..6, m in 0usize..8) {
        let p = &programs()[pi];
        let i = instance(seed, n, m);
        let e = evaluate(p, &i, &full()).unwrap();
        let g = derivation_graph(p, &i).unwrap();
        let reach: BTreeSet<Fact> = g.reachable().into_keys().collect();
        let idb: BTreeSet<Fact> = e.store.iter().filter(|f| p.is_idb(f.0)).collect();
        prop_assert_eq!(reach, idb);
        prop_assert_eq!(e.goal_reached, common::bfs_goal(&g));
        if pi < 10 {
            prop_assert!(g.is_symmetric());
        }
    }
}
