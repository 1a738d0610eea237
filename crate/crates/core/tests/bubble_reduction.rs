use std::collections::BTreeSet;

use proptest::prelude::*;

use symdl::algebra::{ak2, az2, chain_preserves, find_hm_chain, EnumerationConfig};
use symdl::bubble::{decide_csp, lift_solution, normalize_bags, pathwidth_to_path, BubbleConfig};
use symdl::instances::{first_solution, is_satisfiable, OracleConfig};
use symdl::workbench::gen_random_pw_instance;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_is_equisatisfiable(seed in any::<u64>(), ak in any::<bool>(), k in 1usize..3, bags in 1usize..5) {
        let s = if ak { ak2() } else { az2() };
        let (j, d) = gen_random_pw_instance(&s, k, bags, seed).unwrap();
        let cfg = BubbleConfig::default();
        let red = pathwidth_to_path(&j, &d, &cfg).unwrap();
        let oracle = OracleConfig::default();
        let j_sat = is_satisfiable(&j, &oracle).unwrap();
        let k_sol = first_solution(&red.instance.to_csp(), &oracle).unwrap();
        prop_assert_eq!(j_sat, k_sol.is_some());
        if let Some(w) = k_sol {
            prop_assert!(j.is_solution(lift_solution(w.values(), &red.bag_tuples, &j).unwrap().values()));
        }
        let hm = find_hm_chain(&s, 4, &EnumerationConfig::default()).unwrap().unwrap();
        let power = hm.power(red.bubble.k).unwrap();
        for u in red.instance.unaries() {
            prop_assert!(chain_preserves(&power, u).unwrap());
        }
        let chis: BTreeSet<_> = red.bag_tuples.iter().map(|b| b.chi.clone()).collect();
        let distinct: BTreeSet<_> = normalize_bags(&d).unwrap().bags.into_iter().collect();
        prop_assert_eq!(chis.len(), distinct.len());
        prop_assert_eq!(decide_csp(&s, &hm, &j, &d, &cfg).unwrap().verdict.satisfiable, j_sat);
    }
}
