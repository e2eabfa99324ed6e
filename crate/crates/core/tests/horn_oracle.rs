mod common;

use common::{brute_force_sat, game_sample, horn_sample, tree};
use gamesynth_core::learner::{
    conflict_sample, consistent_with_game, consistent_with_horn, game_to_horn, generate_predicates,
    horn_propagate, label_leaves, learn_horn_tree, LearnOutcome, PartialLabeling,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn propagation_decides_satisfiability(hs in horn_sample(10, 14)) {
        let sat = brute_force_sat(&hs);
        match horn_propagate(&hs, &PartialLabeling::new()) {
            Ok(_) => prop_assert!(sat),
            Err(c) => {
                prop_assert!(!sat);
                prop_assert!(!brute_force_sat(&conflict_sample(&hs, &c)));
            }
        }
    }

    #[test]
    fn learner_is_consistent(hs in horn_sample(10, 14), octagonal in any::<bool>()) {
        let pool = generate_predicates(&hs.points(), octagonal);
        match learn_horn_tree(&hs, &pool) {
            LearnOutcome::Tree(t) => prop_assert!(consistent_with_horn(&t, &hs)),
            LearnOutcome::NoTree => prop_assert!(false, "pool separates all points"),
            LearnOutcome::Unsatisfiable(_) => prop_assert!(!brute_force_sat(&hs)),
        }
    }

    #[test]
    fn game_level_learner_is_consistent(sg in game_sample(3)) {
        let hs = game_to_horn(&sg);
        let pool = generate_predicates(&sg.points(), true);
        if let LearnOutcome::Tree(t) = learn_horn_tree(&hs, &pool) {
            prop_assert!(consistent_with_game(&t.flip_leaves(), &sg));
        } else {
            prop_assert!(horn_propagate(&hs, &PartialLabeling::new()).is_err());
        }
    }

    #[test]
    fn leaf_labels_found_whenever_they_exist(t in tree(3), sg in game_sample(3)) {
        let hs = game_to_horn(&sg);
        let n = t.leaves();
        prop_assume!(n <= 12);
        let exists = (0u32..1 << n).any(|mask| {
            let labels: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            consistent_with_horn(&t.relabel(&labels), &hs)
        });
        match label_leaves(&t, &hs) {
            Some(l) => {
                prop_assert!(exists);
                prop_assert!(consistent_with_horn(&l, &hs));
                prop_assert_eq!(l.inner_nodes(), t.inner_nodes());
            }
            None => prop_assert!(!exists),
        }
    }
}
