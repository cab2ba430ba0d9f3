//! Randomized invariants over small degrees.

mod common;

use proptest::prelude::*;

use mclosure::closure::brute_closure;
use mclosure::{Caps, GeneratedGroup, Permutation, TupleColoring};

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(images).expect("shuffle is a bijection"))
}

fn group_strategy(n: usize, max_gens: usize) -> impl Strategy<Value = GeneratedGroup> {
    prop::collection::vec(perm_strategy(n), 1..=max_gens)
        .prop_map(move |gens| GeneratedGroup::new(n, gens).expect("equal degrees"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(
        p in perm_strategy(7),
        q in perm_strategy(7),
        r in perm_strategy(7),
    ) {
        let left = p.compose(&q).unwrap().compose(&r).unwrap();
        let right = p.compose(&q.compose(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_roundtrip(p in perm_strategy(9)) {
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert_eq!(p.inverse().inverse(), p);
    }

    #[test]
    fn chain_order_counts_distinct_elements(g in group_strategy(6, 3)) {
        let elements = common::generated_set(6, g.generators());
        prop_assert_eq!(num_bigint::BigUint::from(elements.len()), g.order());
        for e in &elements {
            prop_assert!(g.contains(e).unwrap());
        }
    }

    #[test]
    fn membership_matches_enumeration(g in group_strategy(5, 2), p in perm_strategy(5)) {
        let elements = common::generated_set(5, g.generators());
        prop_assert_eq!(g.contains(&p).unwrap(), elements.contains(&p));
    }

    #[test]
    fn orbits_partition_the_points(g in group_strategy(7, 3)) {
        let orbits = g.orbits();
        let mut seen = vec![false; 7];
        for orbit in &orbits {
            for &p in orbit {
                prop_assert!(!seen[p]);
                seen[p] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn coloring_classes_are_invariant(g in group_strategy(5, 2)) {
        let coloring = TupleColoring::build(&g, 2, &Caps::default()).unwrap();
        for gen in g.generators() {
            prop_assert!(coloring.preserved_by(gen));
        }
        // and any product of generators preserves them too
        if g.generators().len() >= 2 {
            let word = g.generators()[0].compose(&g.generators()[1]).unwrap();
            prop_assert!(coloring.preserved_by(&word));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closure_laws_hold(g in group_strategy(5, 2), m in 1usize..=2) {
        let caps = Caps::default();
        let closure = brute_closure(&g, m, &caps).unwrap();
        prop_assert!(closure.contains_group(&g).unwrap());
        let twice = brute_closure(&closure, m, &caps).unwrap();
        prop_assert!(closure.group_eq(&twice).unwrap());
        if m == 2 {
            let coarser = brute_closure(&g, 1, &caps).unwrap();
            prop_assert!(coarser.contains_group(&closure).unwrap());
        }
        // orbit equality at the same arity
        let before = TupleColoring::build(&g, m, &caps).unwrap();
        let after = TupleColoring::build(&closure, m, &caps).unwrap();
        prop_assert_eq!(before.colors(), after.colors());
    }
}
