//! Randomized invariant checks over a corpus of known watermelons and their
//! subsystems. Seeds are fixed so failures reproduce.

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use melon::enumerate::{enumerate_maximal, SearchLimits};
use melon::homology::{
    apply_row_op, apply_transform, delta2, homology_table, relative_short_set, tables_orbit_equivalent, RowOp,
};
use melon::watermelon::{
    alt_watermelon, p_reduce, par, remove_arc, short_arcs, standard_watermelon, validate_watermelon, Watermelon,
};

fn corpus() -> &'static [Watermelon] {
    static CORPUS: OnceLock<Vec<Watermelon>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut all: Vec<Watermelon> = (2..=8).map(|n| standard_watermelon(n).unwrap()).collect();
        all.extend((4..=8).map(|n| alt_watermelon(n).unwrap()));
        for n in 2..=4 {
            all.extend(
                enumerate_maximal(n, &SearchLimits::default()).unwrap().classes.into_iter().map(|c| c.representative),
            );
        }
        let reduced: Vec<Watermelon> =
            all.iter().filter(|w| w.n() >= 3).map(|w| p_reduce(w, w.n() as u32).unwrap()).collect();
        all.extend(reduced);
        all
    })
}

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0), failure_persistence: None, ..Config::default() }
}

/// A corpus member with the arcs flagged in `drop` removed.
fn subsystem(index: usize, drop: u64) -> Watermelon {
    let w = &corpus()[index % corpus().len()];
    let doomed: Vec<_> =
        w.arcs().iter().enumerate().filter(|(k, _)| drop >> (k % 64) & 1 == 1).map(|(_, a)| a.id).collect();
    doomed.into_iter().fold(w.clone(), |w, id| remove_arc(&w, id).unwrap())
}

fn row_op(n: usize) -> impl Strategy<Value = RowOp> {
    prop_oneof![
        (1..=n, 1..=n).prop_filter("distinct rows", |(i, j)| i != j).prop_map(|(i, j)| RowOp::Swap(i.min(j), i.max(j))),
        (1..=n).prop_map(RowOp::Slide),
    ]
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn subsystems_stay_valid_with_injective_par(index in any::<usize>(), drop in any::<u64>()) {
        let w = subsystem(index, drop);
        prop_assert!(validate_watermelon(&w).is_valid());
        let mut parts: Vec<_> = w.arcs().iter().map(|a| par(&w, a.id).unwrap()).collect();
        parts.sort();
        let before = parts.len();
        parts.dedup();
        prop_assert_eq!(parts.len(), before);
    }

    #[test]
    fn short_arcs_are_disjoint(index in any::<usize>(), drop in any::<u64>()) {
        let w = subsystem(index, drop);
        let short: Vec<_> = short_arcs(&w).into_iter().map(|(id, _)| id).collect();
        let counts = w.crossing_counts();
        for (i, a) in short.iter().enumerate() {
            for b in &short[i + 1..] {
                let key = if a < b { (*a, *b) } else { (*b, *a) };
                prop_assert_eq!(counts.get(&key).copied().unwrap_or(0), 0);
            }
        }
    }

    #[test]
    fn relative_short_sets_are_symmetric(index in any::<usize>()) {
        let t = homology_table(&corpus()[index % corpus().len()]);
        let sets: Vec<Vec<usize>> = (0..t.len()).map(|k| relative_short_set(&t, k).unwrap()).collect();
        for (j, set) in sets.iter().enumerate() {
            for &k in set {
                prop_assert!(sets[k].contains(&j));
            }
        }
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn delta2_survives_row_ops_and_mode_flips(
        index in any::<usize>(),
        ops in (2usize..=8).prop_flat_map(|n| (Just(n), prop::collection::vec(row_op(n), 0..12))),
    ) {
        let (n, ops) = ops;
        let candidates: Vec<&Watermelon> = corpus().iter().filter(|w| w.n() == n).collect();
        let t = homology_table(candidates[index % candidates.len()]);
        let moved = ops.iter().fold(t.clone(), |t, &op| apply_row_op(&t, op).unwrap());
        let vs: Vec<_> = t.vectors().collect();
        let ms: Vec<_> = moved.vectors().collect();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let d = delta2(&vs[i], &vs[j]).unwrap();
                prop_assert_eq!(delta2(&ms[i], &ms[j]).unwrap(), d);
                prop_assert_eq!(delta2(&vs[i].flipped(), &vs[j]).unwrap(), d);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn orbit_search_recovers_scrambles(
        index in any::<usize>(),
        scramble in (2usize..=6).prop_flat_map(|n| (
            Just(n),
            Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::btree_set(1..=n, 0..=n),
        )),
    ) {
        let (n, permutation, slides) = scramble;
        let candidates: Vec<&Watermelon> = corpus().iter().filter(|w| w.n() == n).collect();
        let t = homology_table(candidates[index % candidates.len()]);
        let slides: Vec<usize> = slides.into_iter().collect();
        let moved = apply_transform(&t, &permutation, &slides);
        let found = tables_orbit_equivalent(&t, &moved, false).unwrap();
        let witness = found.witness.expect("scramble is recoverable");
        prop_assert!(witness.verify(&t, &moved));
    }
}
