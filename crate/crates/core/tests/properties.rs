//! Property suites over the table fixtures and random inputs.

mod common;

use common::props;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use singleclass::aut::short_vectors;
use singleclass::genus::{parse_symbol, symbol_raw};
use singleclass::GramLattice;

#[test]
fn symbol_is_invariant_under_rebasing() {
    props::rebasing_invariance(200, 7);
}

#[test]
fn watson_length_law() {
    props::watson_length_law();
}

#[test]
fn construct_round_trip_dims_5_to_10() {
    props::construct_round_trip(5, &[0, 1]);
}

#[test]
fn construct_round_trip_dim_4() {
    props::construct_round_trip(4, &[2]);
}

#[test]
fn mass_lower_bounds_are_sound_in_dim_5() {
    assert!(props::mass_bounds_sound(5) > 0);
}

#[test]
fn mass_lower_bounds_are_sound_in_dim_6() {
    assert!(props::mass_bounds_sound(6) > 0);
}

fn gram_strategy() -> impl Strategy<Value = GramLattice> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(-3i64..=3, n * n), proptest::collection::vec(1i64..=6, n)))
        .prop_filter_map("positive definite, det ≤ 100", |(n, off, diag)| {
            let mut g = vec![0i64; n * n];
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = if i == j { diag[i] } else { off[i.min(j) * n + i.max(j)] };
                }
            }
            let l = GramLattice::new(n, g).ok()?;
            (l.det_u128() <= 100).then_some(l)
        })
}

fn nonzero() -> impl Strategy<Value = i128> {
    (-2000i128..=2000).prop_filter("nonzero", |x| *x != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn short_vectors_match_box_search(l in gram_strategy(), bound in 1i64..=12) {
        let mut fast = short_vectors(&l, bound).unwrap();
        fast.sort();
        prop_assert_eq!(fast, props::box_oracle(&l, bound));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hilbert_symbol_bilinear_and_reciprocal(a in nonzero(), b in nonzero(), c in nonzero()) {
        props::hilbert_triple(a, b, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Rebasing a random diagonal lattice keeps its symbol, and the symbol
    /// prints and parses back to itself.
    #[test]
    fn random_symbols_print_and_parse(d in proptest::collection::vec(1i64..=30, 3..=6), seed in any::<u64>()) {
        let l = GramLattice::diagonal(&d);
        prop_assume!(l.is_primitive());
        let sym = symbol_raw(&l);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(symbol_raw(&common::rebase(&l, &mut rng)), sym.clone());
        prop_assert_eq!(parse_symbol(&sym.to_string()).unwrap(), sym.clone());
        prop_assert_eq!(parse_symbol(&sym.display_form().to_string()).unwrap(), sym);
    }
}
