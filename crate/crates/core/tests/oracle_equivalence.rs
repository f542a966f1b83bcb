//! Trie answers against brute force.

use lcpk_core::bench::{generate_dataset, generate_queries, uniform_queries, DatasetSpec};
use lcpk_core::{oracle_distinguish, oracle_top_k, Alphabet, Dataset, Mode, Symbol, TrieIndex};
use proptest::prelude::*;

/// Sort every item by (LCP desc, index asc) with a plain symbol loop.
fn naive_top_k(ds: &Dataset, q: &[Symbol], k: usize) -> Vec<(u32, u32)> {
    let mut all: Vec<(u32, u32)> = ds
        .items()
        .enumerate()
        .map(|(i, row)| {
            let mut l = 0;
            while l < row.len() && row[l] == q[l] {
                l += 1;
            }
            (i as u32, l as u32)
        })
        .collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

fn pairs(r: &lcpk_core::QueryResult) -> Vec<(u32, u32)> {
    r.hits.iter().map(|h| (h.index, h.lcp)).collect()
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (2u32..6, 1usize..7, 0usize..60).prop_flat_map(|(sigma, len, n)| {
        proptest::collection::vec(0..sigma as Symbol, n * len).prop_map(move |flat| {
            Dataset::from_flat(Alphabet::new(sigma).unwrap(), len, flat).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn complete_mode_equals_brute_force(
        ds in dataset_strategy(),
        raw_q in proptest::collection::vec(any::<u16>(), 6),
        k in 1usize..70,
    ) {
        let sigma = ds.alphabet().size() as u16;
        let q: Vec<Symbol> = raw_q[..ds.seq_len()].iter().map(|s| s % sigma).collect();
        let index = TrieIndex::build(&ds);
        let expected = naive_top_k(&ds, &q, k);
        prop_assert_eq!(&oracle_top_k(&ds, &q, k).unwrap().hits, &expected);
        let got = index.query(&q, k, Mode::Complete).unwrap();
        prop_assert_eq!(pairs(&got), expected);
        prop_assert_eq!(got.hits.len(), k.min(ds.len()));
    }

    #[test]
    fn strict_mode_is_a_subset_of_the_best_ties(
        ds in dataset_strategy(),
        raw_q in proptest::collection::vec(any::<u16>(), 6),
        k in 1usize..70,
    ) {
        let sigma = ds.alphabet().size() as u16;
        let q: Vec<Symbol> = raw_q[..ds.seq_len()].iter().map(|s| s % sigma).collect();
        let index = TrieIndex::build(&ds);
        let all = naive_top_k(&ds, &q, ds.len());
        let best = all.first().map(|h| h.1);
        let r = index.query(&q, k, Mode::Strict).unwrap();
        prop_assert!(r.hits.len() <= k);
        prop_assert!(r.is_canonically_ordered());
        for h in &r.hits {
            prop_assert_eq!(Some(h.lcp), best);
            prop_assert!(all.contains(&(h.index, h.lcp)));
        }
        let ties = all.iter().filter(|h| Some(h.1) == best).count();
        prop_assert_eq!(r.hits.len(), k.min(ties));
    }
}

#[test]
fn exact_item_comes_first() {
    let ds = generate_dataset(&DatasetSpec::uniform(400, 10, 5, 8)).unwrap();
    let index = TrieIndex::build(&ds);
    for i in (0..400).step_by(37) {
        let r = index.query(ds.item(i), 1, Mode::Strict).unwrap();
        assert_eq!(r.hits[0].lcp, 10);
        assert_eq!(ds.item(r.hits[0].index as usize), ds.item(i));
    }
}

#[test]
fn medium_random_dataset_matches_oracle() {
    let ds = generate_dataset(&DatasetSpec::uniform(500, 12, 3, 21)).unwrap();
    let index = TrieIndex::build(&ds);
    let mut queries = generate_queries(&ds, 100, 6, 22);
    queries.extend(uniform_queries(ds.alphabet(), 12, 100, 23));
    for q in &queries {
        for k in [1, 5, 50] {
            let got = index.query(q, k, Mode::Complete).unwrap();
            assert_eq!(pairs(&got), naive_top_k(&ds, q, k), "q = {q:?}, k = {k}");
        }
    }
}

#[test]
fn k_at_least_n_returns_everything_in_order() {
    let ds = generate_dataset(&DatasetSpec::uniform(60, 5, 2, 4)).unwrap();
    let index = TrieIndex::build(&ds);
    let q = vec![1, 0, 1, 1, 0];
    let r = index.query(&q, 1000, Mode::Complete).unwrap();
    assert_eq!(r.hits.len(), 60);
    assert!(r.is_canonically_ordered());
    assert_eq!(pairs(&r), naive_top_k(&ds, &q, 60));
}

#[test]
fn distinguishing_witness_changes_top_1() {
    let mut found = 0;
    for seed in 0..100u64 {
        let spec = DatasetSpec {
            distinct: true,
            ..DatasetSpec::uniform(40, 6, 3, seed)
        };
        let a = generate_dataset(&spec).unwrap();
        let b = generate_dataset(&DatasetSpec { seed: seed + 1000, ..spec }).unwrap();
        let q = oracle_distinguish(&a, &b).unwrap().expect("random sets differ");
        let ta = naive_top_k(&a, &q, 1)[0].1;
        let tb = naive_top_k(&b, &q, 1)[0].1;
        assert_ne!(ta, tb, "seed {seed}");
        assert_eq!(ta.max(tb), 6);
        found += 1;
    }
    assert_eq!(found, 100);
}

#[test]
fn permuted_sets_are_indistinguishable() {
    let a = generate_dataset(&DatasetSpec {
        distinct: true,
        ..DatasetSpec::uniform(30, 5, 4, 1)
    })
    .unwrap();
    let rows: Vec<Vec<Symbol>> = a.items().rev().map(<[Symbol]>::to_vec).collect();
    let b = Dataset::from_rows(a.alphabet(), 5, &rows).unwrap();
    assert_eq!(oracle_distinguish(&a, &b).unwrap(), None);
}
