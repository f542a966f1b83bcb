//! Built tries against a straightforward pointer trie built by insertion.

use std::collections::{BTreeMap, BTreeSet};

use lcpk_core::bench::{generate_dataset, DatasetSpec};
use lcpk_core::verify::check_structure;
use lcpk_core::{Alphabet, Dataset, Symbol, TrieIndex};
use proptest::prelude::*;

#[derive(Default)]
struct Node {
    children: BTreeMap<Symbol, usize>,
    posting: Vec<u32>,
}

/// Insert items one at a time, creating at most L nodes per item.
struct InsertionTrie {
    nodes: Vec<Node>,
}

impl InsertionTrie {
    fn build(ds: &Dataset) -> Self {
        let mut t = InsertionTrie {
            nodes: vec![Node::default()],
        };
        for (i, row) in ds.items().enumerate() {
            let before = t.nodes.len();
            let mut v = 0;
            for &s in row {
                v = match t.nodes[v].children.get(&s) {
                    Some(&c) => c,
                    None => {
                        t.nodes.push(Node::default());
                        let c = t.nodes.len() - 1;
                        t.nodes[v].children.insert(s, c);
                        c
                    }
                };
            }
            assert!(t.nodes.len() - before <= row.len());
            t.nodes[v].posting.push(i as u32);
        }
        t
    }

    fn size(&self, v: usize) -> usize {
        self.nodes[v].posting.len() + self.nodes[v].children.values().map(|&c| self.size(c)).sum::<usize>()
    }

    /// Breadth-first (prefix, subtree size, posting) listing.
    fn listing(&self) -> Vec<(Vec<Symbol>, usize, Vec<u32>)> {
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::from([(0usize, Vec::new())]);
        while let Some((v, prefix)) = queue.pop_front() {
            out.push((prefix.clone(), self.size(v), self.nodes[v].posting.clone()));
            for (&s, &c) in &self.nodes[v].children {
                let mut p = prefix.clone();
                p.push(s);
                queue.push_back((c, p));
            }
        }
        out
    }
}

fn listing(index: &TrieIndex) -> Vec<(Vec<Symbol>, usize, Vec<u32>)> {
    let mut prefixes: Vec<Vec<Symbol>> = vec![Vec::new(); index.node_count()];
    let mut out = Vec::new();
    for v in index.nodes() {
        for (s, c) in index.children(v) {
            let mut p = prefixes[v.index()].clone();
            p.push(s);
            prefixes[c.index()] = p;
        }
        out.push((prefixes[v.index()].clone(), index.subtree_size(v), index.posting(v).to_vec()));
    }
    out
}

/// Root plus one node per distinct non-empty prefix.
fn distinct_prefixes(ds: &Dataset) -> usize {
    1 + (1..=ds.seq_len())
        .map(|d| ds.items().map(|r| &r[..d]).collect::<BTreeSet<_>>().len())
        .sum::<usize>()
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (2u32..5, 1usize..8, 0usize..50).prop_flat_map(|(sigma, len, n)| {
        proptest::collection::vec(0..sigma as Symbol, n * len).prop_map(move |flat| {
            Dataset::from_flat(Alphabet::new(sigma).unwrap(), len, flat).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn same_shape_as_insertion_trie(ds in dataset_strategy()) {
        let index = TrieIndex::build(&ds);
        let reference = InsertionTrie::build(&ds);
        prop_assert_eq!(index.node_count(), reference.nodes.len());
        prop_assert_eq!(index.node_count(), distinct_prefixes(&ds));
        prop_assert_eq!(listing(&index), reference.listing());
        prop_assert!(check_structure(&index).is_ok());
        prop_assert_eq!(index.to_dataset(), ds);
    }

    #[test]
    fn descent_reaches_longest_shared_prefix(
        ds in dataset_strategy(),
        raw in proptest::collection::vec(any::<u16>(), 8),
    ) {
        let sigma = ds.alphabet().size() as u16;
        let q: Vec<Symbol> = raw[..ds.seq_len()].iter().map(|s| s % sigma).collect();
        let index = TrieIndex::build(&ds);
        let d = index.descend(&q).unwrap();
        let best = ds
            .items()
            .map(|r| r.iter().zip(&q).take_while(|(a, b)| a == b).count())
            .max()
            .unwrap_or(0);
        prop_assert_eq!(d.depth, best);
        prop_assert_eq!(d.path.len(), best + 1);
        prop_assert!(d.symbols_compared <= ds.seq_len());
        prop_assert_eq!(index.depth(d.node), best);
        prop_assert_eq!(
            index.subtree_size(d.node),
            ds.items().filter(|r| r[..best] == q[..best]).count()
        );
    }
}

#[test]
fn two_items_sharing_first_symbol() {
    let ds = Dataset::from_rows(Alphabet::new(3).unwrap(), 2, [[0, 1], [0, 2]]).unwrap();
    let index = TrieIndex::build(&ds);
    assert_eq!(index.node_count() - 1, 3);
    assert_eq!(index.subtree_size(index.root()), 2);
}

#[test]
fn identical_items_form_one_path() {
    let ds = Dataset::from_rows(Alphabet::new(4).unwrap(), 5, vec![[3, 1, 0, 2, 2]; 9]).unwrap();
    let index = TrieIndex::build(&ds);
    assert_eq!(index.node_count() - 1, 5);
    let leaf = index.nodes().last().unwrap();
    assert_eq!(index.posting(leaf), (0..9).collect::<Vec<u32>>());
}

#[test]
fn random_dataset_node_bound() {
    let ds = generate_dataset(&DatasetSpec::uniform(1000, 16, 4, 99)).unwrap();
    let index = TrieIndex::build(&ds);
    assert!(index.node_count() <= 16_001);
    assert_eq!(index.subtree_size(index.root()), 1000);
    assert_eq!(index.node_count(), distinct_prefixes(&ds));
    check_structure(&index).unwrap();
}

#[test]
fn wide_alphabet_round_trips() {
    let ds = generate_dataset(&DatasetSpec::uniform(300, 4, 65_536, 3)).unwrap();
    let index = TrieIndex::build(&ds);
    assert_eq!(index.to_dataset(), ds);
    check_structure(&index).unwrap();
}
