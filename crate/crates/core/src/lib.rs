//! Deterministic top-k retrieval under longest-common-prefix similarity.
//!
//! * [`trie`]: prefix-tree index answering top-`k` queries in `O(L + k)`.
//! * [`tal`]: prefix-bucketed sorted array scanning one bucket per query.
//! * [`oracle`]: brute-force reference answers.
//! * [`work`] and [`landauer`]: deterministic work-unit accounting.
//! * [`bench`]: synthetic data, benchmark scenarios and the materialization
//!   memory calculator.

pub mod bench;
pub mod dataset;
pub mod error;
pub mod landauer;
pub mod memo;
pub mod metric;
pub mod oracle;
pub mod tal;
pub mod trie;
pub mod verify;
pub mod work;

pub use dataset::{Alphabet, Dataset, Sequence, Symbol};
pub use error::{Error, Result};
pub use landauer::{landauer_gap, landauer_limit_per_bit, LandauerGap};
pub use memo::QueryCache;
pub use metric::{lcp, ultrametric_distance, LcpValue};
pub use oracle::{oracle_distinguish, oracle_top_k, OracleResult};
pub use tal::TalEngine;
pub use trie::{Hit, Mode, NodeId, QueryResult, TrieIndex};
pub use work::{work_reduction, CostModel, Reduction, WorkReport};
