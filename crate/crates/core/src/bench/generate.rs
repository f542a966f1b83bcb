//! Seeded synthetic datasets and query streams.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`, 256-bit key
//! plus 64-bit stream and counter), seeded with `seed_from_u64`. The stream is
//! portable across platforms, so a seed pins the exact bytes produced.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Zipf};
use serde::{Deserialize, Serialize};

use crate::dataset::{Alphabet, Dataset, Symbol};
use crate::error::{Error, Result};

pub type BenchRng = ChaCha8Rng;

pub fn rng(seed: u64) -> BenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    /// Every symbol independent and uniform.
    Uniform,
    /// The first `depth` symbols follow a Zipf law with the given exponent
    /// (symbol 0 most likely); the rest are uniform.
    Clustered { depth: usize, exponent: f64 },
}

impl Distribution {
    pub const DEFAULT_CLUSTER_DEPTH: usize = 8;
    pub const DEFAULT_ZIPF_EXPONENT: f64 = 1.1;
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform => f.write_str("uniform"),
            Distribution::Clustered { .. } => f.write_str("clustered"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "clustered" => Ok(Distribution::Clustered {
                depth: Self::DEFAULT_CLUSTER_DEPTH,
                exponent: Self::DEFAULT_ZIPF_EXPONENT,
            }),
            other => Err(Error::invalid(format!(
                "unknown distribution {other:?} (expected uniform or clustered)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub items: usize,
    pub seq_len: usize,
    pub alphabet: u32,
    pub seed: u64,
    pub distribution: Distribution,
    /// Require pairwise distinct items.
    pub distinct: bool,
}

impl DatasetSpec {
    pub fn uniform(items: usize, seq_len: usize, alphabet: u32, seed: u64) -> Self {
        DatasetSpec {
            items,
            seq_len,
            alphabet,
            seed,
            distribution: Distribution::Uniform,
            distinct: false,
        }
    }
}

/// Universes up to this size are enumerated when sampling distinct items.
const ENUMERATE_LIMIT: u64 = 1 << 22;

pub fn generate_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    let alphabet = Alphabet::new(spec.alphabet)?;
    if spec.seq_len == 0 {
        return Err(Error::invalid("sequence length must be positive"));
    }
    let mut rng = rng(spec.seed);
    let universe = alphabet.checked_pow(spec.seq_len);
    if spec.distinct {
        if let Some(u) = universe {
            if spec.items as u64 > u {
                return Err(Error::invalid(format!(
                    "{} distinct items requested but only {u} sequences exist",
                    spec.items
                )));
            }
        }
    }

    let mut sampler = SymbolSampler::new(alphabet, spec.distribution)?;
    let flat = match universe {
        // Dense request for distinct items: sample codes without replacement.
        Some(u) if spec.distinct && u <= ENUMERATE_LIMIT && spec.items as u64 * 2 >= u => {
            let mut codes: Vec<u64> = (0..u).collect();
            for i in 0..spec.items {
                let j = rng.random_range(i..codes.len());
                codes.swap(i, j);
            }
            let mut flat = Vec::with_capacity(spec.items * spec.seq_len);
            for &code in &codes[..spec.items] {
                flat.extend(decode(code, alphabet, spec.seq_len));
            }
            flat
        }
        _ if spec.distinct => {
            let mut seen: HashSet<Vec<Symbol>> = HashSet::with_capacity(spec.items);
            let mut flat = Vec::with_capacity(spec.items * spec.seq_len);
            let mut attempts = 0u64;
            let max_attempts = (spec.items as u64).saturating_mul(64).max(1024);
            while seen.len() < spec.items {
                attempts += 1;
                if attempts > max_attempts {
                    return Err(Error::invalid(
                        "could not draw enough distinct items; distribution too skewed",
                    ));
                }
                let row = sampler.row(&mut rng, spec.seq_len);
                if seen.insert(row.clone()) {
                    flat.extend_from_slice(&row);
                }
            }
            flat
        }
        _ => {
            let mut flat = Vec::with_capacity(spec.items * spec.seq_len);
            for _ in 0..spec.items {
                sampler.fill(&mut rng, spec.seq_len, &mut flat);
            }
            flat
        }
    };
    Dataset::from_flat(alphabet, spec.seq_len, flat)
}

fn decode(mut code: u64, alphabet: Alphabet, len: usize) -> Vec<Symbol> {
    let sigma = u64::from(alphabet.size());
    let mut row = vec![0; len];
    for slot in row.iter_mut().rev() {
        *slot = (code % sigma) as Symbol;
        code /= sigma;
    }
    row
}

struct SymbolSampler {
    sigma: u32,
    head: Option<(usize, Zipf<f64>)>,
}

impl SymbolSampler {
    fn new(alphabet: Alphabet, distribution: Distribution) -> Result<Self> {
        let head = match distribution {
            Distribution::Uniform => None,
            Distribution::Clustered { depth, exponent } => {
                let zipf = Zipf::new(f64::from(alphabet.size()), exponent)
                    .map_err(|e| Error::invalid(format!("zipf exponent {exponent}: {e}")))?;
                Some((depth, zipf))
            }
        };
        Ok(SymbolSampler {
            sigma: alphabet.size(),
            head,
        })
    }

    fn fill(&mut self, rng: &mut BenchRng, len: usize, out: &mut Vec<Symbol>) {
        for pos in 0..len {
            let symbol = match &self.head {
                Some((depth, zipf)) if pos < *depth => {
                    // Zipf samples are 1..=σ as floats
                    (zipf.sample(rng) as u32 - 1).min(self.sigma - 1)
                }
                _ => rng.random_range(0..self.sigma),
            };
            out.push(symbol as Symbol);
        }
    }

    fn row(&mut self, rng: &mut BenchRng, len: usize) -> Vec<Symbol> {
        let mut row = Vec::with_capacity(len);
        self.fill(rng, len, &mut row);
        row
    }
}

/// `count` queries: each copies the first `prefix_len` symbols of a random
/// dataset item and draws the rest uniformly. `prefix_len >= L` yields exact
/// items; an empty dataset yields fully random queries.
pub fn generate_queries(
    dataset: &Dataset,
    count: usize,
    prefix_len: usize,
    seed: u64,
) -> Vec<Vec<Symbol>> {
    let mut rng = rng(seed);
    let len = dataset.seq_len();
    let sigma = dataset.alphabet().size();
    let keep = prefix_len.min(len);
    (0..count)
        .map(|_| {
            let mut q: Vec<Symbol> = Vec::with_capacity(len);
            if !dataset.is_empty() {
                let j = rng.random_range(0..dataset.len());
                q.extend_from_slice(&dataset.item(j)[..keep]);
            }
            while q.len() < len {
                q.push(rng.random_range(0..sigma) as Symbol);
            }
            q
        })
        .collect()
}

/// `count` queries with every symbol uniform, independent of the data.
pub fn uniform_queries(alphabet: Alphabet, seq_len: usize, count: usize, seed: u64) -> Vec<Vec<Symbol>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            (0..seq_len)
                .map(|_| rng.random_range(0..alphabet.size()) as Symbol)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        let spec = DatasetSpec::uniform(200, 12, 5, 42);
        assert_eq!(generate_dataset(&spec).unwrap(), generate_dataset(&spec).unwrap());
        let other = DatasetSpec { seed: 43, ..spec.clone() };
        assert_ne!(generate_dataset(&spec).unwrap(), generate_dataset(&other).unwrap());
    }

    #[test]
    fn full_universe_when_distinct() {
        let spec = DatasetSpec {
            distinct: true,
            ..DatasetSpec::uniform(81, 4, 3, 1)
        };
        let ds = generate_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 81);
        assert!(!ds.has_duplicates());
    }

    #[test]
    fn too_many_distinct_rejected() {
        let spec = DatasetSpec {
            distinct: true,
            ..DatasetSpec::uniform(82, 4, 3, 1)
        };
        assert!(generate_dataset(&spec).is_err());
    }

    #[test]
    fn sparse_distinct_uses_rejection() {
        let spec = DatasetSpec {
            distinct: true,
            ..DatasetSpec::uniform(500, 16, 4, 9)
        };
        let ds = generate_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 500);
        assert!(!ds.has_duplicates());
    }

    #[test]
    fn clustered_skews_the_head() {
        let spec = DatasetSpec {
            distribution: Distribution::Clustered {
                depth: 2,
                exponent: 1.5,
            },
            ..DatasetSpec::uniform(4000, 6, 8, 3)
        };
        let ds = generate_dataset(&spec).unwrap();
        let zeros_head = ds.items().filter(|r| r[0] == 0).count();
        let zeros_tail = ds.items().filter(|r| r[5] == 0).count();
        assert!(zeros_head > 2 * zeros_tail, "{zeros_head} vs {zeros_tail}");
    }

    #[test]
    fn uniform_bucket_occupancy_is_flat() {
        // chi-square over the 256 depth-8 prefixes of binary data
        let n = 1 << 16;
        let ds = generate_dataset(&DatasetSpec::uniform(n, 12, 2, 7)).unwrap();
        let mut counts = [0u32; 256];
        for row in ds.items() {
            let code = row[..8].iter().fold(0usize, |a, &s| a * 2 + s as usize);
            counts[code] += 1;
        }
        let expected = n as f64 / 256.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 255 degrees of freedom; 99.9th percentile is about 330
        assert!(chi2 < 330.0, "chi2 = {chi2}");
    }

    #[test]
    fn query_prefixes_come_from_items() {
        let ds = generate_dataset(&DatasetSpec::uniform(50, 10, 4, 5)).unwrap();
        let qs = generate_queries(&ds, 40, 6, 11);
        assert_eq!(qs.len(), 40);
        for q in &qs {
            assert!(ds.items().any(|r| r[..6] == q[..6]));
        }
        let exact = generate_queries(&ds, 10, 99, 11);
        for q in &exact {
            assert!(ds.items().any(|r| r == &q[..]));
        }
    }
}
