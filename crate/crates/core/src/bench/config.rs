//! Scenario configuration in flat `key: value` text.
//!
//! One setting per line, `key: value` or `key = value`; `#` starts a comment.
//! Numbers may contain `,` or `_` separators (`n_candidates: 2,000,000`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::generate::Distribution;
use crate::error::{Error, Result};
use crate::trie::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Sustained,
    Gnc,
    TalSweep,
    Memo,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Sustained => "sustained",
            ScenarioKind::Gnc => "gnc",
            ScenarioKind::TalSweep => "tal_sweep",
            ScenarioKind::Memo => "memo",
        })
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sustained" => Ok(ScenarioKind::Sustained),
            "gnc" => Ok(ScenarioKind::Gnc),
            "tal_sweep" => Ok(ScenarioKind::TalSweep),
            "memo" => Ok(ScenarioKind::Memo),
            other => Err(Error::invalid(format!(
                "unknown scenario {other:?} (expected sustained, gnc, tal_sweep or memo)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub n_items: usize,
    pub seq_len: usize,
    pub alphabet: u32,
    pub k: usize,
    pub query_mode: Mode,
    /// TAL bucket count for single-engine runs.
    pub bucket_count: u64,
    /// Bucket counts compared against the full scan in `tal_sweep`.
    pub bucket_sweep: Vec<u64>,
    /// Size of the deterministic query pool (or GNC step count).
    pub queries: usize,
    /// Wall-clock target for `sustained`; 0 means one pass over the pool.
    pub run_seconds: f64,
    pub warmup_seconds: f64,
    /// Symbols copied from a dataset item into each synthetic query.
    pub prefix_len: usize,
    pub distribution: Distribution,
    pub seed: u64,
    pub workers: usize,
    /// Load this snapshot instead of generating data.
    pub index_path: Option<PathBuf>,
    /// Keys accepted for compatibility but without effect.
    pub ignored_keys: Vec<String>,
}

impl ScenarioConfig {
    /// Desk-scale defaults for `scenario`; `seed` is always explicit.
    pub fn defaults(scenario: ScenarioKind, seed: u64) -> Self {
        let base = ScenarioConfig {
            scenario,
            n_items: 100_000,
            seq_len: 64,
            alphabet: 4,
            k: 10,
            query_mode: Mode::Complete,
            bucket_count: 256,
            bucket_sweep: vec![1, 4, 16, 64, 256],
            queries: 1_000,
            run_seconds: 0.0,
            warmup_seconds: 0.0,
            prefix_len: 32,
            distribution: Distribution::Uniform,
            seed,
            workers: 1,
            index_path: None,
            ignored_keys: Vec::new(),
        };
        match scenario {
            ScenarioKind::Sustained => ScenarioConfig {
                seq_len: 256,
                prefix_len: 128,
                run_seconds: 2.0,
                ..base
            },
            ScenarioKind::Gnc => ScenarioConfig {
                n_items: 10_000,
                queries: 1_000,
                ..base
            },
            ScenarioKind::TalSweep => ScenarioConfig {
                n_items: 1 << 20,
                seq_len: 32,
                alphabet: 2,
                prefix_len: 0,
                ..base
            },
            ScenarioKind::Memo => ScenarioConfig {
                n_items: 1_000_000,
                seq_len: 32,
                prefix_len: 16,
                k: 100,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_items", self.n_items as u64),
            ("seq_len", self.seq_len as u64),
            ("k", self.k as u64),
            ("bucket_count", self.bucket_count),
            ("queries", self.queries as u64),
            ("workers", self.workers as u64),
        ];
        for (name, value) in positive {
            if value == 0 && !(name == "n_items" && self.index_path.is_some()) {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if !(2..=crate::dataset::MAX_ALPHABET).contains(&self.alphabet) {
            return Err(Error::invalid(format!("alphabet {} out of range", self.alphabet)));
        }
        if self.bucket_sweep.is_empty() || self.bucket_sweep.contains(&0) {
            return Err(Error::invalid("bucket_sweep must list positive bucket counts"));
        }
        if !(self.run_seconds >= 0.0 && self.warmup_seconds >= 0.0) {
            return Err(Error::invalid("durations must be non-negative"));
        }
        Ok(())
    }

    /// Parses the flat key-value format. `seed` and `scenario` are required;
    /// everything else falls back to [`ScenarioConfig::defaults`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once([':', '=']) else {
                return Err(Error::invalid(format!(
                    "line {}: expected `key: value`, got {line:?}",
                    lineno + 1
                )));
            };
            let key = canonical_key(key.trim());
            if entries
                .insert(key.clone(), (lineno + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::invalid(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }

        let take = |entries: &mut BTreeMap<String, (usize, String)>, key: &str| entries.remove(key);
        let (line, scenario) = take(&mut entries, "scenario")
            .ok_or_else(|| Error::invalid("missing required key `scenario`"))?;
        let scenario: ScenarioKind = scenario.parse().map_err(|e| at_line(line, e))?;
        let (line, seed) = take(&mut entries, "seed")
            .ok_or_else(|| Error::invalid("missing required key `seed`"))?;
        let mut cfg = ScenarioConfig::defaults(scenario, number(line, "seed", &seed)?);

        let mut distribution_name: Option<(usize, String)> = None;
        let mut cluster_depth = Distribution::DEFAULT_CLUSTER_DEPTH;
        let mut zipf_exponent = Distribution::DEFAULT_ZIPF_EXPONENT;
        for (key, (line, value)) in entries {
            match key.as_str() {
                "n_items" => cfg.n_items = number(line, &key, &value)?,
                "seq_len" => cfg.seq_len = number(line, &key, &value)?,
                "alphabet" => cfg.alphabet = number(line, &key, &value)?,
                "k" => cfg.k = number(line, &key, &value)?,
                "bucket_count" => cfg.bucket_count = number(line, &key, &value)?,
                "bucket_sweep" => {
                    cfg.bucket_sweep = value
                        .split_whitespace()
                        .map(|v| number(line, &key, v))
                        .collect::<Result<_>>()?
                }
                "queries" => cfg.queries = number(line, &key, &value)?,
                "run_seconds_target" => cfg.run_seconds = real(line, &key, &value)?,
                "warmup_s" => cfg.warmup_seconds = real(line, &key, &value)?,
                "prefix_len" => cfg.prefix_len = number(line, &key, &value)?,
                "distribution" => distribution_name = Some((line, value)),
                "cluster_depth" => cluster_depth = number(line, &key, &value)?,
                "zipf_exponent" => zipf_exponent = real(line, &key, &value)?,
                "query_mode" => {
                    cfg.query_mode = value.parse().map_err(|e| at_line(line, e))?
                }
                "workers" => cfg.workers = number(line, &key, &value)?,
                "index_path" => cfg.index_path = Some(PathBuf::from(value)),
                k if IGNORED_KEYS.contains(&k) => cfg.ignored_keys.push(key),
                _ => {
                    return Err(Error::invalid(format!("line {line}: unknown key `{key}`")));
                }
            }
        }
        if let Some((line, name)) = distribution_name {
            cfg.distribution = match name.parse().map_err(|e| at_line(line, e))? {
                Distribution::Uniform => Distribution::Uniform,
                Distribution::Clustered { .. } => Distribution::Clustered {
                    depth: cluster_depth,
                    exponent: zipf_exponent,
                },
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Accepted and recorded, but unused.
const IGNORED_KEYS: &[&str] = &["mode", "update_rate", "sensors", "range_fraction"];

fn canonical_key(key: &str) -> String {
    match key {
        "n_candidates" => "n_items",
        "max_len" => "seq_len",
        "sigma" => "alphabet",
        "simulation_steps" | "steps" => "queries",
        "run_seconds" => "run_seconds_target",
        "warmup_seconds" => "warmup_s",
        other => other,
    }
    .to_string()
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::InvalidInput(msg) => Error::invalid(format!("line {line}: {msg}")),
        other => Error::invalid(format!("line {line}: {other}")),
    }
}

fn number<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    let cleaned: String = value.chars().filter(|c| !matches!(c, ',' | '_')).collect();
    cleaned.parse().map_err(|_| {
        Error::invalid(format!("line {line}: `{key}` expects an integer, got {value:?}"))
    })
}

fn real(line: usize, key: &str, value: &str) -> Result<f64> {
    let cleaned: String = value.chars().filter(|c| !matches!(c, ',' | '_')).collect();
    cleaned.parse().map_err(|_| {
        Error::invalid(format!("line {line}: `{key}` expects a number, got {value:?}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_listing_parses() {
        let text = "\
mode: direct_gpu_dpx_lcp_index_top1
scenario: sustained
seed: 7
n_candidates: 2,000,000
max_len: 256
prefix_len: 128
run_seconds_target: 1200
warmup_s: 5
";
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.n_items, 2_000_000);
        assert_eq!(cfg.seq_len, 256);
        assert_eq!(cfg.prefix_len, 128);
        assert_eq!(cfg.run_seconds, 1200.0);
        assert_eq!(cfg.warmup_seconds, 5.0);
        assert_eq!(cfg.ignored_keys, vec!["mode".to_string()]);
    }

    #[test]
    fn sweep_and_aliases() {
        let cfg = ScenarioConfig::parse(
            "scenario = tal_sweep\nseed = 1\nbucket_sweep = 1 4 16\nsteps = 50 # comment\n",
        )
        .unwrap();
        assert_eq!(cfg.bucket_sweep, vec![1, 4, 16]);
        assert_eq!(cfg.queries, 50);
    }

    #[test]
    fn seed_is_required() {
        let err = ScenarioConfig::parse("scenario: gnc\n").unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn unknown_scenario_and_key() {
        assert!(ScenarioConfig::parse("scenario: warp\nseed: 1\n").is_err());
        let err = ScenarioConfig::parse("scenario: gnc\nseed: 1\nflux: 3\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn bad_values_name_the_line() {
        let err = ScenarioConfig::parse("scenario: gnc\nseed: 1\nk: many\n").unwrap_err();
        assert!(err.to_string().contains("line 3") && err.to_string().contains("`k`"), "{err}");
        assert!(ScenarioConfig::parse("scenario: gnc\nseed: 1\nk: 0\n").is_err());
        assert!(ScenarioConfig::parse("scenario: gnc\nseed: 1\nseed: 2\n").is_err());
    }

    #[test]
    fn clustered_distribution() {
        let cfg = ScenarioConfig::parse(
            "scenario: tal_sweep\nseed: 1\ndistribution: clustered\ncluster_depth: 4\nzipf_exponent: 2.0\n",
        )
        .unwrap();
        assert_eq!(
            cfg.distribution,
            Distribution::Clustered {
                depth: 4,
                exponent: 2.0
            }
        );
    }
}
