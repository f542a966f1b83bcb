//! Desk-scale benchmark scenarios.
//!
//! Every scenario works from a deterministic query pool derived from the
//! config seed. Anything that depends only on (config, seed) goes into the
//! `results` and `determinism` parts of the report; wall-clock measurements go
//! into `timing` and are the only fields allowed to differ between re-runs.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ScenarioConfig, ScenarioKind};
use super::generate::{generate_dataset, generate_queries, DatasetSpec};
use super::memwall::{format_gib, memory_wall, DEFAULT_BUDGET_BYTES};
use super::stats::LatencyStats;
use crate::dataset::{Dataset, Symbol};
use crate::error::{Error, Result};
use crate::memo::QueryCache;
use crate::tal::TalEngine;
use crate::trie::{QueryResult, TrieIndex};
use crate::work::{work_reduction, CostModel, WorkReport};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Every `SAMPLE_STRIDE`-th query is replayed for the determinism check (1%).
pub const SAMPLE_STRIDE: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub config: ScenarioConfig,
    pub cost_model: CostModel,
    pub index: IndexSummary,
    pub results: ScenarioResults,
    pub determinism: DeterminismCheck,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub items: usize,
    pub seq_len: usize,
    pub alphabet: u32,
    pub node_count: usize,
    pub index_bytes: usize,
    pub materialization_bytes: u128,
    pub materialization: String,
    pub materialization_feasible_80gib: bool,
    pub materialization_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkSummary {
    pub queries: u64,
    pub symbols_compared: u64,
    pub items_scanned: u64,
    pub nodes_visited: u64,
    pub cache_hits: u64,
    pub work_units: f64,
    pub work_units_per_query: f64,
}

impl From<&WorkReport> for WorkSummary {
    fn from(w: &WorkReport) -> Self {
        WorkSummary {
            queries: w.queries,
            symbols_compared: w.symbols_compared,
            items_scanned: w.items_scanned,
            nodes_visited: w.nodes_visited,
            cache_hits: w.cache_hits,
            work_units: w.energy_proxy_joules(),
            work_units_per_query: w.energy_per_query(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub buckets_requested: u64,
    pub bucket_depth: usize,
    pub buckets_effective: u64,
    pub max_bucket_size: Option<usize>,
    pub mean_items_scanned: f64,
    pub scan_fraction: f64,
    pub work: WorkSummary,
    /// Full-scan work divided by this configuration's work.
    pub reduction: f64,
    pub zero_work: bool,
    pub result_digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioResults {
    Sustained {
        pool_queries: usize,
        work: WorkSummary,
        result_digest: String,
    },
    Gnc {
        steps: usize,
        work: WorkSummary,
        result_digest: String,
    },
    TalSweep {
        queries: usize,
        full_scan: WorkSummary,
        rows: Vec<SweepRow>,
        monotone: bool,
    },
    Memo {
        queries: usize,
        cold: WorkSummary,
        hot: WorkSummary,
        hot_identical: bool,
        result_digest: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminismCheck {
    pub sampled: usize,
    pub identical: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub build_seconds: f64,
    pub run_seconds: f64,
    pub latency: Option<LatencyStats>,
    /// Scenario-specific wall-clock figures (rates, speedups, per-config latency).
    pub extra: BTreeMap<String, f64>,
}

/// Runs one scenario end to end.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let build_start = Instant::now();
    let (dataset, index) = prepare(config)?;
    let cost = CostModel::for_seq_len(dataset.seq_len());

    // TAL sweeps never query the trie, but the footprint comparison still wants it.
    let index = match index {
        Some(index) => index,
        None => TrieIndex::build(&dataset),
    };
    let mut timing = Timing {
        build_seconds: build_start.elapsed().as_secs_f64(),
        ..Timing::default()
    };
    let index_summary = summarize(&index);

    let queries = generate_queries(
        &dataset,
        config.queries,
        config.prefix_len,
        config.seed.wrapping_add(1),
    );

    let run_start = Instant::now();
    let (results, determinism) = match config.scenario {
        ScenarioKind::Sustained => sustained(config, &index, &queries, cost, &mut timing)?,
        ScenarioKind::Gnc => gnc(config, &index, &queries, cost, &mut timing)?,
        ScenarioKind::TalSweep => tal_sweep(config, &dataset, &queries, cost, &mut timing)?,
        ScenarioKind::Memo => memo(config, &index, &queries, cost, &mut timing)?,
    };
    timing.run_seconds = run_start.elapsed().as_secs_f64();

    Ok(ScenarioReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        cost_model: cost,
        index: index_summary,
        results,
        determinism,
        timing,
    })
}

fn prepare(config: &ScenarioConfig) -> Result<(Dataset, Option<TrieIndex>)> {
    match &config.index_path {
        Some(path) => {
            let index = load_index(path)?;
            Ok((index.to_dataset(), Some(index)))
        }
        None => {
            let spec = DatasetSpec {
                items: config.n_items,
                seq_len: config.seq_len,
                alphabet: config.alphabet,
                seed: config.seed,
                distribution: config.distribution,
                distinct: false,
            };
            Ok((generate_dataset(&spec)?, None))
        }
    }
}

fn load_index(path: &Path) -> Result<TrieIndex> {
    if !path.exists() {
        return Err(Error::InvalidState(format!(
            "index snapshot {} has not been built",
            path.display()
        )));
    }
    let file = std::fs::File::open(path)?;
    TrieIndex::read_snapshot(&mut std::io::BufReader::new(file))
}

fn summarize(index: &TrieIndex) -> IndexSummary {
    let bytes = index.heap_bytes();
    let (materialization_bytes, feasible, ratio) = match memory_wall(index.len() as u64, DEFAULT_BUDGET_BYTES) {
        Ok(est) => {
            let est = est.with_index_bytes(bytes as u64);
            (est.materialization_bytes, est.feasible, est.ratio.unwrap_or(0.0))
        }
        Err(_) => (0, true, 0.0),
    };
    IndexSummary {
        items: index.len(),
        seq_len: index.seq_len(),
        alphabet: index.alphabet().size(),
        node_count: index.node_count(),
        index_bytes: bytes,
        materialization_bytes,
        materialization: format_gib(materialization_bytes),
        materialization_feasible_80gib: feasible,
        materialization_ratio: ratio,
    }
}

pub fn digest(results: &[Vec<u8>]) -> String {
    let mut hasher = Sha256::new();
    for r in results {
        hasher.update(r);
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Per-worker output of one pass over a slice of the pool.
struct PassOutput {
    results: Vec<Vec<u8>>,
    latencies: Vec<Duration>,
    work: WorkReport,
}

/// One pass over `queries`, split into contiguous chunks across `workers`.
/// Outputs are concatenated in worker order, i.e. in query order.
fn run_pass<F>(queries: &[Vec<Symbol>], workers: usize, cost: CostModel, run: F) -> Result<PassOutput>
where
    F: Fn(&[Symbol], &mut WorkReport) -> Result<QueryResult> + Sync,
{
    let one = |chunk: &[Vec<Symbol>]| -> Result<PassOutput> {
        let mut out = PassOutput {
            results: Vec::with_capacity(chunk.len()),
            latencies: Vec::with_capacity(chunk.len()),
            work: WorkReport::new(cost),
        };
        for q in chunk {
            let t = Instant::now();
            let r = run(q, &mut out.work)?;
            out.latencies.push(t.elapsed());
            out.results.push(r.to_bytes());
        }
        Ok(out)
    };
    let workers = workers.clamp(1, queries.len().max(1));
    if workers == 1 {
        return one(queries);
    }
    let chunk = queries.len().div_ceil(workers);
    let parts: Vec<Result<PassOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = queries
            .chunks(chunk)
            .map(|c| s.spawn(move || one(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut merged = PassOutput {
        results: Vec::with_capacity(queries.len()),
        latencies: Vec::with_capacity(queries.len()),
        work: WorkReport::new(cost),
    };
    for part in parts {
        let part = part?;
        merged.results.extend(part.results);
        merged.latencies.extend(part.latencies);
        merged.work.merge(&part.work)?;
    }
    Ok(merged)
}

/// Replays every `SAMPLE_STRIDE`-th query and compares bytes with `first`.
fn replay_sample<F>(queries: &[Vec<Symbol>], first: &[Vec<u8>], cost: CostModel, run: F) -> Result<DeterminismCheck>
where
    F: Fn(&[Symbol], &mut WorkReport) -> Result<QueryResult>,
{
    let mut scratch = WorkReport::new(cost);
    let mut sampled = 0;
    let mut identical = true;
    for i in (0..queries.len()).step_by(SAMPLE_STRIDE) {
        sampled += 1;
        identical &= run(&queries[i], &mut scratch)?.to_bytes() == first[i];
    }
    Ok(DeterminismCheck { sampled, identical })
}

fn sustained(
    config: &ScenarioConfig,
    index: &TrieIndex,
    queries: &[Vec<Symbol>],
    cost: CostModel,
    timing: &mut Timing,
) -> Result<(ScenarioResults, DeterminismCheck)> {
    let run = |q: &[Symbol], w: &mut WorkReport| index.query_with_work(q, config.k, config.query_mode, w);

    if config.warmup_seconds > 0.0 {
        let until = Instant::now() + Duration::from_secs_f64(config.warmup_seconds);
        let mut scratch = WorkReport::new(cost);
        'warm: loop {
            for q in queries {
                run(q, &mut scratch)?;
                if Instant::now() >= until {
                    break 'warm;
                }
            }
        }
    }

    let start = Instant::now();
    let pass = run_pass(queries, config.workers, cost, run)?;
    let mut latencies = pass.latencies;

    // Keep cycling the pool until the wall-clock target; these extra queries
    // only feed the latency statistics.
    if config.run_seconds > 0.0 {
        let deadline = start + Duration::from_secs_f64(config.run_seconds);
        let workers = config.workers.clamp(1, queries.len());
        let chunk = queries.len().div_ceil(workers);
        let extra: Vec<Result<Vec<Duration>>> = std::thread::scope(|s| {
            let handles: Vec<_> = queries
                .chunks(chunk)
                .map(|c| {
                    s.spawn(move || -> Result<Vec<Duration>> {
                        let mut scratch = WorkReport::new(cost);
                        let mut lat = Vec::new();
                        while Instant::now() < deadline {
                            for q in c {
                                let t = Instant::now();
                                run(q, &mut scratch)?;
                                lat.push(t.elapsed());
                            }
                        }
                        Ok(lat)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for part in extra {
            latencies.extend(part?);
        }
    }
    timing.latency = LatencyStats::from_samples(latencies, start.elapsed());

    let determinism = replay_sample(queries, &pass.results, cost, run)?;
    Ok((
        ScenarioResults::Sustained {
            pool_queries: queries.len(),
            work: (&pass.work).into(),
            result_digest: digest(&pass.results),
        },
        determinism,
    ))
}

fn gnc(
    config: &ScenarioConfig,
    index: &TrieIndex,
    observations: &[Vec<Symbol>],
    cost: CostModel,
    timing: &mut Timing,
) -> Result<(ScenarioResults, DeterminismCheck)> {
    // Steps are sequential by nature: one worker regardless of config.
    let run = |q: &[Symbol], w: &mut WorkReport| index.query_with_work(q, config.k, config.query_mode, w);
    let start = Instant::now();
    let pass = run_pass(observations, 1, cost, run)?;
    let elapsed = start.elapsed();
    timing.latency = LatencyStats::from_samples(pass.latencies, elapsed);
    timing.extra.insert(
        "steps_per_second".into(),
        observations.len() as f64 / elapsed.as_secs_f64().max(f64::MIN_POSITIVE),
    );
    let determinism = replay_sample(observations, &pass.results, cost, run)?;
    Ok((
        ScenarioResults::Gnc {
            steps: observations.len(),
            work: (&pass.work).into(),
            result_digest: digest(&pass.results),
        },
        determinism,
    ))
}

fn tal_sweep(
    config: &ScenarioConfig,
    dataset: &Dataset,
    queries: &[Vec<Symbol>],
    cost: CostModel,
    timing: &mut Timing,
) -> Result<(ScenarioResults, DeterminismCheck)> {
    let mut sampled = 0;
    let mut identical = true;

    let mut measure = |engine: &TalEngine, label: String, timing: &mut Timing| -> Result<(WorkReport, String)> {
        let run = |q: &[Symbol], w: &mut WorkReport| engine.query_with_work(q, config.k, w);
        let start = Instant::now();
        let pass = run_pass(queries, config.workers, cost, run)?;
        let elapsed = start.elapsed();
        if let Some(lat) = LatencyStats::from_samples(pass.latencies, elapsed) {
            timing.extra.insert(format!("{label}.p50_us"), lat.p50_us);
            timing.extra.insert(format!("{label}.p95_us"), lat.p95_us);
        }
        let check = replay_sample(queries, &pass.results, cost, run)?;
        sampled += check.sampled;
        identical &= check.identical;
        Ok((pass.work, digest(&pass.results)))
    };

    let full_engine = TalEngine::build(dataset, 1)?;
    let (full, _) = measure(&full_engine, "full_scan".into(), timing)?;
    drop(full_engine);

    let mut rows = Vec::with_capacity(config.bucket_sweep.len());
    for &buckets in &config.bucket_sweep {
        let engine = TalEngine::build(dataset, buckets)?;
        let max_bucket_size = engine
            .bucket_ranges()
            .map(|ranges| ranges.map(|r| r.len()).max().unwrap_or(0));
        let (work, result_digest) = measure(&engine, format!("b{buckets}"), timing)?;
        let reduction = work_reduction(&full, &work);
        let mean = work.items_scanned as f64 / work.queries.max(1) as f64;
        rows.push(SweepRow {
            buckets_requested: buckets,
            bucket_depth: engine.depth(),
            buckets_effective: engine.bucket_count(),
            max_bucket_size,
            mean_items_scanned: mean,
            scan_fraction: if dataset.is_empty() { 0.0 } else { mean / dataset.len() as f64 },
            work: (&work).into(),
            reduction: reduction.ratio,
            zero_work: reduction.zero_work,
            result_digest,
        });
    }
    let mut by_buckets: Vec<&SweepRow> = rows.iter().collect();
    by_buckets.sort_by_key(|r| r.buckets_effective);
    let monotone = by_buckets.windows(2).all(|w| w[0].reduction <= w[1].reduction);

    Ok((
        ScenarioResults::TalSweep {
            queries: queries.len(),
            full_scan: (&full).into(),
            rows,
            monotone,
        },
        DeterminismCheck { sampled, identical },
    ))
}

fn memo(
    config: &ScenarioConfig,
    index: &TrieIndex,
    queries: &[Vec<Symbol>],
    cost: CostModel,
    timing: &mut Timing,
) -> Result<(ScenarioResults, DeterminismCheck)> {
    let mut cache = QueryCache::new();
    let mut cold = WorkReport::new(cost);
    let mut hot = WorkReport::new(cost);
    let mut cold_bytes = Vec::with_capacity(queries.len());
    let mut cold_time = Duration::ZERO;
    let mut hot_time = Duration::ZERO;
    let mut hot_identical = true;

    // Repeated queries in the pool would be hot on "cold" pass; count them.
    for q in queries {
        let t = Instant::now();
        let r = cache.query(index, q, config.k, config.query_mode, &mut cold)?;
        cold_time += t.elapsed();
        cold_bytes.push(r.to_bytes());
    }
    for (q, first) in queries.iter().zip(&cold_bytes) {
        let t = Instant::now();
        let r = cache.query(index, q, config.k, config.query_mode, &mut hot)?;
        hot_time += t.elapsed();
        hot_identical &= r.to_bytes() == *first;
    }
    let n = queries.len().max(1) as f64;
    let cold_us = cold_time.as_secs_f64() * 1e6 / n;
    let hot_us = hot_time.as_secs_f64() * 1e6 / n;
    timing.extra.insert("cold_mean_us".into(), cold_us);
    timing.extra.insert("hot_mean_us".into(), hot_us);
    timing.extra.insert(
        "speedup".into(),
        if hot_us > 0.0 { cold_us / hot_us } else { f64::INFINITY },
    );

    let determinism = replay_sample(queries, &cold_bytes, cost, |q, w| {
        index.query_with_work(q, config.k, config.query_mode, w)
    })?;
    Ok((
        ScenarioResults::Memo {
            queries: queries.len(),
            cold: (&cold).into(),
            hot: (&hot).into(),
            hot_identical,
            result_digest: digest(&cold_bytes),
        },
        determinism,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ScenarioKind) -> ScenarioConfig {
        ScenarioConfig {
            n_items: 2_000,
            seq_len: 16,
            alphabet: 4,
            queries: 300,
            prefix_len: 6,
            run_seconds: 0.0,
            bucket_sweep: vec![1, 4, 16],
            ..ScenarioConfig::defaults(kind, 5)
        }
    }

    fn deterministic_part(r: &ScenarioReport) -> (ScenarioResults, DeterminismCheck, IndexSummary) {
        (r.results.clone(), r.determinism.clone(), r.index.clone())
    }

    #[test]
    fn each_scenario_replays_identically() {
        for kind in [
            ScenarioKind::Sustained,
            ScenarioKind::Gnc,
            ScenarioKind::TalSweep,
            ScenarioKind::Memo,
        ] {
            let cfg = small(kind);
            let a = run_scenario(&cfg).unwrap();
            let b = run_scenario(&cfg).unwrap();
            assert!(a.determinism.identical, "{kind}");
            // the sweep replays once per configuration, baseline included
            let passes = if kind == ScenarioKind::TalSweep { 4 } else { 1 };
            assert_eq!(a.determinism.sampled, 3 * passes, "{kind}");
            assert_eq!(deterministic_part(&a), deterministic_part(&b), "{kind}");
        }
    }

    #[test]
    fn workers_do_not_change_results() {
        let one = run_scenario(&small(ScenarioKind::Sustained)).unwrap();
        let three = run_scenario(&ScenarioConfig {
            workers: 3,
            ..small(ScenarioKind::Sustained)
        })
        .unwrap();
        assert_eq!(one.results, three.results);
    }

    #[test]
    fn sustained_percentiles_ordered() {
        let r = run_scenario(&ScenarioConfig {
            run_seconds: 0.2,
            ..small(ScenarioKind::Sustained)
        })
        .unwrap();
        let lat = r.timing.latency.unwrap();
        assert!(lat.p50_us <= lat.p95_us && lat.p95_us <= lat.p99_us);
        assert!(lat.total_queries >= 300);
    }

    #[test]
    fn memo_hot_pass_is_free() {
        let r = run_scenario(&small(ScenarioKind::Memo)).unwrap();
        let ScenarioResults::Memo { hot, hot_identical, .. } = r.results else {
            panic!("wrong results kind");
        };
        assert!(hot_identical);
        assert_eq!(hot.symbols_compared, 0);
        assert_eq!(hot.items_scanned, 0);
        assert_eq!(hot.cache_hits, 300);
    }

    #[test]
    fn sweep_has_one_row_per_bucket_count() {
        let r = run_scenario(&small(ScenarioKind::TalSweep)).unwrap();
        let ScenarioResults::TalSweep { rows, .. } = r.results else {
            panic!("wrong results kind");
        };
        assert_eq!(rows.iter().map(|r| r.buckets_requested).collect::<Vec<_>>(), vec![1, 4, 16]);
        assert_eq!(rows[0].reduction, 1.0);
    }

    #[test]
    fn missing_snapshot_is_invalid_state() {
        let cfg = ScenarioConfig {
            index_path: Some("/nonexistent/index.lcpk".into()),
            ..small(ScenarioKind::Gnc)
        };
        assert!(matches!(run_scenario(&cfg), Err(Error::InvalidState(_))));
    }
}
