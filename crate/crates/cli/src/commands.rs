use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcpk_core::bench::memwall::{format_bytes, GIB};
use lcpk_core::bench::{
    generate_dataset, generate_queries, memory_wall, report, run_scenario, uniform_queries, DatasetSpec,
    Distribution, ScenarioConfig, DEFAULT_BUDGET_BYTES,
};
use lcpk_core::verify::verify_dataset;
use lcpk_core::{oracle_top_k, Dataset, Mode, QueryResult, Symbol, TrieIndex};

use crate::datafile::{
    decode_dataset, encode_dataset, is_binary_dataset, parse_text_dataset, read_file, write_file, Vocabulary,
};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lcpk", version, about = "Top-k retrieval under longest-common-prefix similarity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index snapshot from a dataset file.
    Build(BuildArgs),
    /// Run top-k queries against an index snapshot.
    Query(QueryArgs),
    /// Run a benchmark scenario from a config file.
    Bench(BenchArgs),
    /// Memory needed to materialize all pairwise similarities.
    Memwall(MemwallArgs),
    /// Check the index against the brute-force oracle and its invariants.
    Verify(VerifyArgs),
    /// Write a seeded synthetic dataset.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub dataset: PathBuf,
    pub index_out: PathBuf,
    /// Read the dataset as whitespace-separated tokens, one item per line.
    #[arg(long)]
    pub text: bool,
    /// Where to write the token vocabulary [default: <index_out>.vocab].
    #[arg(long, requires = "text")]
    pub vocab_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub index: PathBuf,
    /// One query, as symbols (or tokens with --vocab) separated by spaces.
    #[arg(long, required_unless_present = "query_file", conflicts_with = "query_file")]
    pub query: Option<String>,
    /// One query per line.
    #[arg(long)]
    pub query_file: Option<PathBuf>,
    #[arg(short, long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value = "complete")]
    pub mode: Mode,
    /// Compare every answer with a brute-force scan; prints OK when all agree.
    #[arg(long)]
    pub verify_oracle: bool,
    /// Vocabulary written by `build --text`.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub config: PathBuf,
    #[arg(long, default_value = "reports")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MemwallArgs {
    /// Item counts to evaluate (repeatable) [default: 1e5, 2e5, 5e5, 1e6].
    #[arg(long = "n")]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 80.0)]
    pub budget_gib: f64,
    /// Compare against the footprint of this index snapshot.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Dataset to check; a synthetic one is generated when omitted.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, requires = "dataset")]
    pub text: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub len: usize,
    #[arg(long, default_value_t = 4)]
    pub sigma: u32,
    #[arg(long, default_value_t = 200)]
    pub queries: usize,
    #[arg(long, default_value_t = 16)]
    pub buckets: u64,
    #[arg(short, long, value_delimiter = ',', default_values_t = [1, 5, 50])]
    pub k: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub out: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub len: usize,
    #[arg(long)]
    pub sigma: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "uniform")]
    pub distribution: Distribution,
    /// Require pairwise distinct items.
    #[arg(long)]
    pub distinct: bool,
    /// Also write this many queries, one per line.
    #[arg(long, requires = "queries_out")]
    pub queries: Option<usize>,
    #[arg(long)]
    pub queries_out: Option<PathBuf>,
    /// Symbols copied from a random item into each query.
    #[arg(long, default_value_t = 0)]
    pub prefix_len: usize,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Build(a) => build(a, out),
        Command::Query(a) => query(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Memwall(a) => memwall(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Gen(a) => gen(a, out),
    }
}

fn emit(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), CliError> {
    out.write_all(text.as_ref().as_bytes())
        .map_err(|e| CliError::Data(format!("writing output: {e}")))
}

fn load_dataset(path: &Path, text: bool) -> Result<(Dataset, Option<Vocabulary>), CliError> {
    let bytes = read_file(path)?;
    let where_ = path.display();
    if text {
        let text = String::from_utf8(bytes)
            .map_err(|e| CliError::Data(format!("{where_}: not UTF-8 text ({e})")))?;
        let (ds, vocab) = parse_text_dataset(&text).map_err(|e| e.context(&where_))?;
        Ok((ds, Some(vocab)))
    } else if !is_binary_dataset(&bytes) {
        Err(CliError::Data(format!(
            "{where_}: header: bad magic (pass --text for a token file)"
        )))
    } else {
        Ok((decode_dataset(&bytes).map_err(|e| e.context(&where_))?, None))
    }
}

pub fn load_index(path: &Path) -> Result<TrieIndex, CliError> {
    let bytes = read_file(path)?;
    TrieIndex::from_snapshot_bytes(&bytes).map_err(|e| CliError::from(e).context(path.display()))
}

fn build(a: BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (dataset, vocab) = load_dataset(&a.dataset, a.text)?;
    let start = Instant::now();
    let index = TrieIndex::build(&dataset);
    let elapsed = start.elapsed();
    let snapshot = index.to_snapshot_bytes();
    write_file(&a.index_out, &snapshot)?;
    if let Some(vocab) = vocab {
        let path = a.vocab_out.unwrap_or_else(|| {
            let mut p = a.index_out.clone().into_os_string();
            p.push(".vocab");
            p.into()
        });
        write_file(&path, vocab.to_text().as_bytes())?;
        emit(out, format!("vocab = {}\n", path.display()))?;
    }
    emit(
        out,
        format!(
            "items = {}\nseq_len = {}\nalphabet = {}\nnode_count = {}\nindex_bytes = {} ({})\nsnapshot_bytes = {}\nbuild_seconds = {:.6}\n",
            index.len(),
            index.seq_len(),
            index.alphabet().size(),
            index.node_count(),
            index.heap_bytes(),
            format_bytes(index.heap_bytes() as u128),
            snapshot.len(),
            elapsed.as_secs_f64(),
        ),
    )
}

fn parse_query(line: &str, vocab: Option<&Vocabulary>) -> Result<Vec<Symbol>, String> {
    match vocab {
        Some(v) => v.encode_line(line),
        None => line
            .split_whitespace()
            .map(|t| t.parse::<Symbol>().map_err(|_| format!("token {t:?} is not a symbol")))
            .collect(),
    }
}

fn query(a: QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let index = load_index(&a.index)?;
    let vocab = match &a.vocab {
        Some(p) => {
            let text = String::from_utf8(read_file(p)?)
                .map_err(|e| CliError::Data(format!("{}: not UTF-8 ({e})", p.display())))?;
            Some(Vocabulary::from_text(&text).map_err(|e| e.context(p.display()))?)
        }
        None => None,
    };
    let (source, lines): (String, Vec<String>) = match (&a.query, &a.query_file) {
        (Some(q), _) => ("--query".into(), vec![q.clone()]),
        (None, Some(p)) => {
            let text = String::from_utf8(read_file(p)?)
                .map_err(|e| CliError::Data(format!("{}: not UTF-8 ({e})", p.display())))?;
            (p.display().to_string(), text.lines().map(str::to_owned).collect())
        }
        (None, None) => return Err(CliError::Usage("one of --query or --query-file is required".into())),
    };

    let mut queries = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let q = parse_query(line, vocab.as_ref())
            .map_err(|m| CliError::Data(format!("{source}: line {}: {m}", i + 1)))?;
        if q.len() != index.seq_len() {
            return Err(CliError::Data(format!(
                "{source}: line {}: query length {}, expected {}",
                i + 1,
                q.len(),
                index.seq_len()
            )));
        }
        queries.push((i + 1, q));
    }

    let dataset = a.verify_oracle.then(|| index.to_dataset());
    for (n, (line, q)) in queries.iter().enumerate() {
        let r = index
            .query(q, a.k, a.mode)
            .map_err(|e| CliError::from(e).context(format!("{source}: line {line}")))?;
        if let Some(ds) = &dataset {
            check_against_oracle(ds, q, a.k, &r).map_err(|m| CliError::Internal(format!("{source}: line {line}: {m}")))?;
        }
        emit(out, render_result(n, &r, a.format))?;
    }
    if dataset.is_some() {
        emit(out, "OK\n")?;
    }
    Ok(())
}

fn check_against_oracle(ds: &Dataset, q: &[Symbol], k: usize, r: &QueryResult) -> Result<(), String> {
    let expected = oracle_top_k(ds, q, k).map_err(|e| e.to_string())?;
    let got: Vec<(u32, u32)> = r.hits.iter().map(|h| (h.index, h.lcp)).collect();
    let ok = match r.mode {
        Mode::Complete => got == expected.hits,
        // the matched subtree is a subset of the best-LCP ties
        Mode::Strict => r.hits.iter().all(|h| {
            Some(h.lcp) == expected.top_lcp()
                && lcpk_core::metric::common_prefix_len(ds.item(h.index as usize), q) == h.lcp as usize
        }),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("result {got:?} disagrees with brute force {:?}", expected.hits))
    }
}

fn render_result(n: usize, r: &QueryResult, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = format!(
                "# query {n}: mode {}, matched depth {}, {} hits\n",
                r.mode,
                r.matched_depth,
                r.hits.len()
            );
            for h in &r.hits {
                s.push_str(&format!("{} {}\n", h.index, h.lcp));
            }
            s
        }
        Format::Machine => {
            let hits: Vec<[u32; 2]> = r.hits.iter().map(|h| [h.index, h.lcp]).collect();
            let v = serde_json::json!({
                "query": n,
                "mode": r.mode,
                "matched_depth": r.matched_depth,
                "hits": hits,
            });
            format!("{v}\n")
        }
    }
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = String::from_utf8(read_file(&a.config)?)
        .map_err(|e| CliError::Usage(format!("{}: not UTF-8 ({e})", a.config.display())))?;
    let mut config = ScenarioConfig::parse(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.config.display())))?;
    if let Some(w) = a.workers {
        config.workers = w;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.config.display())))?;
    for key in &config.ignored_keys {
        eprintln!("note: config key {key:?} has no effect");
    }

    let report = run_scenario(&config)?;
    if !report.determinism.identical {
        return Err(CliError::Internal(format!(
            "replayed queries returned different bytes ({} sampled)",
            report.determinism.sampled
        )));
    }
    let json = report::to_json(&report)?;
    let text = report::to_text(&report)?;
    let stem = format!("{}_seed{}", config.scenario, config.seed);
    write_file(&a.out_dir.join(format!("{stem}.json")), json.as_bytes())?;
    write_file(&a.out_dir.join(format!("{stem}.txt")), text.as_bytes())?;
    match a.format {
        Format::Text => emit(out, text),
        Format::Machine => emit(out, json + "\n"),
    }
}

fn memwall(a: MemwallArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(a.budget_gib.is_finite() && a.budget_gib > 0.0) {
        return Err(CliError::Usage(format!("--budget-gib {}: must be positive", a.budget_gib)));
    }
    let budget = if a.budget_gib == 80.0 {
        DEFAULT_BUDGET_BYTES
    } else {
        (a.budget_gib * GIB as f64).round() as u128
    };
    let index = a.index.as_deref().map(load_index).transpose()?;
    let ns = match (&index, a.n.is_empty()) {
        (_, false) => a.n.clone(),
        (Some(idx), true) => vec![idx.len() as u64],
        (None, true) => vec![100_000, 200_000, 500_000, 1_000_000],
    };
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let mut est = memory_wall(n, budget).map_err(|e| CliError::Usage(format!("--n {n}: {e}")))?;
        if let Some(idx) = &index {
            est = est.with_index_bytes(idx.heap_bytes() as u64);
        }
        rows.push(est);
    }
    match a.format {
        Format::Machine => {
            let v = serde_json::to_string_pretty(&rows).map_err(|e| CliError::Internal(e.to_string()))?;
            emit(out, v + "\n")
        }
        Format::Text => {
            let mut s = format!("{:>12}  {:>12}  budget {:.2} GiB\n", "n", "fp16 matrix", a.budget_gib);
            for est in &rows {
                s.push_str(&format!(
                    "{:>12}  {:>12}  {}",
                    est.n,
                    est.display_size(),
                    if est.feasible { "feasible" } else { "infeasible" }
                ));
                if let (Some(bytes), Some(ratio)) = (est.index_bytes_measured, est.ratio) {
                    s.push_str(&format!("  index {}  ratio {ratio:.1}x", format_bytes(bytes.into())));
                }
                s.push('\n');
            }
            emit(out, s)
        }
    }
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dataset = match &a.dataset {
        Some(p) => load_dataset(p, a.text)?.0,
        None => generate_dataset(&DatasetSpec::uniform(a.n, a.len, a.sigma, a.seed))
            .map_err(|e| CliError::Usage(e.to_string()))?,
    };
    if a.k.contains(&0) {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let l = dataset.seq_len();
    // half near existing items, half unrelated
    let mut queries = generate_queries(&dataset, a.queries.div_ceil(2), l / 2, a.seed ^ 0x5eed);
    queries.extend(uniform_queries(dataset.alphabet(), l, a.queries / 2, a.seed ^ 0xfeed));

    let summary = verify_dataset(&dataset, &queries, &a.k, a.buckets)?;

    let first = TrieIndex::build(&dataset).to_snapshot_bytes();
    let second = TrieIndex::build(&dataset).to_snapshot_bytes();
    if first != second {
        return Err(CliError::Internal("two builds produced different snapshots".into()));
    }
    let reloaded = TrieIndex::from_snapshot_bytes(&first)?;
    if reloaded.to_snapshot_bytes() != first {
        return Err(CliError::Internal("snapshot does not survive a reload".into()));
    }
    for q in &queries {
        for mode in [Mode::Strict, Mode::Complete] {
            let k = a.k[0];
            let built = TrieIndex::from_snapshot_bytes(&second)?.query(q, k, mode)?;
            if built != reloaded.query(q, k, mode)? {
                return Err(CliError::Internal(format!("query {q:?}: reloaded index disagrees")));
            }
        }
    }

    emit(
        out,
        format!(
            "items = {}\nseq_len = {l}\nalphabet = {}\nnodes_checked = {}\nbuckets_checked = {}\nqueries_checked = {}\nOK\n",
            dataset.len(),
            dataset.alphabet().size(),
            summary.nodes_checked,
            summary.buckets_checked,
            summary.queries_checked,
        ),
    )
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = DatasetSpec {
        items: a.n,
        seq_len: a.len,
        alphabet: a.sigma,
        seed: a.seed,
        distribution: a.distribution,
        distinct: a.distinct,
    };
    let dataset = generate_dataset(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&a.out, &encode_dataset(&dataset))?;
    if let (Some(count), Some(path)) = (a.queries, &a.queries_out) {
        let mut text = String::new();
        for q in generate_queries(&dataset, count, a.prefix_len, a.seed.wrapping_add(1)) {
            let line: Vec<String> = q.iter().map(|s| s.to_string()).collect();
            text.push_str(&line.join(" "));
            text.push('\n');
        }
        write_file(path, text.as_bytes())?;
    }
    emit(out, format!("wrote {} items of length {} to {}\n", dataset.len(), a.len, a.out.display()))
}
