use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use knn_core::bench::{self, run_grid_with_progress, BenchmarkConfig, Method};
use knn_core::bruteforce::BfConfig;
use knn_core::entropy::{kl_entropy_with, DuplicatePolicy, EntropyOptions};
use knn_core::{applications, io, Error, KdTree, Metric, MetricKind};
use serde_json::json;

use crate::output::emit;
use crate::{
    BenchArgs, ClassifyArgs, Command, EntropyArgs, Grid, OnDuplicate, ReportFormat, RetrieveArgs,
    SearchArgs, SearchMethod,
};

#[derive(Debug)]
pub enum CliError {
    Engine(Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io),
            other => CliError::Engine(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(e) if e.is_input_format() => 2,
            CliError::Engine(_) => 3,
            CliError::Io(_) | CliError::Usage(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Engine(e) if e.is_input_format() => "csv",
            CliError::Engine(_) => "contract",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn to_json_line(&self) -> String {
        let message = match self {
            CliError::Engine(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
            CliError::Usage(m) => m.clone(),
        };
        json!({ "error": self.kind(), "exit": self.exit_code(), "message": message }).to_string()
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Search(a) => search(a),
        Command::Bench(a) => bench(a),
        Command::Entropy(a) => entropy(a),
        Command::Classify(a) => classify(a),
        Command::Retrieve(a) => retrieve(a),
    }
}

/// `euclidean`, `manhattan`, `chebyshev` or `mahalanobis:PATH`.
fn parse_metric(spec: &str) -> CliResult<Metric> {
    if let Some(path) = spec.strip_prefix("mahalanobis:") {
        let (matrix, d) = io::read_square_matrix(path)?;
        return Ok(Metric::mahalanobis(matrix, d)?);
    }
    match spec.parse::<MetricKind>()? {
        MetricKind::Euclidean => Ok(Metric::Euclidean),
        MetricKind::Manhattan => Ok(Metric::Manhattan),
        MetricKind::Chebyshev => Ok(Metric::Chebyshev),
        MetricKind::Mahalanobis => Err(CliError::Usage(
            "mahalanobis needs a matrix file: --metric mahalanobis:PATH".into(),
        )),
    }
}

fn bf_config(workers: usize) -> BfConfig {
    BfConfig::default().with_workers(workers)
}

fn search(a: SearchArgs) -> CliResult {
    let metric = parse_metric(&a.metric)?;
    let refs = io::read_points(&a.reference)?;
    let queries = io::read_points(&a.query)?;
    let out = match a.method {
        SearchMethod::Bf => {
            let cfg = bf_config(a.common.workers).with_chunk_size(a.chunk_size);
            knn_core::bf_knn(&queries, &refs, a.k, &metric, &cfg)?
        }
        SearchMethod::Kdtree => {
            let tree = KdTree::build(refs, a.leaf_size)?;
            knn_core::bruteforce::with_workers(a.common.workers, || {
                tree.knn(&queries, a.k, &metric)
            })??
        }
    };
    let mut text = String::from("query_index,rank,ref_index,distance\n");
    for (i, row) in out.table.rows().enumerate() {
        for (rank, nb) in row.iter().enumerate() {
            let _ = writeln!(text, "{i},{},{},{}", rank + 1, nb.index, nb.distance);
        }
    }
    emit(a.common.out.as_deref(), &text)
}

fn entropy(a: EntropyArgs) -> CliResult {
    let points = io::read_points(&a.input)?;
    let opts = EntropyOptions {
        variant: a.variant.parse()?,
        duplicates: match a.on_duplicate {
            OnDuplicate::Error => DuplicatePolicy::Error,
            OnDuplicate::Jitter => DuplicatePolicy::Jitter { seed: a.seed },
        },
        keep_terms: false,
        search: bf_config(a.common.workers),
    };
    let est = kl_entropy_with(&points, a.k, &opts)?;
    let mut text = serde_json::to_string(&est).expect("estimate serializes");
    text.push('\n');
    emit(a.common.out.as_deref(), &text)
}

fn classify(a: ClassifyArgs) -> CliResult {
    let metric = parse_metric(&a.metric)?;
    let train = io::read_labeled(&a.train)?;
    let queries = io::read_points(&a.query)?;
    let labels = applications::knn_classify_with(
        &train,
        &queries,
        a.k,
        &metric,
        &bf_config(a.common.workers),
    )?;
    let mut text = String::from("query_index,label\n");
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(text, "{i},{label}");
    }
    emit(a.common.out.as_deref(), &text)
}

fn retrieve(a: RetrieveArgs) -> CliResult {
    let metric = parse_metric(&a.metric)?;
    let db = io::read_descriptors(&a.db)?;
    let queries = io::read_points(&a.query)?;
    let tally = applications::retrieve_vote_with(
        &db,
        &queries,
        a.k,
        &metric,
        &bf_config(a.common.workers),
    )?;
    let doc = json!({
        "k": a.k,
        "queries": queries.len(),
        "scores": tally.scores,
        "ranking": tally.ranking,
    });
    emit(a.common.out.as_deref(), &format!("{doc}\n"))
}

fn bench(a: BenchArgs) -> CliResult {
    let (grid_n, grid_d): (Vec<usize>, Vec<usize>) = match a.grid {
        Grid::Default => (bench::DESK_N.to_vec(), bench::GRID_D.to_vec()),
        Grid::Smoke => (vec![200, 400], vec![2, 8, 16]),
        Grid::Full => (bench::FULL_N.to_vec(), bench::GRID_D.to_vec()),
    };
    let methods = a
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<Vec<_>, _>>()?;
    let config = BenchmarkConfig {
        n_values: if a.n.is_empty() { grid_n } else { a.n },
        d_values: if a.d.is_empty() { grid_d } else { a.d },
        k: a.k,
        methods,
        metric: parse_metric(&a.metric)?,
        seed: a.seed,
        repetitions: a.repetitions,
        worker_count: a.common.workers,
        leaf_size: a.leaf_size,
        cell_time_budget: a.time_budget.map(Duration::from_secs_f64),
        allow_large: a.allow_large,
    };
    let report = run_grid_with_progress(&config, |row| {
        let secs = row
            .seconds
            .map_or_else(|| "skipped".to_string(), |s| format!("{s:.6}s"));
        eprintln!("{} n={} d={} k={} {secs}", row.method, row.n, row.d, row.k);
    })?;

    let format =
        a.format
            .unwrap_or_else(|| match a.common.out.as_deref().and_then(Path::extension) {
                Some(ext) if ext == "json" => ReportFormat::Json,
                _ => ReportFormat::Csv,
            });
    let text = match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json() + "\n",
    };
    emit(a.common.out.as_deref(), &text)?;
    if let Some(path) = a.json.as_deref() {
        emit(Some(path), &(report.to_json() + "\n"))?;
    }
    Ok(())
}
