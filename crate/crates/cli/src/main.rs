//! `knn`: exact k-nearest-neighbor search, entropy estimation,
//! classification, descriptor retrieval and timing grids from the shell.
//!
//! Exit status: 0 on success, 2 for malformed input CSV, 3 for contract
//! violations reported by the engine (k too large, dimension mismatch, ...),
//! 1 for usage and I/O errors. Failures print one JSON line on stderr.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "knn",
    version,
    about = "Exact k-nearest-neighbor search and applications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// k nearest references of every query point.
    Search(SearchArgs),
    /// Run the (n, d) timing grid and write a report.
    Bench(BenchArgs),
    /// k-NN estimate of differential entropy, in nats.
    Entropy(EntropyArgs),
    /// Majority-vote label of every query point.
    Classify(ClassifyArgs),
    /// Rank database images by descriptor votes.
    Retrieve(RetrieveArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Worker threads (0 = all available).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SearchMethod {
    Bf,
    Kdtree,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Reference points (CSV).
    #[arg(long = "ref")]
    reference: std::path::PathBuf,
    /// Query points (CSV).
    #[arg(long)]
    query: std::path::PathBuf,
    #[arg(long)]
    k: usize,
    /// euclidean, manhattan, chebyshev or mahalanobis:PATH (d×d CSV matrix).
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long, value_enum, default_value_t = SearchMethod::Bf)]
    method: SearchMethod,
    /// Bucket size of kd-tree leaves.
    #[arg(long, default_value_t = knn_core::kdtree::DEFAULT_LEAF_SIZE)]
    leaf_size: usize,
    /// Query rows materialized at once by brute force.
    #[arg(long, default_value_t = 256)]
    chunk_size: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Grid {
    /// n ∈ {1200, 2400, 4800}, d ∈ {8, 16, 32, 64, 80, 96}.
    Default,
    /// n ∈ {200, 400}, d ∈ {2, 8, 16}; seconds to run.
    Smoke,
    /// n up to 38400; needs --allow-large.
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Grid::Default)]
    grid: Grid,
    /// Override the point counts, comma-separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Override the dimensions, comma-separated.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long, default_value_t = knn_core::bench::DEFAULT_K)]
    k: usize,
    /// Methods to time, comma-separated (bf, kdt).
    #[arg(long, value_delimiter = ',', default_value = "bf,kdt")]
    methods: Vec<String>,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value_t = knn_core::kdtree::DEFAULT_LEAF_SIZE)]
    leaf_size: usize,
    /// Seconds after which a method is reported as skipped for a cell.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Permit point counts above the desk-scale limit of 4800.
    #[arg(long)]
    allow_large: bool,
    /// Report format for --out; defaults to the file extension, else CSV.
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<std::path::PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OnDuplicate {
    Error,
    Jitter,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    /// Sample points (CSV).
    #[arg(long = "in")]
    input: std::path::PathBuf,
    #[arg(long)]
    k: usize,
    /// corrected or literal.
    #[arg(long, default_value = "corrected")]
    variant: String,
    /// Policy for coincident samples.
    #[arg(long, value_enum, default_value_t = OnDuplicate::Error)]
    on_duplicate: OnDuplicate,
    /// Seed of the jitter policy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Training points with a trailing integer label column (CSV).
    #[arg(long)]
    train: std::path::PathBuf,
    #[arg(long)]
    query: std::path::PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct RetrieveArgs {
    /// Database descriptors with a leading image-id column (CSV).
    #[arg(long)]
    db: std::path::PathBuf,
    /// Query descriptors (CSV).
    #[arg(long)]
    query: std::path::PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code())
        }
    }
}
