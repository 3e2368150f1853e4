//! Timing grid over point count and dimension.
//!
//! Each `(n, d)` cell draws fresh uniform reference and query sets of size
//! `n` from seeds derived from the master seed, runs every method, checks
//! that all methods returned the same neighbor table, then records the
//! median wall time and the distance-evaluation count.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bruteforce::{bf_knn, with_workers, BfConfig};
use crate::error::{Error, Result};
use crate::kdtree::{KdTree, DEFAULT_LEAF_SIZE};
use crate::metric::Metric;
use crate::neighbors::SearchOutput;
use crate::points::PointSet;

pub const CSV_HEADER: &str = "method,n,d,k,seconds,dist_evals,seed";
pub const DISTRIBUTION: &str = "uniform[0,1)^d, ChaCha8 seeded per cell";

/// Point counts of the desk-scale grid.
pub const DESK_N: [usize; 3] = [1200, 2400, 4800];
/// Full point-count axis, needs `allow_large`.
pub const FULL_N: [usize; 6] = [1200, 2400, 4800, 9600, 19200, 38400];
pub const GRID_D: [usize; 6] = [8, 16, 32, 64, 80, 96];
pub const DEFAULT_K: usize = 20;
/// Above this `n`, a grid only runs with `allow_large`.
pub const DESK_MAX_N: usize = 4800;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "BF")]
    Bf,
    #[serde(rename = "KDT")]
    Kdt,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bf => "BF",
            Method::Kdt => "KDT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(Method::Bf),
            "kdt" | "kdtree" => Ok(Method::Kdt),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub n_values: Vec<usize>,
    pub d_values: Vec<usize>,
    pub k: usize,
    pub methods: Vec<Method>,
    pub metric: Metric,
    pub seed: u64,
    pub repetitions: usize,
    pub worker_count: usize,
    pub leaf_size: usize,
    /// A method whose run exceeds this is reported as skipped for the cell.
    pub cell_time_budget: Option<Duration>,
    pub allow_large: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            n_values: DESK_N.to_vec(),
            d_values: GRID_D.to_vec(),
            k: DEFAULT_K,
            methods: vec![Method::Bf, Method::Kdt],
            metric: Metric::Euclidean,
            seed: 0x5eed,
            repetitions: 3,
            worker_count: 0,
            leaf_size: DEFAULT_LEAF_SIZE,
            cell_time_budget: None,
            allow_large: false,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_values.is_empty() || self.d_values.is_empty() || self.methods.is_empty() {
            return bad("n_values, d_values and methods must be non-empty".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < self.k) {
            return Err(Error::KTooLarge {
                k: self.k,
                available: n,
            });
        }
        if self.d_values.contains(&0) {
            return bad("dimensions must be at least 1".into());
        }
        if !self.allow_large {
            if let Some(&n) = self.n_values.iter().find(|&&n| n > DESK_MAX_N) {
                return bad(format!(
                    "n = {n} is above the desk-scale limit of {DESK_MAX_N}; enable large grids explicitly"
                ));
            }
        }
        if matches!(self.metric, Metric::Mahalanobis(_)) {
            return bad(
                "the benchmark grid varies d, so it cannot use a fixed Mahalanobis matrix".into(),
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub method: Method,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// Median wall time; `None` when the cell was skipped.
    pub seconds: Option<f64>,
    pub dist_evals: Option<u64>,
    pub seed: u64,
}

impl BenchmarkRow {
    pub fn skipped(&self) -> bool {
        self.seconds.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub environment: String,
    pub metric: String,
    pub distribution: String,
    pub leaf_size: usize,
    pub worker_count: usize,
    pub repetitions: usize,
}

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let seconds = r
                .seconds
                .map_or_else(|| "skipped".to_string(), |s| format!("{s}"));
            let evals = r.dist_evals.map_or_else(String::new, |e| e.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.method, r.n, r.d, r.k, seconds, evals, r.seed
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses the CSV written by [`BenchmarkReport::to_csv`]; metadata
    /// fields are left empty.
    pub fn rows_from_csv(text: &str) -> Result<Vec<BenchmarkRow>> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => {
                return Err(Error::Csv {
                    line: 1,
                    message: format!("expected header {CSV_HEADER:?}"),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let err = |m: &str| Error::Csv {
                line: i + 1,
                message: m.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(err("expected 7 fields"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| err("invalid integer"));
            rows.push(BenchmarkRow {
                method: f[0].parse().map_err(|_| err("invalid method"))?,
                n: num(f[1])?,
                d: num(f[2])?,
                k: num(f[3])?,
                seconds: match f[4] {
                    "skipped" => None,
                    s => Some(s.parse().map_err(|_| err("invalid seconds"))?),
                },
                dist_evals: match f[5] {
                    "" => None,
                    s => Some(s.parse().map_err(|_| err("invalid dist_evals"))?),
                },
                seed: f[6].parse().map_err(|_| err("invalid seed"))?,
            });
        }
        Ok(rows)
    }
}

/// `n` points with coordinates i.i.d. uniform on `[0, 1)` from ChaCha8
/// seeded with `seed`. Output is identical on every platform.
pub fn generate_uniform(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(Error::EmptyPointSet { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::from_flat((0..n * d).map(|_| rng.random::<f64>()).collect(), d)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the reference set of cell `(n, d)`; the query set uses the
/// next seed.
pub fn cell_seed(master: u64, n: usize, d: usize) -> u64 {
    splitmix64(splitmix64(master ^ n as u64) ^ (d as u64).rotate_left(32))
}

fn host_description(workers: usize) -> String {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{}-{}, {cpus} hardware threads, worker_count={workers}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

fn median(times: &mut [f64]) -> f64 {
    times.sort_by(f64::total_cmp);
    let m = times.len();
    if m % 2 == 1 {
        times[m / 2]
    } else {
        0.5 * (times[m / 2 - 1] + times[m / 2])
    }
}

struct MethodRun {
    seconds: Option<f64>,
    output: Option<SearchOutput>,
}

fn run_method(
    method: Method,
    refs: &PointSet,
    queries: &PointSet,
    config: &BenchmarkConfig,
) -> Result<MethodRun> {
    let mut times = Vec::with_capacity(config.repetitions);
    let mut first = None;
    for _ in 0..config.repetitions {
        let start = Instant::now();
        let out = match method {
            Method::Bf => bf_knn(
                queries,
                refs,
                config.k,
                &config.metric,
                &BfConfig::counted(),
            )?,
            Method::Kdt => {
                let tree = KdTree::build(refs.clone(), config.leaf_size)?;
                tree.knn(queries, config.k, &config.metric)?
            }
        };
        let elapsed = start.elapsed();
        if config.cell_time_budget.is_some_and(|b| elapsed > b) {
            return Ok(MethodRun {
                seconds: None,
                output: None,
            });
        }
        times.push(elapsed.as_secs_f64());
        first.get_or_insert(out);
    }
    // first run is warm-up once there are enough samples
    let samples = if times.len() >= 4 {
        &mut times[1..]
    } else {
        &mut times[..]
    };
    Ok(MethodRun {
        seconds: Some(median(samples).max(f64::MIN_POSITIVE)),
        output: first,
    })
}

pub fn run_grid(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    run_grid_with_progress(config, |_| {})
}

/// Like [`run_grid`], calling `progress` after each finished row.
pub fn run_grid_with_progress(
    config: &BenchmarkConfig,
    mut progress: impl FnMut(&BenchmarkRow),
) -> Result<BenchmarkReport> {
    config.validate()?;
    let mut rows = Vec::new();
    for &n in &config.n_values {
        for &d in &config.d_values {
            let seed = cell_seed(config.seed, n, d);
            let refs = generate_uniform(n, d, seed)?;
            let queries = generate_uniform(n, d, seed.wrapping_add(1))?;

            let mut runs = Vec::with_capacity(config.methods.len());
            for &method in &config.methods {
                let run = with_workers(config.worker_count, || {
                    run_method(method, &refs, &queries, config)
                })??;
                runs.push((method, run));
            }

            // correctness gate before any timing is reported
            let finished: Vec<_> = runs
                .iter()
                .filter_map(|(m, r)| r.output.as_ref().map(|o| (m, o)))
                .collect();
            if let Some((base_method, base)) = finished.first() {
                for (m, o) in &finished[1..] {
                    if !o.table.bitwise_eq(&base.table) {
                        return Err(Error::CrossCheck {
                            left: base_method.to_string(),
                            right: m.to_string(),
                            n,
                            d,
                        });
                    }
                }
            }

            for (method, run) in runs {
                let row = BenchmarkRow {
                    method,
                    n,
                    d,
                    k: config.k,
                    seconds: run.seconds,
                    dist_evals: run.output.and_then(|o| o.distance_evals),
                    seed,
                };
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(BenchmarkReport {
        rows,
        environment: host_description(config.worker_count),
        metric: config.metric.to_string(),
        distribution: DISTRIBUTION.to_string(),
        leaf_size: config.leaf_size,
        worker_count: config.worker_count,
        repetitions: config.repetitions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionFit {
    /// Seconds per unit of dimension.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line of wall time against dimension for one method at
/// one point count. Skipped rows are ignored.
pub fn fit_dimension_slope(
    report: &BenchmarkReport,
    n: usize,
    method: Method,
) -> Result<DimensionFit> {
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.method == method && r.n == n)
        .filter_map(|r| r.seconds.map(|s| (r.d as f64, s)))
        .collect();
    let mut dims: Vec<u64> = pts.iter().map(|p| p.0.to_bits()).collect();
    dims.sort_unstable();
    dims.dedup();
    if dims.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need timings at 3 or more distinct dimensions for {method} at n={n}, found {}",
            dims.len()
        )));
    }
    let count = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    // constant data is fit perfectly by a flat line
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DimensionFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(times: impl Fn(usize) -> f64) -> BenchmarkReport {
        BenchmarkReport {
            rows: GRID_D
                .iter()
                .map(|&d| BenchmarkRow {
                    method: Method::Bf,
                    n: 100,
                    d,
                    k: 20,
                    seconds: Some(times(d)),
                    dist_evals: Some(10_000),
                    seed: 1,
                })
                .collect(),
            environment: String::new(),
            metric: "euclidean".into(),
            distribution: DISTRIBUTION.into(),
            leaf_size: 16,
            worker_count: 0,
            repetitions: 3,
        }
    }

    #[test]
    fn exact_line() {
        let fit = fit_dimension_slope(&synthetic(|d| 0.01 * d as f64), 100, Method::Bf).unwrap();
        assert!((fit.slope - 0.01).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let fit =
            fit_dimension_slope(&synthetic(|d| 0.25 + 0.003 * d as f64), 100, Method::Bf).unwrap();
        assert!((fit.slope - 0.003).abs() < 1e-12);
        assert!((fit.intercept - 0.25).abs() < 1e-12);
    }

    #[test]
    fn constant_times() {
        let fit = fit_dimension_slope(&synthetic(|_| 0.5), 100, Method::Bf).unwrap();
        assert!(fit.slope.abs() < 1e-15);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn too_few_points() {
        let mut r = synthetic(|d| d as f64);
        r.rows.truncate(2);
        assert!(fit_dimension_slope(&r, 100, Method::Bf).is_err());
        assert!(fit_dimension_slope(&synthetic(|d| d as f64), 100, Method::Kdt).is_err());
    }

    #[test]
    fn uniform_generator() {
        let a = generate_uniform(50, 3, 42).unwrap();
        assert_eq!(a, generate_uniform(50, 3, 42).unwrap());
        assert!(a.as_slice().iter().all(|&v| (0.0..1.0).contains(&v)));
        assert_ne!(a, generate_uniform(50, 3, 43).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut c = BenchmarkConfig {
            n_values: vec![10],
            ..BenchmarkConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::KTooLarge { .. })));
        c.n_values = vec![9600];
        assert!(c.validate().is_err());
        c.allow_large = true;
        assert!(c.validate().is_ok());
        c.repetitions = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn smallest_grid() {
        let config = BenchmarkConfig {
            n_values: vec![100],
            d_values: vec![8],
            repetitions: 1,
            ..BenchmarkConfig::default()
        };
        let report = run_grid(&config).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].dist_evals, Some(10_000));
        assert!(report.rows[1].dist_evals.unwrap() <= 10_000);
        assert!(report.rows.iter().all(|r| r.seconds.unwrap() > 0.0));
    }

    #[test]
    fn budget_marks_skipped() {
        let config = BenchmarkConfig {
            n_values: vec![200],
            d_values: vec![4],
            repetitions: 1,
            cell_time_budget: Some(Duration::ZERO),
            ..BenchmarkConfig::default()
        };
        let report = run_grid(&config).unwrap();
        assert!(report.rows.iter().all(BenchmarkRow::skipped));
        assert!(report.to_csv().contains("BF,200,4,20,skipped,,"));
    }
}
