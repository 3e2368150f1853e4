//! k-nearest-neighbor estimate of differential entropy.
//!
//! For a sample `y_1..y_n` in `R^d` with `ρ_k(y_i)` the Euclidean distance
//! from `y_i` to its k-th nearest other sample, the estimator averages
//!
//! ```text
//! corrected:  ln(n-1) + d·ln ρ_k(y_i) + ln c1(d) - Ψ(k)
//! literal:    ln((n-1)·ρ_k(y_i))      + ln c1(d) - Ψ(k)
//! ```
//!
//! over all points, in nats. `corrected` is the Kozachenko–Leonenko form
//! generalized to the k-th neighbor; `literal` drops the dimension exponent
//! on `ρ_k`. Both agree when `d = 1`. The target quantity is the Shannon
//! differential entropy `H(X) = -∫ p(x) ln p(x) dx`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bruteforce::{bf_knn, BfConfig};
use crate::error::{Error, Result};
use crate::metric::{Kernel, Metric};
use crate::neighbors::Neighbor;
use crate::points::PointSet;
use crate::select::select_into;
use crate::special::{digamma, ln_unit_ball_volume};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyVariant {
    #[default]
    Corrected,
    Literal,
}

impl fmt::Display for EntropyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyVariant::Corrected => "corrected",
            EntropyVariant::Literal => "literal",
        })
    }
}

impl FromStr for EntropyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(EntropyVariant::Corrected),
            "literal" => Ok(EntropyVariant::Literal),
            other => Err(Error::InvalidArgument(format!(
                "unknown entropy variant {other:?} (expected corrected or literal)"
            ))),
        }
    }
}

/// What to do when some `ρ_k` is zero because of coincident samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DuplicatePolicy {
    #[default]
    Error,
    /// Add uniform noise of magnitude `1e-12 × spread` drawn from a seeded
    /// generator, where spread is the largest per-coordinate range.
    Jitter { seed: u64 },
}

#[derive(Debug, Clone, Default)]
pub struct EntropyOptions {
    pub variant: EntropyVariant,
    pub duplicates: DuplicatePolicy,
    pub keep_terms: bool,
    pub search: BfConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value_nats: f64,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub variant: EntropyVariant,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_point_terms: Option<Vec<f64>>,
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k >= n {
        return Err(Error::KTooLarge {
            k,
            available: n - 1,
        });
    }
    Ok(())
}

/// Euclidean distance from `y_i` to its k-th nearest neighbor among the
/// other points. Self is excluded by index, so a coincident copy of `y_i`
/// counts as a neighbor at distance 0.
pub fn rho_k(points: &PointSet, i: usize, k: usize) -> Result<f64> {
    check_order(points.len(), k)?;
    if i >= points.len() {
        return Err(Error::InvalidArgument(format!(
            "point index {i} out of range for {} points",
            points.len()
        )));
    }
    let yi = points.row(i);
    let mut others: Vec<Neighbor> = points
        .rows()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, yj)| Neighbor::new(j, Kernel::Euclidean.eval(yi, yj)))
        .collect();
    let mut out = vec![Neighbor::default(); k];
    select_into(&mut others, &mut out);
    Ok(out[k - 1].distance)
}

/// `ρ_k` of every point, via one brute-force self-join with `k + 1`
/// neighbors.
pub fn rho_k_all(points: &PointSet, k: usize, search: &BfConfig) -> Result<Vec<f64>> {
    check_order(points.len(), k)?;
    let out = bf_knn(points, points, k + 1, &Metric::Euclidean, search)?;
    Ok(out
        .table
        .rows()
        .enumerate()
        .map(|(i, row)| {
            // self sits in the first k+1 unless k+1 copies with lower index
            // precede it, in which case the k-th entry is already 0
            row.iter()
                .filter(|nb| nb.index != i)
                .nth(k - 1)
                .map_or(0.0, |nb| nb.distance)
        })
        .collect())
}

pub fn kl_entropy(points: &PointSet, k: usize, variant: EntropyVariant) -> Result<EntropyEstimate> {
    kl_entropy_with(
        points,
        k,
        &EntropyOptions {
            variant,
            ..EntropyOptions::default()
        },
    )
}

pub fn kl_entropy_with(
    points: &PointSet,
    k: usize,
    opts: &EntropyOptions,
) -> Result<EntropyEstimate> {
    let n = points.len();
    let d = points.dim();
    check_order(n, k)?;

    let mut rho = rho_k_all(points, k, &opts.search)?;
    if let DuplicatePolicy::Jitter { seed } = opts.duplicates {
        if rho.iter().any(|&r| r == 0.0) {
            let jittered = jitter(points, seed)?;
            rho = rho_k_all(&jittered, k, &opts.search)?;
        }
    }
    let zeros: Vec<usize> = rho
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r == 0.0)
        .map(|(i, _)| i)
        .collect();
    if !zeros.is_empty() {
        return Err(Error::DuplicatePoints { indices: zeros });
    }

    let ln_n1 = ((n - 1) as f64).ln();
    let constant = ln_unit_ball_volume(d)? - digamma(k as f64)?;
    let terms: Vec<f64> = rho
        .iter()
        .map(|&r| match opts.variant {
            EntropyVariant::Corrected => ln_n1 + d as f64 * r.ln() + constant,
            EntropyVariant::Literal => ((n - 1) as f64 * r).ln() + constant,
        })
        .collect();
    let value_nats = terms.iter().sum::<f64>() / n as f64;

    Ok(EntropyEstimate {
        value_nats,
        n,
        k,
        d,
        variant: opts.variant,
        per_point_terms: opts.keep_terms.then_some(terms),
    })
}

fn jitter(points: &PointSet, seed: u64) -> Result<PointSet> {
    let d = points.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in points.rows() {
        for (c, &v) in row.iter().enumerate() {
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
        }
    }
    let spread = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| h - l)
        .fold(0.0_f64, f64::max);
    // all points coincide: fall back to the coordinate scale
    let scale = if spread > 0.0 {
        spread
    } else {
        points
            .as_slice()
            .iter()
            .fold(1.0_f64, |a, v| a.max(v.abs()))
    };
    let magnitude = 1e-12 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points.map(|_, v| v + rng.random_range(-magnitude..magnitude))
}
