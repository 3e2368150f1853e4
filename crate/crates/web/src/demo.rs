//! Plain-Rust logic behind the browser bindings, kept free of JS types so it
//! can be tested natively.

use knn_core::bruteforce::BfConfig;
use knn_core::entropy::{kl_entropy_with, EntropyOptions};
use knn_core::{bf_knn, EntropyVariant, KdTree, Metric, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn parse_metric(name: &str) -> Result<Metric, String> {
    match name {
        "euclidean" => Ok(Metric::Euclidean),
        "manhattan" => Ok(Metric::Manhattan),
        "chebyshev" => Ok(Metric::Chebyshev),
        // axes stretched 4:1, rotated 30 degrees
        "mahalanobis" => {
            let (c, s) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
            let (a, b) = (1.0, 16.0);
            let m = vec![
                a * c * c + b * s * s,
                (a - b) * c * s,
                (a - b) * c * s,
                a * s * s + b * c * c,
            ];
            Metric::mahalanobis(m, 2).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown metric {other:?}")),
    }
}

/// Points in the unit square: uniform, or four Gaussian clusters.
pub fn random_points(n: usize, seed: u64, clustered: bool) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [(0.25, 0.3), (0.7, 0.25), (0.6, 0.75), (0.2, 0.8)];
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        if clustered {
            let (cx, cy) = centers[i % centers.len()];
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zy: f64 = StandardNormal.sample(&mut rng);
            out.push((cx + 0.07 * zx).clamp(0.0, 1.0));
            out.push((cy + 0.07 * zy).clamp(0.0, 1.0));
        } else {
            out.push(rng.random::<f64>());
            out.push(rng.random::<f64>());
        }
    }
    out
}

/// Neighbors of one 2-d query as `[evals, index_0, dist_0, index_1, dist_1, ...]`.
pub fn neighbors(
    points: &[f64],
    query: [f64; 2],
    k: usize,
    metric: &str,
    kdtree: bool,
) -> Result<Vec<f64>, String> {
    let refs = PointSet::from_flat(points.to_vec(), 2).map_err(|e| e.to_string())?;
    let q = PointSet::from_flat(query.to_vec(), 2).map_err(|e| e.to_string())?;
    let metric = parse_metric(metric)?;
    let out = if kdtree {
        KdTree::build(refs, knn_core::kdtree::DEFAULT_LEAF_SIZE).and_then(|t| t.knn(&q, k, &metric))
    } else {
        bf_knn(&q, &refs, k, &metric, &BfConfig::counted())
    }
    .map_err(|e| e.to_string())?;
    let mut flat = vec![out.distance_evals.unwrap_or(0) as f64];
    for nb in out.table.row(0) {
        flat.push(nb.index as f64);
        flat.push(nb.distance);
    }
    Ok(flat)
}

/// Split segments of a kd-tree over 2-d points as `[depth, x0, y0, x1, y1, ...]`.
pub fn kdtree_splits(points: &[f64], leaf_size: usize) -> Result<Vec<f64>, String> {
    let refs = PointSet::from_flat(points.to_vec(), 2).map_err(|e| e.to_string())?;
    let tree = KdTree::build(refs, leaf_size).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (depth, dim, value, lo, hi) in tree.splits() {
        out.push(depth as f64);
        if dim == 0 {
            out.extend_from_slice(&[value, lo[1], value, hi[1]]);
        } else {
            out.extend_from_slice(&[lo[0], value, hi[0], value]);
        }
    }
    Ok(out)
}

/// Entropy estimates for growing sample sizes, as `[truth, est_0, est_1, ...]`.
///
/// `distribution` is `gaussian` (standard normal in `R^d`) or `uniform`
/// (unit hypercube); both have closed-form entropy.
pub fn entropy_curve(
    distribution: &str,
    d: usize,
    k: usize,
    variant: &str,
    sizes: &[usize],
    seed: u64,
) -> Result<Vec<f64>, String> {
    let variant: EntropyVariant = variant
        .parse()
        .map_err(|e: knn_core::Error| e.to_string())?;
    let truth = match distribution {
        "gaussian" => 0.5 * d as f64 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln(),
        "uniform" => 0.0,
        other => return Err(format!("unknown distribution {other:?}")),
    };
    let mut out = vec![truth];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in sizes {
        let data: Vec<f64> = (0..n * d)
            .map(|_| {
                if distribution == "gaussian" {
                    StandardNormal.sample(&mut rng)
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let y = PointSet::from_flat(data, d).map_err(|e| e.to_string())?;
        let opts = EntropyOptions {
            variant,
            ..EntropyOptions::default()
        };
        out.push(
            kl_entropy_with(&y, k, &opts)
                .map_err(|e| e.to_string())?
                .value_nats,
        );
    }
    Ok(out)
}
