#![allow(dead_code)]

use knn_core::{distance, Mahalanobis, Metric, Neighbor, NeighborTable, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(n: usize, d: usize, rng: &mut ChaCha8Rng) -> PointSet {
    PointSet::from_flat((0..n * d).map(|_| rng.random::<f64>()).collect(), d).unwrap()
}

/// Coordinates on a coarse grid so that equal distances are common.
pub fn gridded(n: usize, d: usize, rng: &mut ChaCha8Rng) -> PointSet {
    PointSet::from_flat(
        (0..n * d).map(|_| rng.random_range(0..4) as f64).collect(),
        d,
    )
    .unwrap()
}

pub fn gaussian(n: usize, d: usize, center: &[f64], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n * d)
        .map(|i| {
            let z: f64 = StandardNormal.sample(rng);
            center[i % d] + sigma * z
        })
        .collect()
}

/// Two well-separated unit-variance blobs, half the points each.
pub fn two_blobs(n: usize, d: usize, rng: &mut ChaCha8Rng) -> PointSet {
    let mut data = gaussian(n / 2, d, &vec![0.0; d], 1.0, rng);
    data.extend(gaussian(n - n / 2, d, &vec![12.0; d], 1.0, rng));
    PointSet::from_flat(data, d).unwrap()
}

/// `A Aᵀ + d·I` for a random `A`.
pub fn random_spd(d: usize, rng: &mut ChaCha8Rng) -> Metric {
    let a: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for p in 0..d {
                s += a[i * d + p] * a[j * d + p];
            }
            m[i * d + j] = s;
        }
        m[i * d + i] += d as f64;
    }
    // force exact symmetry
    for i in 0..d {
        for j in 0..i {
            m[j * d + i] = m[i * d + j];
        }
    }
    Metric::Mahalanobis(Mahalanobis::new(m, d).unwrap())
}

pub fn metric_by_index(i: usize, d: usize, rng: &mut ChaCha8Rng) -> Metric {
    match i % 4 {
        0 => Metric::Euclidean,
        1 => Metric::Manhattan,
        2 => Metric::Chebyshev,
        _ => random_spd(d, rng),
    }
}

/// Naive double loop over `distance()` with a full sort of every row.
pub fn naive_knn(q: &PointSet, r: &PointSet, k: usize, metric: &Metric) -> NeighborTable {
    let rows = q
        .rows()
        .map(|qi| {
            let mut all: Vec<Neighbor> = r
                .rows()
                .enumerate()
                .map(|(j, rj)| Neighbor::new(j, distance(qi, rj, metric).unwrap()))
                .collect();
            all.sort_by(|a, b| {
                a.distance
                    .partial_cmp(&b.distance)
                    .unwrap()
                    .then(a.index.cmp(&b.index))
            });
            all.truncate(k);
            all
        })
        .collect();
    NeighborTable::from_rows(rows).unwrap()
}

/// `images` Gaussian blobs (unit variance) around centers drawn uniformly
/// from `[-50, 50]^d`, `per_image` descriptors each. Returns the database
/// and the blob centers.
pub fn blob_database(
    images: usize,
    per_image: usize,
    d: usize,
    seed: u64,
) -> (knn_core::DescriptorDatabase, Vec<Vec<f64>>) {
    let mut r = rng(seed);
    let centers: Vec<Vec<f64>> = (0..images)
        .map(|_| (0..d).map(|_| r.random_range(-50.0..50.0)).collect())
        .collect();
    let mut data = Vec::new();
    let mut owner = Vec::new();
    for (img, c) in centers.iter().enumerate() {
        data.extend(gaussian(per_image, d, c, 1.0, &mut r));
        owner.extend(std::iter::repeat_n(img, per_image));
    }
    let db =
        knn_core::DescriptorDatabase::new(PointSet::from_flat(data, d).unwrap(), owner, images)
            .unwrap();
    (db, centers)
}
