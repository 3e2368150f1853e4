mod common;

use common::*;
use knn_core::bruteforce::BfConfig;
use knn_core::{
    bf_knn, knn_classify, retrieve_vote, DescriptorDatabase, LabeledSet, Metric, PointSet,
};
use rand::seq::SliceRandom;
use rand::Rng;

fn labeled(n: usize, d: usize, classes: i64, seed: u64) -> LabeledSet {
    let mut r = rng(seed);
    let points = uniform(n, d, &mut r);
    let labels = (0..n).map(|_| r.random_range(0..classes)).collect();
    LabeledSet::new(points, labels).unwrap()
}

#[test]
fn k1_label_is_nearest_neighbor_label() {
    for seed in 0..50u64 {
        let train = labeled(80, 4, 3, seed);
        let q = uniform(25, 4, &mut rng(seed + 500));
        let metric = metric_by_index(seed as usize, 4, &mut rng(seed));
        let labels = knn_classify(&train, &q, 1, &metric).unwrap();
        let nn = bf_knn(&q, train.points(), 1, &metric, &BfConfig::default()).unwrap();
        for (i, row) in nn.table.rows().enumerate() {
            assert_eq!(labels[i], train.labels()[row[0].index]);
        }
    }
}

/// Majority vote over neighbors ranked by squared Euclidean distance.
fn squared_rank_oracle(train: &LabeledSet, q: &PointSet, k: usize) -> Vec<i64> {
    q.rows()
        .map(|qi| {
            let mut all: Vec<(f64, usize)> = train
                .points()
                .rows()
                .enumerate()
                .map(|(j, p)| (qi.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum(), j))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let ones = all[..k]
                .iter()
                .filter(|(_, j)| train.labels()[*j] == 1)
                .count();
            i64::from(2 * ones > k)
        })
        .collect()
}

#[test]
fn decisions_survive_monotone_metric_transform() {
    // two classes and odd k, so no vote can tie
    for seed in 0..10u64 {
        let train = labeled(150, 3, 2, seed);
        let q = uniform(40, 3, &mut rng(seed + 77));
        for k in [1, 5, 11] {
            let ours = knn_classify(&train, &q, k, &Metric::Euclidean).unwrap();
            assert_eq!(
                ours,
                squared_rank_oracle(&train, &q, k),
                "seed {seed} k {k}"
            );
        }
    }
}

#[test]
fn retrieval_ranks_generating_image_first() {
    let (db, centers) = blob_database(5, 20, 16, 31);
    let q = PointSet::from_flat(gaussian(10, 16, &centers[3], 1.0, &mut rng(32)), 16).unwrap();
    let tally = retrieve_vote(&db, &q, 5, &Metric::Euclidean).unwrap();
    assert_eq!(tally.ranking[0], 3);
    assert_eq!(tally.scores.iter().sum::<u64>(), 50);
}

#[test]
fn vote_sum_and_saturation() {
    for seed in 0..20u64 {
        let mut r = rng(seed);
        let n = r.random_range(5..60);
        let images = r.random_range(1..n.min(6) + 1);
        let mut owner: Vec<usize> = (0..n)
            .map(|i| {
                if i < images {
                    i
                } else {
                    r.random_range(0..images)
                }
            })
            .collect();
        owner.shuffle(&mut r);
        let db = DescriptorDatabase::new(uniform(n, 3, &mut r), owner.clone(), images).unwrap();
        let q = uniform(r.random_range(1..15), 3, &mut r);
        let k = r.random_range(1..n + 1);
        let tally = retrieve_vote(&db, &q, k, &Metric::Manhattan).unwrap();
        assert_eq!(tally.scores.iter().sum::<u64>(), (q.len() * k) as u64);
        let mut sorted = tally.ranking.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..images).collect::<Vec<_>>());

        let full = retrieve_vote(&db, &q, n, &Metric::Manhattan).unwrap();
        for img in 0..images {
            let owned = owner.iter().filter(|&&o| o == img).count() as u64;
            assert_eq!(full.scores[img], owned * q.len() as u64);
        }
    }
}

#[test]
fn retrieval_ignores_descriptor_stacking_order() {
    let (db, centers) = blob_database(4, 15, 6, 40);
    let mut r = rng(41);
    let q = PointSet::from_flat(gaussian(12, 6, &centers[1], 3.0, &mut r), 6).unwrap();
    let base = retrieve_vote(&db, &q, 7, &Metric::Euclidean).unwrap();
    for _ in 0..10 {
        let mut perm: Vec<usize> = (0..db.descriptors().len()).collect();
        perm.shuffle(&mut r);
        let shuffled = DescriptorDatabase::new(
            db.descriptors().select(&perm).unwrap(),
            perm.iter().map(|&i| db.image_of()[i]).collect(),
            db.image_count(),
        )
        .unwrap();
        assert_eq!(
            retrieve_vote(&shuffled, &q, 7, &Metric::Euclidean).unwrap(),
            base
        );
    }
}
