mod common;

use common::*;
use knn_core::bruteforce::BfConfig;
use knn_core::entropy::{rho_k, rho_k_all};
use knn_core::{kl_entropy, EntropyVariant, PointSet};

fn gaussian_1d(n: usize, seed: u64) -> PointSet {
    PointSet::from_flat(gaussian(n, 1, &[0.0], 1.0, &mut rng(seed)), 1).unwrap()
}

const GAUSS_H: f64 = 1.418_938_533_204_672_7; // ½ ln(2πe)

#[test]
fn gaussian_closed_form_target() {
    let h = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    assert!((h - GAUSS_H).abs() < 1e-15);
}

#[test]
fn gaussian_one_dimension() {
    let y = gaussian_1d(10_000, 2024);
    let est = kl_entropy(&y, 5, EntropyVariant::Corrected).unwrap();
    println!("gaussian d=1 estimate {}", est.value_nats);
    assert!((est.value_nats - GAUSS_H).abs() <= 0.05);
}

#[test]
fn uniform_unit_square() {
    let y = uniform(10_000, 2, &mut rng(2025));
    let est = kl_entropy(&y, 5, EntropyVariant::Corrected).unwrap();
    println!("uniform [0,1]^2 estimate {}", est.value_nats);
    assert!(est.value_nats.abs() <= 0.05);
}

#[test]
fn literal_form_misses_gaussian_in_3d() {
    // H of a standard 3-d Gaussian is 3·½ln(2πe)
    let y = PointSet::from_flat(gaussian(4000, 3, &[0.0; 3], 1.0, &mut rng(5)), 3).unwrap();
    let corrected = kl_entropy(&y, 5, EntropyVariant::Corrected)
        .unwrap()
        .value_nats;
    let literal = kl_entropy(&y, 5, EntropyVariant::Literal)
        .unwrap()
        .value_nats;
    assert!((corrected - 3.0 * GAUSS_H).abs() < 0.1, "{corrected}");
    assert!((literal - 3.0 * GAUSS_H).abs() > 0.5, "{literal}");
}

#[test]
fn rho_matches_full_sort_oracle() {
    let y = uniform(100, 3, &mut rng(6));
    for k in [1, 4, 99] {
        let all = rho_k_all(&y, k, &BfConfig::default()).unwrap();
        for i in 0..100 {
            let mut d: Vec<f64> = (0..100)
                .filter(|&j| j != i)
                .map(|j| {
                    knn_core::distance(y.row(i), y.row(j), &knn_core::Metric::Euclidean).unwrap()
                })
                .collect();
            d.sort_by(f64::total_cmp);
            assert_eq!(all[i].to_bits(), d[k - 1].to_bits());
            assert_eq!(rho_k(&y, i, k).unwrap().to_bits(), d[k - 1].to_bits());
        }
    }
}

#[test]
fn translation_invariance() {
    let y = uniform(300, 3, &mut rng(7));
    let shift = [3.7, -12.25, 0.001];
    let moved = y.map(|c, v| v + shift[c]).unwrap();
    for variant in [EntropyVariant::Corrected, EntropyVariant::Literal] {
        let a = kl_entropy(&y, 4, variant).unwrap().value_nats;
        let b = kl_entropy(&moved, 4, variant).unwrap().value_nats;
        assert!((a - b).abs() <= 1e-9, "{variant}: {a} vs {b}");
    }
}

#[test]
fn scaling_covariance() {
    let y = PointSet::from_flat(gaussian(500, 4, &[1.0; 4], 2.0, &mut rng(8)), 4).unwrap();
    let base = kl_entropy(&y, 3, EntropyVariant::Corrected)
        .unwrap()
        .value_nats;
    for a in [0.5, 3.0, 17.0] {
        let scaled = y.map(|_, v| a * v).unwrap();
        let got = kl_entropy(&scaled, 3, EntropyVariant::Corrected)
            .unwrap()
            .value_nats;
        assert!((got - base - 4.0 * f64::ln(a)).abs() <= 1e-9, "a={a}");
    }
}

#[test]
fn error_shrinks_with_sample_size() {
    let mut better = 0;
    for seed in 0..20u64 {
        let small =
            kl_entropy(&gaussian_1d(100, 1000 + seed), 5, EntropyVariant::Corrected).unwrap();
        let large = kl_entropy(
            &gaussian_1d(10_000, 1000 + seed),
            5,
            EntropyVariant::Corrected,
        )
        .unwrap();
        if (large.value_nats - GAUSS_H).abs() < (small.value_nats - GAUSS_H).abs() {
            better += 1;
        }
    }
    assert!(better > 10, "only {better}/20 seeds improved");
}
