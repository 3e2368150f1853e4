//! Majority-vote accuracy against k on two overlapping classes with 20%
//! of the training labels flipped. Larger k averages out the flipped
//! labels; very large k starts to blur the class boundary.
//!
//!     cargo run --release -p knn-core --example label_noise

use knn_core::{knn_classify, LabeledSet, Metric, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample(n: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<i64>) {
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let class = rng.random_range(0..2i64);
        let cx = if class == 0 { -1.0 } else { 1.0 };
        data.push(cx + rng.random_range(-1.5..1.5));
        data.push(rng.random_range(-1.5..1.5));
        labels.push(class);
    }
    (data, labels)
}

fn main() -> Result<(), knn_core::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (train_x, mut train_y) = sample(2000, &mut rng);
    for y in &mut train_y {
        if rng.random::<f64>() < 0.2 {
            *y = 1 - *y;
        }
    }
    let (test_x, test_y) = sample(1000, &mut rng);
    let train = LabeledSet::new(PointSet::from_flat(train_x, 2)?, train_y)?;
    let test = PointSet::from_flat(test_x, 2)?;

    println!("k,accuracy");
    for k in [1, 3, 5, 9, 15, 25, 51, 101, 301] {
        let predicted = knn_classify(&train, &test, k, &Metric::Euclidean)?;
        let correct = predicted
            .iter()
            .zip(&test_y)
            .filter(|(p, t)| p == t)
            .count();
        println!("{k},{:.3}", correct as f64 / test_y.len() as f64);
    }
    Ok(())
}
