use std::collections::BTreeMap;

use crate::bruteforce::{bf_knn, BfConfig};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::points::PointSet;

/// Training points with one opaque integer class token per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    points: PointSet,
    labels: Vec<i64>,
}

impl LabeledSet {
    pub fn new(points: PointSet, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        Ok(Self { points, labels })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }
}

pub fn knn_classify(
    train: &LabeledSet,
    queries: &PointSet,
    k: usize,
    metric: &Metric,
) -> Result<Vec<i64>> {
    knn_classify_with(train, queries, k, metric, &BfConfig::default())
}

/// Label with the most votes among the `k` nearest training points.
///
/// Vote ties go to the class whose tied members have the smallest summed
/// distance, then to the smallest label token.
pub fn knn_classify_with(
    train: &LabeledSet,
    queries: &PointSet,
    k: usize,
    metric: &Metric,
    search: &BfConfig,
) -> Result<Vec<i64>> {
    let out = bf_knn(queries, &train.points, k, metric, search)?;
    Ok(out
        .table
        .rows()
        .map(|row| {
            let mut votes: BTreeMap<i64, (usize, f64)> = BTreeMap::new();
            for nb in row {
                let e = votes.entry(train.labels[nb.index]).or_insert((0, 0.0));
                e.0 += 1;
                e.1 += nb.distance;
            }
            // BTreeMap iterates labels ascending, so the first strict winner
            // already respects the final tie rule
            let mut best: Option<(i64, usize, f64)> = None;
            for (&label, &(count, sum)) in &votes {
                let better = match best {
                    None => true,
                    Some((_, bc, bs)) => count > bc || (count == bc && sum < bs),
                };
                if better {
                    best = Some((label, count, sum));
                }
            }
            best.expect("k >= 1").0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: i64 = 0;
    const B: i64 = 1;

    fn set(rows: &[[f64; 2]], labels: &[i64]) -> LabeledSet {
        LabeledSet::new(PointSet::from_rows(rows).unwrap(), labels.to_vec()).unwrap()
    }

    fn q(x: f64, y: f64) -> PointSet {
        PointSet::from_rows(&[[x, y]]).unwrap()
    }

    #[test]
    fn nearest_label() {
        let t = set(&[[0.0, 0.0], [10.0, 10.0]], &[A, B]);
        assert_eq!(
            knn_classify(&t, &q(1.0, 1.0), 1, &Metric::Euclidean).unwrap(),
            vec![A]
        );
    }

    #[test]
    fn majority() {
        let t = set(&[[0.0, 0.0], [0.0, 1.0], [0.0, 9.0]], &[A, A, B]);
        assert_eq!(
            knn_classify(&t, &q(0.0, 0.4), 3, &Metric::Euclidean).unwrap(),
            vec![A]
        );
    }

    #[test]
    fn vote_tie_uses_summed_distance() {
        let t = set(&[[1.0, 0.0], [-2.0, 0.0]], &[A, B]);
        assert_eq!(
            knn_classify(&t, &q(0.0, 0.0), 2, &Metric::Euclidean).unwrap(),
            vec![A]
        );
        // B token is smaller but farther
        let t = set(&[[1.0, 0.0], [-2.0, 0.0]], &[7, 3]);
        assert_eq!(
            knn_classify(&t, &q(0.0, 0.0), 2, &Metric::Euclidean).unwrap(),
            vec![7]
        );
    }

    #[test]
    fn full_tie_uses_label_token() {
        let t = set(&[[1.0, 0.0], [-1.0, 0.0]], &[9, 4]);
        assert_eq!(
            knn_classify(&t, &q(0.0, 0.0), 2, &Metric::Euclidean).unwrap(),
            vec![4]
        );
    }

    #[test]
    fn errors() {
        let t = set(&[[0.0, 0.0]], &[A]);
        assert!(matches!(
            knn_classify(&t, &q(0.0, 0.0), 2, &Metric::Euclidean),
            Err(Error::KTooLarge { .. })
        ));
        let q1 = PointSet::from_rows(&[[0.0]]).unwrap();
        assert!(knn_classify(&t, &q1, 1, &Metric::Euclidean).is_err());
        assert!(LabeledSet::new(PointSet::from_rows(&[[0.0]]).unwrap(), vec![]).is_err());
    }
}
