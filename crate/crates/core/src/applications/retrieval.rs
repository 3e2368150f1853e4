use serde::Serialize;

use crate::bruteforce::{bf_knn, BfConfig};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::points::PointSet;

/// Descriptors of every database image stacked into one point set, with the
/// owning image of each row.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorDatabase {
    descriptors: PointSet,
    image_of: Vec<usize>,
    image_count: usize,
}

impl DescriptorDatabase {
    /// Every image id in `0..image_count` must own at least one row.
    pub fn new(descriptors: PointSet, image_of: Vec<usize>, image_count: usize) -> Result<Self> {
        if image_of.len() != descriptors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} image ids for {} descriptors",
                image_of.len(),
                descriptors.len()
            )));
        }
        let mut owned = vec![false; image_count];
        for &img in &image_of {
            match owned.get_mut(img) {
                Some(slot) => *slot = true,
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "image id {img} outside 0..{image_count}"
                    )))
                }
            }
        }
        if let Some(missing) = owned.iter().position(|&o| !o) {
            return Err(Error::InvalidArgument(format!(
                "image {missing} has no descriptors"
            )));
        }
        Ok(Self {
            descriptors,
            image_of,
            image_count,
        })
    }

    /// Builds the database with `image_count` = largest id + 1.
    pub fn from_ids(descriptors: PointSet, image_of: Vec<usize>) -> Result<Self> {
        let count = image_of.iter().max().map_or(0, |m| m + 1);
        Self::new(descriptors, image_of, count)
    }

    pub fn descriptors(&self) -> &PointSet {
        &self.descriptors
    }

    pub fn image_of(&self) -> &[usize] {
        &self.image_of
    }

    pub fn image_count(&self) -> usize {
        self.image_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VoteTally {
    /// Votes per image id.
    pub scores: Vec<u64>,
    /// Image ids by descending score, ties by ascending id.
    pub ranking: Vec<usize>,
}

pub fn retrieve_vote(
    db: &DescriptorDatabase,
    query_descriptors: &PointSet,
    k: usize,
    metric: &Metric,
) -> Result<VoteTally> {
    retrieve_vote_with(db, query_descriptors, k, metric, &BfConfig::default())
}

/// Each query descriptor's `k` nearest database descriptors vote once for
/// their owning image.
pub fn retrieve_vote_with(
    db: &DescriptorDatabase,
    query_descriptors: &PointSet,
    k: usize,
    metric: &Metric,
    search: &BfConfig,
) -> Result<VoteTally> {
    let out = bf_knn(query_descriptors, &db.descriptors, k, metric, search)?;
    let mut scores = vec![0u64; db.image_count];
    for nb in out.table.entries() {
        scores[db.image_of[nb.index]] += 1;
    }
    let mut ranking: Vec<usize> = (0..db.image_count).collect();
    ranking.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    Ok(VoteTally { scores, ranking })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_images() {
        let db = DescriptorDatabase::new(
            PointSet::from_rows(&[[0.0, 0.0], [5.0, 5.0]]).unwrap(),
            vec![0, 1],
            2,
        )
        .unwrap();
        let q = PointSet::from_rows(&[[0.1, 0.0]]).unwrap();
        let t = retrieve_vote(&db, &q, 1, &Metric::Euclidean).unwrap();
        assert_eq!(t.ranking, vec![0, 1]);
        assert_eq!(t.scores, vec![1, 0]);
    }

    #[test]
    fn saturation_counts_descriptors() {
        let db = DescriptorDatabase::from_ids(
            PointSet::from_flat(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap(),
            vec![2, 0, 2, 1, 2, 0],
        )
        .unwrap();
        let q = PointSet::from_flat(vec![0.5], 1).unwrap();
        let t = retrieve_vote(&db, &q, 6, &Metric::Manhattan).unwrap();
        assert_eq!(t.scores, vec![2, 1, 3]);
        assert_eq!(t.ranking, vec![2, 0, 1]);
    }

    #[test]
    fn invalid_databases() {
        let p = PointSet::from_flat(vec![0.0, 1.0], 1).unwrap();
        assert!(DescriptorDatabase::new(p.clone(), vec![0], 1).is_err());
        assert!(DescriptorDatabase::new(p.clone(), vec![0, 2], 3).is_err());
        assert!(DescriptorDatabase::new(p, vec![0, 5], 2).is_err());
    }
}
