use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

impl Neighbor {
    pub fn new(index: usize, distance: f64) -> Self {
        Self { index, distance }
    }

    /// Ascending distance, ties by ascending index.
    #[inline]
    pub fn cmp_rank(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

/// The k nearest references of every query, flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTable {
    k: usize,
    entries: Vec<Neighbor>,
}

impl NeighborTable {
    pub(crate) fn from_flat(k: usize, entries: Vec<Neighbor>) -> Self {
        debug_assert!(k > 0 && entries.len() % k == 0);
        Self { k, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Neighbor>>) -> Option<Self> {
        let k = rows.first()?.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return None;
        }
        Some(Self {
            k,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of queries.
    pub fn len(&self) -> usize {
        self.entries.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn row(&self, query: usize) -> &[Neighbor] {
        &self.entries[query * self.k..(query + 1) * self.k]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, Neighbor> {
        self.entries.chunks_exact(self.k)
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    /// Equality of indices and of distance bit patterns.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.index == b.index && a.distance.to_bits() == b.distance.to_bits())
    }

    /// First position where two tables disagree, for test diagnostics.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if self.k != other.k || self.len() != other.len() {
            return Some((0, 0));
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a.index != b.index || a.distance.to_bits() != b.distance.to_bits())
            .map(|p| (p / self.k, p % self.k))
    }
}

/// Result of a KNN search, with the number of point-to-point distance
/// evaluations when it was tracked.
#[derive(Debug, Clone)]
pub struct SearchOutput {
    pub table: NeighborTable,
    pub distance_evals: Option<u64>,
}
