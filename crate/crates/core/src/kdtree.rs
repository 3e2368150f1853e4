//! Exact KNN over a kd-tree.
//!
//! Internal nodes split at the median of the coordinate with the widest
//! spread. Every node keeps the tight bounding box of its points; a subtree
//! is skipped when the box is strictly farther than the current k-th best,
//! which keeps results identical to brute force, tie order included.

use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{Kernel, Metric};
use crate::neighbors::{Neighbor, NeighborTable, SearchOutput};
use crate::points::PointSet;
use crate::select::check_k;

pub const DEFAULT_LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
enum NodeKind {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    kind: NodeKind,
    depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdTree {
    points: PointSet,
    leaf_size: usize,
    nodes: Vec<Node>,
    // per node: d lower bounds then d upper bounds
    bounds: Vec<f64>,
    // leaf buckets are ranges of this permutation
    order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdTreeStats {
    pub node_count: usize,
    pub leaf_count: usize,
    pub depth: usize,
    pub mean_leaf_occupancy: f64,
}

pub fn build_kdtree(references: &PointSet, leaf_size: usize) -> Result<KdTree> {
    KdTree::build(references.clone(), leaf_size)
}

pub fn kdtree_knn(
    tree: &KdTree,
    queries: &PointSet,
    k: usize,
    metric: &Metric,
) -> Result<SearchOutput> {
    tree.knn(queries, k, metric)
}

pub fn kdtree_stats(tree: &KdTree) -> KdTreeStats {
    tree.stats()
}

impl KdTree {
    pub fn build(points: PointSet, leaf_size: usize) -> Result<Self> {
        if leaf_size == 0 {
            return Err(Error::InvalidArgument(
                "leaf_size must be at least 1".into(),
            ));
        }
        // PointSet guarantees n >= 1
        let mut tree = KdTree {
            leaf_size,
            nodes: Vec::new(),
            bounds: Vec::new(),
            order: (0..points.len()).collect(),
            points,
        };
        tree.build_node(0, tree.points.len(), 0);
        Ok(tree)
    }

    fn build_node(&mut self, start: usize, end: usize, depth: usize) -> usize {
        let d = self.points.dim();
        let id = self.nodes.len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &self.order[start..end] {
            for (c, &v) in self.points.row(i).iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        self.bounds.extend_from_slice(&lo);
        self.bounds.extend_from_slice(&hi);
        self.nodes.push(Node {
            kind: NodeKind::Leaf { start, end },
            depth,
        });
        if end - start <= self.leaf_size {
            return id;
        }

        // widest spread, lowest dimension on ties
        let mut dim = 0;
        for c in 1..d {
            if hi[c] - lo[c] > hi[dim] - lo[dim] {
                dim = c;
            }
        }
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.row(a)[dim]
                .total_cmp(&points.row(b)[dim])
                .then(a.cmp(&b))
        });
        let value = self.points.row(self.order[mid])[dim];

        let left = self.build_node(start, mid, depth + 1);
        let right = self.build_node(mid, end, depth + 1);
        self.nodes[id].kind = NodeKind::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn stats(&self) -> KdTreeStats {
        let mut leaves = 0;
        let mut depth = 0;
        for node in &self.nodes {
            depth = depth.max(node.depth);
            if matches!(node.kind, NodeKind::Leaf { .. }) {
                leaves += 1;
            }
        }
        KdTreeStats {
            node_count: self.nodes.len(),
            leaf_count: leaves,
            depth,
            mean_leaf_occupancy: self.points.len() as f64 / leaves as f64,
        }
    }

    /// Reference indices of every leaf bucket, in tree order.
    pub fn leaf_buckets(&self) -> Vec<&[usize]> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Leaf { start, end } => Some(&self.order[start..end]),
                NodeKind::Split { .. } => None,
            })
            .collect()
    }

    /// `(depth, split dimension, split value, box lower, box upper)` for each
    /// internal node, in pre-order.
    pub fn splits(&self) -> Vec<(usize, usize, f64, &[f64], &[f64])> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(id, n)| match n.kind {
                NodeKind::Split { dim, value, .. } => {
                    let (lo, hi) = self.node_box(id);
                    Some((n.depth, dim, value, lo, hi))
                }
                NodeKind::Leaf { .. } => None,
            })
            .collect()
    }

    /// Checks the partition and split-side invariants.
    pub fn validate(&self) -> bool {
        let mut seen = vec![false; self.points.len()];
        for bucket in self.leaf_buckets() {
            for &i in bucket {
                if std::mem::replace(&mut seen[i], true) {
                    return false;
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
        self.nodes.iter().all(|n| match n.kind {
            NodeKind::Leaf { .. } => true,
            NodeKind::Split {
                dim,
                value,
                left,
                right,
            } => {
                self.subtree_indices(left)
                    .all(|i| self.points.row(i)[dim] <= value)
                    && self
                        .subtree_indices(right)
                        .all(|i| self.points.row(i)[dim] >= value)
            }
        })
    }

    fn subtree_indices(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let (start, end) = self.span(node);
        self.order[start..end].iter().copied()
    }

    fn span(&self, node: usize) -> (usize, usize) {
        match self.nodes[node].kind {
            NodeKind::Leaf { start, end } => (start, end),
            NodeKind::Split { left, right, .. } => (self.span(left).0, self.span(right).1),
        }
    }

    #[inline]
    fn node_box(&self, node: usize) -> (&[f64], &[f64]) {
        let d = self.points.dim();
        let b = &self.bounds[node * 2 * d..(node + 1) * 2 * d];
        b.split_at(d)
    }

    pub fn knn(&self, queries: &PointSet, k: usize, metric: &Metric) -> Result<SearchOutput> {
        let kernel = match metric {
            Metric::Mahalanobis(_) => {
                return Err(Error::UnsupportedMetric(
                    "kd-tree search needs an axis-aligned metric; use bf_knn for mahalanobis"
                        .into(),
                ))
            }
            m => m.kernel(),
        };
        queries.check_same_dim(&self.points)?;
        check_k(k, self.points.len())?;

        let mut entries = vec![Neighbor::default(); queries.len() * k];
        let evals: u64 = entries
            .par_chunks_mut(k)
            .enumerate()
            .map(|(i, out)| {
                let mut search = Search {
                    tree: self,
                    kernel,
                    query: queries.row(i),
                    k,
                    heap: BinaryHeap::with_capacity(k + 1),
                    evals: 0,
                };
                search.visit(0);
                let found = search.heap.into_sorted_vec();
                for (slot, item) in out.iter_mut().zip(found) {
                    *slot = item.0;
                }
                search.evals
            })
            .sum();

        Ok(SearchOutput {
            table: NeighborTable::from_flat(k, entries),
            distance_evals: Some(evals),
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Ranked(Neighbor);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp_rank(&other.0)
    }
}

struct Search<'a> {
    tree: &'a KdTree,
    kernel: Kernel,
    query: &'a [f64],
    k: usize,
    // max-heap: root is the current k-th best
    heap: BinaryHeap<Ranked>,
    evals: u64,
}

impl Search<'_> {
    #[inline]
    fn bound(&self, node: usize) -> f64 {
        let (lo, hi) = self.tree.node_box(node);
        self.kernel.box_bound(self.query, lo, hi)
    }

    #[inline]
    fn pruned(&self, bound: f64) -> bool {
        self.heap.len() == self.k
            && bound > self.heap.peek().map_or(f64::INFINITY, |w| w.0.distance)
    }

    fn visit(&mut self, node: usize) {
        if self.pruned(self.bound(node)) {
            return;
        }
        self.descend(node);
    }

    fn descend(&mut self, node: usize) {
        match self.tree.nodes[node].kind {
            NodeKind::Leaf { start, end } => {
                for &j in &self.tree.order[start..end] {
                    let dist = self.kernel.eval(self.query, self.tree.points.row(j));
                    self.evals += 1;
                    let cand = Ranked(Neighbor::new(j, dist));
                    if self.heap.len() < self.k {
                        self.heap.push(cand);
                    } else if cand < *self.heap.peek().expect("heap is full") {
                        self.heap.pop();
                        self.heap.push(cand);
                    }
                }
            }
            NodeKind::Split { left, right, .. } => {
                let bl = self.bound(left);
                let br = self.bound(right);
                let (near, near_b, far, far_b) = if br < bl {
                    (right, br, left, bl)
                } else {
                    (left, bl, right, br)
                };
                if !self.pruned(near_b) {
                    self.descend(near);
                }
                if !self.pruned(far_b) {
                    self.descend(far);
                }
            }
        }
    }
}
