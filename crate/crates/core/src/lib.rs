//! Exact k-nearest-neighbor search.
//!
//! The core engine is an exhaustive, data-parallel search ([`bf_knn`]): every
//! query computes its distance row against the reference set and keeps the
//! k smallest entries. A kd-tree ([`KdTree`]) provides an exact
//! space-partitioning baseline. On top of the search sit a k-NN entropy
//! estimator, a majority-vote classifier, descriptor-voting retrieval and a
//! benchmark grid.
//!
//! Neighbor lists are ordered by ascending distance with ties broken by
//! ascending reference index, so every search path produces bitwise
//! identical tables.

pub mod applications;
pub mod bench;
pub mod bruteforce;
pub mod entropy;
pub mod error;
pub mod io;
pub mod kdtree;
pub mod metric;
pub mod neighbors;
pub mod points;
pub mod select;
pub mod special;

pub use applications::{knn_classify, retrieve_vote, DescriptorDatabase, LabeledSet, VoteTally};
pub use bench::{
    fit_dimension_slope, generate_uniform, run_grid, BenchmarkConfig, BenchmarkReport, Method,
};
pub use bruteforce::{bf_cost_model, bf_knn, BfConfig, CostModel};
pub use entropy::{
    kl_entropy, kl_entropy_with, rho_k, DuplicatePolicy, EntropyEstimate, EntropyOptions,
    EntropyVariant,
};
pub use error::{Error, Result};
pub use kdtree::{build_kdtree, kdtree_knn, kdtree_stats, KdTree, KdTreeStats};
pub use metric::{distance, pairwise_distances, DistanceMatrix, Mahalanobis, Metric, MetricKind};
pub use neighbors::{Neighbor, NeighborTable, SearchOutput};
pub use points::PointSet;
pub use select::select_k_smallest;
pub use special::{digamma, unit_ball_volume};
