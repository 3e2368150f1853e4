//! KNN-driven application layers: majority-vote classification and
//! descriptor-voting image retrieval.

mod classify;
mod retrieval;

pub use classify::{knn_classify, knn_classify_with, LabeledSet};
pub use retrieval::{retrieve_vote, retrieve_vote_with, DescriptorDatabase, VoteTally};
