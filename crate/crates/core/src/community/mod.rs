//! Graph partitioning: Louvain modularity optimization and the K-means
//! ablation clusterer.

mod kmeans;
mod louvain;
mod modularity;
mod partition;

pub use kmeans::{kmeans, KMeans, KMeansResult, DEFAULT_MAX_ITERS};
pub use louvain::{louvain, Louvain, LouvainResult, DEFAULT_MIN_GAIN};
pub use modularity::{modularity, modularity_with_resolution};
pub use partition::{Partition, UNASSIGNED_LABEL};
