//! k-means, spectral clustering, kernel k-means and partition quality.

mod kmeans;
mod quality;

pub use kmeans::{
    kernel_distance_sq, kernel_kmeans, kmeans, spectral_clustering, KMeansResult,
    DEFAULT_RESTARTS, MAX_ITERATIONS,
};
pub use quality::{partition_stats, q_modularity, q_modularity_unweighted, PartitionStats};
