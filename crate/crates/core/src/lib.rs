//! Clustering and drawing of weighted undirected graphs.
//!
//! Vertices are clustered through the graph Laplacian (spectral clustering),
//! through the heat kernel `e^{-βL}` (kernel k-means), or organized on a
//! rectangular map by a batch kernel self-organizing map. Partitions are
//! scored by q-modularity and drawn either as a summary graph of cluster
//! glyphs or as the whole graph constrained to the map cells.

pub mod clustering;
pub mod error;
pub mod graph;
pub mod layout;
pub mod linalg;
pub mod partition;
pub mod pipeline;
pub mod som;

pub use error::{Error, Result};
pub use graph::{laplacian, WeightedGraph};
pub use partition::Partition;
