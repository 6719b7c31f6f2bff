//! Batch kernel SOM, spectral SOM and U-matrices.

mod grid;
mod train;
mod umatrix;

pub use grid::SomGrid;
pub use train::{
    batch_kernel_som, batch_som, random_gamma, spectral_som, train_observed, EpochState, SomInit,
    SomModel, SomOptions, SomSchedule, DEFAULT_EPOCHS,
};
pub use umatrix::{u_matrix, Raster, SomData, UMatrix};

use crate::partition::Partition;

/// Partition induced by a trained map.
#[derive(Clone, Debug, PartialEq)]
pub struct SomPartition {
    pub partition: Partition,
    /// Source unit of each cluster.
    pub units: Vec<usize>,
}

/// Nonempty units become clusters, numbered in row-major grid order.
pub fn som_partition(model: &SomModel) -> SomPartition {
    let partition = Partition::from_raw(&model.assignment, "som")
        .with_param("grid", format!("{}x{}", model.grid.rows(), model.grid.cols()))
        .with_param("seed", model.seed);
    let units = model
        .unit_sizes()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .map(|(m, _)| m)
        .collect();
    SomPartition { partition, units }
}
