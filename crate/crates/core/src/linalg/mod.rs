//! Dense symmetric eigensolver, spectral embeddings and the heat kernel.

mod eigen;
mod kernel;

pub use eigen::{
    dominant_eigenpairs, eigendecompose_symmetric, embedding_from, spectral_embedding, EigenDecomposition, MAX_SWEEPS,
    RELATIVE_TOLERANCE,
};
pub use kernel::{
    heat_kernel, heat_kernel_from, kernel_feature_coordinates, KernelMatrix, DEFAULT_BETA,
    PSD_TOLERANCE,
};
