use ndarray::{Array2, ArrayView2, Axis};

use super::eigen::{eigendecompose_symmetric, EigenDecomposition};
use crate::error::{Error, Result};
use crate::graph::SymmetricMatrix;

/// Heat-kernel diffusion time used when none is given.
pub const DEFAULT_BETA: f64 = 0.05;

/// Relative tolerance for positive semi-definiteness.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Symmetric positive semi-definite matrix of vertex similarities.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    entries: SymmetricMatrix,
    beta: Option<f64>,
}

impl KernelMatrix {
    /// Wraps a square matrix, accepting asymmetry up to 1e-12 and storing
    /// the symmetrized version. Positive semi-definiteness is not checked
    /// here; see [`KernelMatrix::check_psd`].
    pub fn new(m: Array2<f64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, got: c });
        }
        if r == 0 {
            return Err(Error::InvalidArgument("empty kernel matrix".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if (m[[i, j]] - m[[j, i]]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "kernel matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(KernelMatrix {
            entries: SymmetricMatrix::symmetrized(&m)?,
            beta: None,
        })
    }

    /// Gram matrix `X·Xᵀ` of explicit points (rows of `points`).
    pub fn gram(points: ArrayView2<f64>) -> Result<Self> {
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        KernelMatrix::new(points.dot(&points.t()))
    }

    pub fn order(&self) -> usize {
        self.entries.order()
    }

    /// Diffusion time when the kernel came from [`heat_kernel`].
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn as_array(&self) -> &Array2<f64> {
        self.entries.as_array()
    }

    pub fn as_symmetric(&self) -> &SymmetricMatrix {
        &self.entries
    }

    /// Eigendecomposes and fails unless `λ_min ≥ -1e-8 · λ_max`.
    pub fn check_psd(&self) -> Result<EigenDecomposition> {
        let eig = eigendecompose_symmetric(&self.entries)?;
        let ev = eig.eigenvalues();
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if min < -PSD_TOLERANCE * max.max(0.0) {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: min,
                max_eigenvalue: max,
            });
        }
        Ok(eig)
    }
}

/// Diffusion kernel `e^{-βL}` of a graph Laplacian.
pub fn heat_kernel(l: &SymmetricMatrix, beta: f64) -> Result<KernelMatrix> {
    check_beta(beta)?;
    let eig = eigendecompose_symmetric(l)?;
    heat_kernel_from(&eig, beta)
}

/// Heat kernel from an existing eigendecomposition of the Laplacian.
pub fn heat_kernel_from(eig: &EigenDecomposition, beta: f64) -> Result<KernelMatrix> {
    check_beta(beta)?;
    Ok(KernelMatrix {
        entries: eig.spectral_map(|lambda| (-beta * lambda).exp()),
        beta: Some(beta),
    })
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beta must be a nonnegative finite number, got {beta}"
        )));
    }
    Ok(())
}

/// Explicit feature coordinates `X = V·diag(√max(λ, 0))` with `X·Xᵀ ≈ K`.
pub fn kernel_feature_coordinates(k: &KernelMatrix) -> Result<Array2<f64>> {
    let eig = k.check_psd()?;
    let roots = eig.eigenvalues().mapv(|l| l.max(0.0).sqrt());
    Ok(eig.eigenvectors() * &roots.view().insert_axis(Axis(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::laplacian;

    fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Σ_{k≤terms} (-βL)^k / k!
    fn power_series(l: &SymmetricMatrix, beta: f64, terms: usize) -> Array2<f64> {
        let n = l.order();
        let step = l.as_array() * -beta;
        let mut term = Array2::<f64>::eye(n);
        let mut sum = term.clone();
        for k in 1..=terms {
            term = term.dot(&step) / k as f64;
            sum += &term;
        }
        sum
    }

    #[test]
    fn beta_zero_is_identity() {
        let k = heat_kernel(&laplacian(&triangle()), 0.0).unwrap();
        assert!(max_abs_diff(k.as_array(), &Array2::eye(3)) <= 1e-12);
    }

    #[test]
    fn p2_closed_form() {
        let l = laplacian(&unit_graph(2, &[(0, 1)]));
        let k = heat_kernel(&l, 0.5).unwrap();
        let e = (-1.0_f64).exp();
        assert!((k.get(0, 0) - (1.0 + e) / 2.0).abs() < 1e-10);
        assert!((k.get(0, 1) - (1.0 - e) / 2.0).abs() < 1e-10);
        // power-series oracle agrees with the closed form
        let series = power_series(&l, 0.5, 30);
        assert!((series[[0, 0]] - 0.683_939_7).abs() < 1e-7);
        assert!((series[[0, 1]] - 0.316_060_3).abs() < 1e-7);
        assert_eq!(k.beta(), Some(0.5));
    }

    #[test]
    fn block_diagonal_stays_block_diagonal() {
        let g = two_cliques(4);
        let k = heat_kernel(&laplacian(&g), 0.3).unwrap();
        for i in 0..4 {
            for j in 4..8 {
                assert!(k.get(i, j).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let g = unit_graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]);
        let k = heat_kernel(&laplacian(&g), 0.7).unwrap();
        for row in k.as_array().rows() {
            assert!((row.sum() - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn negative_beta_rejected() {
        assert!(heat_kernel(&laplacian(&triangle()), -0.1).is_err());
        assert!(heat_kernel(&laplacian(&triangle()), f64::NAN).is_err());
    }

    #[test]
    fn feature_coordinates_of_identity() {
        let k = KernelMatrix::new(Array2::eye(4)).unwrap();
        let x = kernel_feature_coordinates(&k).unwrap();
        assert!(max_abs_diff(&x.dot(&x.t()), &Array2::eye(4)) <= 1e-12);
        assert!(max_abs_diff(&x.t().dot(&x), &Array2::eye(4)) <= 1e-12);
    }

    #[test]
    fn feature_coordinates_reproduce_triangle_kernel() {
        let k = heat_kernel(&laplacian(&triangle()), 0.05).unwrap();
        let x = kernel_feature_coordinates(&k).unwrap();
        assert!(max_abs_diff(&x.dot(&x.t()), k.as_array()) <= 1e-8);
    }

    #[test]
    fn rank_one_kernel_has_one_column() {
        let n = 5;
        let k = KernelMatrix::new(Array2::from_elem((n, n), 1.0 / n as f64)).unwrap();
        let x = kernel_feature_coordinates(&k).unwrap();
        let nonzero = x
            .columns()
            .into_iter()
            .filter(|c| c.iter().any(|v| v.abs() > 1e-7))
            .count();
        assert_eq!(nonzero, 1);
        assert!(max_abs_diff(&x.dot(&x.t()), k.as_array()) <= 1e-8);
    }

    #[test]
    fn indefinite_kernel_rejected() {
        let k = KernelMatrix::new(ndarray::array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(
            kernel_feature_coordinates(&k),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
    }

    #[test]
    fn asymmetric_kernel_rejected() {
        assert!(KernelMatrix::new(ndarray::array![[1.0, 0.5], [0.4, 1.0]]).is_err());
    }
}
