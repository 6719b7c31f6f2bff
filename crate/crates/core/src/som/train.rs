//! Batch self-organizing maps.
//!
//! Prototypes are always held as convex weights `γ` over the input vertices.
//! In the kernel variant they are never materialized: distances go through
//! the kernel matrix. The Euclidean variant materializes `γ·X` and doubles
//! as the explicit-coordinate check for the kernel one.

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::grid::SomGrid;
use super::umatrix::SomData;
use crate::error::{Error, Result};
use crate::graph::{laplacian, SymmetricMatrix, WeightedGraph};
use crate::linalg::{dominant_eigenpairs, spectral_embedding, KernelMatrix};

pub const DEFAULT_EPOCHS: usize = 100;

/// Below this an update denominator counts as zero and the row is kept.
const DEGENERATE_MASS: f64 = 1e-300;

/// Subspace-iteration cap for the principal-plane initialization.
const PRINCIPAL_ITERATIONS: usize = 500;

/// Epoch count and linearly decreasing Gaussian neighborhood radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SomSchedule {
    pub epochs: usize,
    pub sigma_start: f64,
    pub sigma_end: f64,
}

impl SomSchedule {
    /// Radius from half the longer grid side down to 0.5 over 100 epochs.
    pub fn default_for(grid: &SomGrid) -> Self {
        SomSchedule {
            epochs: DEFAULT_EPOCHS,
            sigma_start: (grid.rows().max(grid.cols()) as f64 / 2.0).max(0.5),
            sigma_end: 0.5,
        }
    }

    /// Constant radius.
    pub fn frozen(epochs: usize, sigma: f64) -> Self {
        SomSchedule {
            epochs,
            sigma_start: sigma,
            sigma_end: sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if !(self.sigma_end > 0.0 && self.sigma_start >= self.sigma_end && self.sigma_start.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "radius schedule needs start >= end > 0, got ({}, {})",
                self.sigma_start, self.sigma_end
            )));
        }
        Ok(())
    }

    pub fn sigma(&self, epoch: usize) -> f64 {
        if self.epochs == 1 {
            return self.sigma_end;
        }
        let t = epoch as f64 / (self.epochs - 1) as f64;
        self.sigma_start + t * (self.sigma_end - self.sigma_start)
    }
}

/// Trained map.
#[derive(Clone, Debug)]
pub struct SomModel {
    pub grid: SomGrid,
    /// `units × n`, each row nonnegative and summing to 1.
    pub gamma: Array2<f64>,
    /// Best-matching unit of each vertex under the final `gamma`.
    pub assignment: Vec<usize>,
    /// Extended distortion after each epoch's update.
    pub energy_trace: Vec<f64>,
    pub schedule: SomSchedule,
    pub seed: u64,
}

impl SomModel {
    pub fn vertices(&self) -> usize {
        self.gamma.ncols()
    }

    /// Vertex count per unit.
    pub fn unit_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.grid.units()];
        for &m in &self.assignment {
            sizes[m] += 1;
        }
        sizes
    }
}

/// Squared distances between data and prototypes given by convex weights.
pub(crate) trait PrototypeSpace {
    fn len(&self) -> usize;
    /// `n × units` squared distances from each point to each prototype.
    fn distances_sq(&self, gamma: &Array2<f64>) -> Array2<f64>;
    /// `units × units` symmetric prototype-to-prototype distances (not squared).
    fn prototype_distances(&self, gamma: &Array2<f64>) -> Array2<f64>;
    /// Inner products between data points.
    fn gram(&self) -> Array2<f64>;
    /// Largest squared norm of a data point.
    fn scale(&self) -> f64;
}

pub(crate) struct KernelSpace<'a>(pub &'a KernelMatrix);

impl PrototypeSpace for KernelSpace<'_> {
    fn len(&self) -> usize {
        self.0.order()
    }

    fn gram(&self) -> Array2<f64> {
        self.0.as_array().clone()
    }

    fn scale(&self) -> f64 {
        self.0.as_array().diag().iter().copied().fold(0.0, f64::max)
    }

    fn distances_sq(&self, gamma: &Array2<f64>) -> Array2<f64> {
        let k = self.0.as_array();
        let kg = k.dot(&gamma.t());
        let units = gamma.nrows();
        let self_terms: Vec<f64> = (0..units).map(|m| gamma.row(m).dot(&kg.column(m))).collect();
        Array2::from_shape_fn((self.len(), units), |(i, m)| {
            (k[[i, i]] - 2.0 * kg[[i, m]] + self_terms[m]).max(0.0)
        })
    }

    fn prototype_distances(&self, gamma: &Array2<f64>) -> Array2<f64> {
        let g = gamma.dot(&self.0.as_array().dot(&gamma.t()));
        let units = gamma.nrows();
        Array2::from_shape_fn((units, units), |(a, b)| {
            if a == b {
                return 0.0;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let cross = 0.5 * (g[[lo, hi]] + g[[hi, lo]]);
            (g[[lo, lo]] - 2.0 * cross + g[[hi, hi]]).max(0.0).sqrt()
        })
    }
}

pub(crate) struct PointSpace<'a>(pub ArrayView2<'a, f64>);

impl PrototypeSpace for PointSpace<'_> {
    fn len(&self) -> usize {
        self.0.nrows()
    }

    fn gram(&self) -> Array2<f64> {
        // Same construction as `KernelMatrix::gram`, so both variants start
        // from bit-identical principal axes.
        let g = self.0.dot(&self.0.t());
        SymmetricMatrix::symmetrized(&g).expect("square").into_inner()
    }

    fn scale(&self) -> f64 {
        self.0.rows().into_iter().map(|r| r.dot(&r)).fold(0.0, f64::max)
    }

    fn distances_sq(&self, gamma: &Array2<f64>) -> Array2<f64> {
        let protos = gamma.dot(&self.0);
        Array2::from_shape_fn((self.len(), gamma.nrows()), |(i, m)| {
            self.0
                .row(i)
                .iter()
                .zip(protos.row(m))
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        })
    }

    fn prototype_distances(&self, gamma: &Array2<f64>) -> Array2<f64> {
        let protos = gamma.dot(&self.0);
        let units = gamma.nrows();
        Array2::from_shape_fn((units, units), |(a, b)| {
            let (lo, hi) = (a.min(b), a.max(b));
            protos
                .row(lo)
                .iter()
                .zip(protos.row(hi))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
    }
}

/// Symmetric Dirichlet(1) rows: normalized Exp(1) draws, row-major.
pub fn random_gamma(units: usize, n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma = Array2::from_shape_simple_fn((units, n), || {
        let x: f64 = Exp1.sample(&mut rng);
        x
    });
    for mut row in gamma.rows_mut() {
        let s = row.sum();
        row /= s;
    }
    gamma
}

/// Ties within `TIE_TOLERANCE` times the data scale go to the lowest unit,
/// so that rounding cannot split exactly symmetric configurations
/// differently in the kernel and explicit variants.
const TIE_TOLERANCE: f64 = 1e-12;

fn nearest_units(dist: &Array2<f64>, tolerance: f64) -> Vec<usize> {
    dist.rows()
        .into_iter()
        .map(|row| {
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            row.iter().position(|&v| v <= min + tolerance).unwrap_or(0)
        })
        .collect()
}

/// Unit minimizing the neighborhood-smoothed distortion `Σ_m h(c, m)·d(i, m)`.
///
/// With a fixed radius this choice together with the batch update never
/// increases the recorded energy.
fn smoothed_units(dist: &Array2<f64>, h: &Array2<f64>, tolerance: f64) -> Vec<usize> {
    let smoothed = dist.dot(h);
    let mass = h.rows().into_iter().map(|r| r.sum()).fold(0.0, f64::max);
    nearest_units(&smoothed, tolerance * mass)
}

fn neighborhood(grid: &SomGrid, sigma: f64) -> Array2<f64> {
    let units = grid.units();
    Array2::from_shape_fn((units, units), |(a, b)| {
        let d = grid.distance(a, b);
        (-d * d / (2.0 * sigma * sigma)).exp()
    })
}

/// How the first prototypes are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum SomInit {
    /// Vertices binned on the plane of the two leading principal axes of the
    /// centered Gram matrix, one grid axis per principal axis; the first
    /// prototypes are the batch update of that assignment. Seed-independent.
    PrincipalPlane,
    /// Each `γ` row drawn from a seeded symmetric Dirichlet(1).
    Dirichlet,
    /// Caller-supplied `units × n` convex weights.
    Gamma(Array2<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SomOptions {
    pub schedule: SomSchedule,
    pub init: SomInit,
    pub seed: u64,
}

impl SomOptions {
    pub fn new(schedule: SomSchedule, seed: u64) -> Self {
        SomOptions {
            schedule,
            init: SomInit::PrincipalPlane,
            seed,
        }
    }

    pub fn default_for(grid: &SomGrid, seed: u64) -> Self {
        SomOptions::new(SomSchedule::default_for(grid), seed)
    }

    pub fn with_init(mut self, init: SomInit) -> Self {
        self.init = init;
        self
    }
}

/// Per-epoch view handed to a training observer.
pub struct EpochState<'a> {
    pub epoch: usize,
    pub sigma: f64,
    pub gamma: &'a Array2<f64>,
    /// Units chosen for this epoch's update.
    pub bmu: &'a [usize],
    pub energy: f64,
}

/// Equal-width bins of the leading principal scores, mapped to units.
fn principal_plane_assignment(gram: &Array2<f64>, grid: &SomGrid) -> Result<Vec<usize>> {
    let n = gram.nrows();
    let row_means: Vec<f64> = gram.rows().into_iter().map(|r| r.sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let centered = SymmetricMatrix::from_fn(n, |i, j| {
        gram[[i, j]] - row_means[i] - row_means[j] + grand
    });
    let (values, vectors) = dominant_eigenpairs(&centered, 2.min(n), PRINCIPAL_ITERATIONS)?;
    let scores = |rank: usize| -> Vec<f64> {
        if rank >= values.len() {
            return vec![0.0; n];
        }
        let scale = values[rank].max(0.0).sqrt();
        vectors.column(rank).iter().map(|v| v * scale).collect()
    };
    let bins = |values: &[f64], count: usize| -> Vec<usize> {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        values
            .iter()
            .map(|&v| {
                if hi - lo <= 0.0 || count == 1 {
                    0
                } else {
                    (((v - lo) / (hi - lo) * count as f64) as usize).min(count - 1)
                }
            })
            .collect()
    };
    let (long, short) = (scores(0), scores(1));
    let (col_bins, row_bins) = if grid.cols() >= grid.rows() {
        (bins(&long, grid.cols()), bins(&short, grid.rows()))
    } else {
        (bins(&short, grid.cols()), bins(&long, grid.rows()))
    };
    Ok((0..n).map(|i| grid.unit_at(row_bins[i], col_bins[i])).collect())
}

/// Batch update: `γ_{m,i} = h(bmu_i, m) / Σ_j h(bmu_j, m)`; rows with no
/// mass are left as they are.
fn update_gamma(gamma: &mut Array2<f64>, bmu: &[usize], h: &Array2<f64>) {
    for m in 0..gamma.nrows() {
        let mass: f64 = bmu.iter().map(|&b| h[[b, m]]).sum();
        if mass < DEGENERATE_MASS {
            continue;
        }
        for (i, &b) in bmu.iter().enumerate() {
            gamma[[m, i]] = h[[b, m]] / mass;
        }
    }
}

fn initial_gamma<S: PrototypeSpace>(
    space: &S,
    grid: &SomGrid,
    options: &SomOptions,
) -> Result<Array2<f64>> {
    let (units, n) = (grid.units(), space.len());
    match &options.init {
        SomInit::Dirichlet => Ok(random_gamma(units, n, options.seed)),
        SomInit::Gamma(g) => {
            if g.dim() != (units, n) {
                return Err(Error::DimensionMismatch {
                    expected: units * n,
                    got: g.len(),
                });
            }
            check_convex(g)?;
            Ok(g.clone())
        }
        SomInit::PrincipalPlane => {
            let bmu = principal_plane_assignment(&space.gram(), grid)?;
            let mut gamma = Array2::from_elem((units, n), 1.0 / n as f64);
            update_gamma(
                &mut gamma,
                &bmu,
                &neighborhood(grid, options.schedule.sigma(0)),
            );
            Ok(gamma)
        }
    }
}

fn train<S: PrototypeSpace>(
    space: &S,
    grid: SomGrid,
    options: &SomOptions,
    mut observer: impl FnMut(&EpochState<'_>),
) -> Result<SomModel> {
    let schedule = options.schedule;
    schedule.validate()?;
    let units = grid.units();
    let mut gamma = initial_gamma(space, &grid, options)?;

    let tolerance = TIE_TOLERANCE * space.scale();
    let mut dist = space.distances_sq(&gamma);
    let mut energy_trace = Vec::with_capacity(schedule.epochs);
    for epoch in 0..schedule.epochs {
        let sigma = schedule.sigma(epoch);
        let h = neighborhood(&grid, sigma);
        let bmu = smoothed_units(&dist, &h, tolerance);
        update_gamma(&mut gamma, &bmu, &h);
        dist = space.distances_sq(&gamma);
        let energy = bmu
            .iter()
            .enumerate()
            .map(|(i, &b)| (0..units).map(|m| h[[b, m]] * dist[[i, m]]).sum::<f64>())
            .sum();
        energy_trace.push(energy);
        observer(&EpochState {
            epoch,
            sigma,
            gamma: &gamma,
            bmu: &bmu,
            energy,
        });
    }

    Ok(SomModel {
        grid,
        assignment: nearest_units(&dist, tolerance),
        gamma,
        energy_trace,
        schedule,
        seed: options.seed,
    })
}

/// Batch SOM in the feature space of `kernel`.
pub fn batch_kernel_som(kernel: &KernelMatrix, grid: SomGrid, options: &SomOptions) -> Result<SomModel> {
    train(&KernelSpace(kernel), grid, options, |_| {})
}

/// Euclidean batch SOM on the rows of `points`.
pub fn batch_som(points: ArrayView2<f64>, grid: SomGrid, options: &SomOptions) -> Result<SomModel> {
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    train(&PointSpace(points), grid, options, |_| {})
}

/// Either variant, calling `observer` after every epoch.
pub fn train_observed(
    data: SomData<'_>,
    grid: SomGrid,
    options: &SomOptions,
    observer: impl FnMut(&EpochState<'_>),
) -> Result<SomModel> {
    match data {
        SomData::Kernel(k) => train(&KernelSpace(k), grid, options, observer),
        SomData::Points(p) => {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            train(&PointSpace(p), grid, options, observer)
        }
    }
}

/// Batch SOM on the `p` smallest Laplacian eigenvectors.
pub fn spectral_som(g: &WeightedGraph, p: usize, grid: SomGrid, options: &SomOptions) -> Result<SomModel> {
    let embedding = spectral_embedding(&laplacian(g), p)?;
    batch_som(embedding.view(), grid, options)
}

fn check_convex(gamma: &Array2<f64>) -> Result<()> {
    for row in gamma.rows() {
        if row.iter().any(|&v| v.is_nan() || v < 0.0) || (row.sum() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(
                "initial gamma rows must be convex weights".into(),
            ));
        }
    }
    Ok(())
}
