//! Lloyd's k-means over explicit coordinates and, through the kernel
//! trick, over the feature space of a kernel matrix.
//!
//! Both variants run the same engine: k-means++ seeding, assignment ties to
//! the lowest cluster index, farthest-point repair of empty clusters and a
//! fixed restart schedule driven by one seeded stream. Only the distance
//! computation differs, so `kernel_kmeans(X·Xᵀ)` and `kmeans(X)` take the
//! same path for the same seed.

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{laplacian, WeightedGraph};
use crate::linalg::{spectral_embedding, KernelMatrix};
use crate::partition::Partition;

pub const MAX_ITERATIONS: usize = 300;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Clone, Debug)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Cluster means, `k × p`. Absent for the kernel variant.
    pub centers: Option<Array2<f64>>,
    /// Sum of squared distances to assigned means.
    pub within_energy: f64,
    pub restarts_used: usize,
    /// Lloyd iterations of the reported restart.
    pub iterations: usize,
    /// Energy after each iteration of the reported restart.
    pub energy_trace: Vec<f64>,
}

/// Distance oracle the Lloyd engine runs against.
trait FeatureSpace {
    fn len(&self) -> usize;
    fn point_distance_sq(&self, i: usize, j: usize) -> f64;
    /// `n × clusters.len()` squared distances from every point to every
    /// cluster mean. Clusters are never empty here.
    fn mean_distances_sq(&self, clusters: &[Vec<usize>]) -> Array2<f64>;
    /// Largest squared norm of a point.
    fn scale(&self) -> f64;
}

/// Distances or energies closer than this times the data scale count as
/// ties, resolved towards the lower index or the earlier restart. Keeps the
/// kernel and explicit variants on the same path through exact symmetries.
const TIE_TOLERANCE: f64 = 1e-12;

struct Explicit<'a> {
    points: ArrayView2<'a, f64>,
}

impl FeatureSpace for Explicit<'_> {
    fn len(&self) -> usize {
        self.points.nrows()
    }

    fn scale(&self) -> f64 {
        self.points.rows().into_iter().map(|r| r.dot(&r)).fold(0.0, f64::max)
    }

    fn point_distance_sq(&self, i: usize, j: usize) -> f64 {
        self.points
            .row(i)
            .iter()
            .zip(self.points.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn mean_distances_sq(&self, clusters: &[Vec<usize>]) -> Array2<f64> {
        let centers = explicit_means(self.points, clusters);
        let mut out = Array2::zeros((self.len(), clusters.len()));
        for (i, x) in self.points.rows().into_iter().enumerate() {
            for (c, center) in centers.rows().into_iter().enumerate() {
                out[[i, c]] = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            }
        }
        out
    }
}

fn explicit_means(points: ArrayView2<f64>, clusters: &[Vec<usize>]) -> Array2<f64> {
    let mut centers = Array2::zeros((clusters.len(), points.ncols()));
    for (c, members) in clusters.iter().enumerate() {
        let mut row = centers.row_mut(c);
        for &i in members {
            row += &points.row(i);
        }
        row /= members.len() as f64;
    }
    centers
}

struct Kernel<'a> {
    k: &'a KernelMatrix,
}

impl FeatureSpace for Kernel<'_> {
    fn len(&self) -> usize {
        self.k.order()
    }

    fn scale(&self) -> f64 {
        self.k.as_array().diag().iter().copied().fold(0.0, f64::max)
    }

    fn point_distance_sq(&self, i: usize, j: usize) -> f64 {
        (self.k.get(i, i) - 2.0 * self.k.get(i, j) + self.k.get(j, j)).max(0.0)
    }

    fn mean_distances_sq(&self, clusters: &[Vec<usize>]) -> Array2<f64> {
        let n = self.len();
        let km = self.k.as_array();
        let mut out = Array2::zeros((n, clusters.len()));
        for (c, members) in clusters.iter().enumerate() {
            let size = members.len() as f64;
            let mut self_term = 0.0;
            for &a in members {
                let row = km.row(a);
                self_term += members.iter().map(|&b| row[b]).sum::<f64>();
            }
            self_term /= size * size;
            for i in 0..n {
                let row = km.row(i);
                let cross = members.iter().map(|&a| row[a]).sum::<f64>() / size;
                out[[i, c]] = (row[i] - 2.0 * cross + self_term).max(0.0);
            }
        }
        out
    }
}

struct Run {
    assignment: Vec<usize>,
    energy: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn seed_plus_plus<S: FeatureSpace>(space: &S, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = space.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    let mut seeds = vec![first];
    chosen[first] = true;
    let mut nearest: Vec<f64> = (0..n).map(|i| space.point_distance_sq(i, first)).collect();
    while seeds.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    acc += d;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total implies a positive entry")
        } else {
            (0..n).find(|&i| !chosen[i]).expect("k <= n")
        };
        chosen[pick] = true;
        seeds.push(pick);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(space.point_distance_sq(i, pick));
        }
    }
    seeds
}

fn groups(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut g = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        g[c].push(i);
    }
    g
}

fn lloyd<S: FeatureSpace>(space: &S, seeds: &[usize]) -> Run {
    let n = space.len();
    let k = seeds.len();
    let mut clusters: Vec<Vec<usize>> = seeds.iter().map(|&s| vec![s]).collect();
    let mut dist = space.mean_distances_sq(&clusters);
    let mut assignment: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let tolerance = TIE_TOLERANCE * space.scale();

    while iterations < MAX_ITERATIONS {
        let mut next: Vec<usize> = (0..n)
            .map(|i| {
                let row = dist.row(i);
                let min = row.iter().copied().fold(f64::INFINITY, f64::min);
                row.iter().position(|&v| v <= min + tolerance).unwrap_or(0)
            })
            .collect();

        // Empty clusters seize the point farthest from its current mean.
        let mut sizes = vec![0usize; k];
        for &c in &next {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let mut far: Option<usize> = None;
            for i in 0..n {
                if sizes[next[i]] < 2 {
                    continue;
                }
                if far.is_none_or(|f| dist[[i, next[i]]] > dist[[f, next[f]]]) {
                    far = Some(i);
                }
            }
            let i = far.expect("k <= n leaves a cluster with two members");
            sizes[next[i]] -= 1;
            next[i] = empty;
            sizes[empty] = 1;
        }

        if next == assignment {
            break;
        }
        iterations += 1;
        assignment = next;
        clusters = groups(&assignment, k);
        dist = space.mean_distances_sq(&clusters);
        trace.push((0..n).map(|i| dist[[i, assignment[i]]]).sum());
    }

    Run {
        energy: *trace.last().unwrap_or(&0.0),
        assignment,
        iterations,
        trace,
    }
}

fn validate(n: usize, k: usize, restarts: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cluster count {k} outside 1..={n}"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    Ok(())
}

fn run_restarts<S: FeatureSpace>(space: &S, k: usize, seed: u64, restarts: usize) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tolerance = TIE_TOLERANCE * space.scale() * space.len() as f64;
    let mut best: Option<Run> = None;
    for _ in 0..restarts {
        let seeds = seed_plus_plus(space, k, &mut rng);
        let run = lloyd(space, &seeds);
        if best.as_ref().is_none_or(|b| run.energy < b.energy - tolerance) {
            best = Some(run);
        }
    }
    best.expect("restarts >= 1")
}

/// Lloyd's k-means on the rows of `points`.
pub fn kmeans(points: ArrayView2<f64>, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    validate(points.nrows(), k, restarts)?;
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let space = Explicit { points };
    let run = run_restarts(&space, k, seed, restarts);
    let centers = explicit_means(points, &groups(&run.assignment, k));
    Ok(KMeansResult {
        partition: tagged(&run.assignment, "kmeans", k, seed, restarts),
        centers: Some(centers),
        within_energy: run.energy,
        restarts_used: restarts,
        iterations: run.iterations,
        energy_trace: run.trace,
    })
}

/// k-means in the feature space of `kernel`, means held implicitly as
/// uniform weights over cluster members.
pub fn kernel_kmeans(kernel: &KernelMatrix, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    validate(kernel.order(), k, restarts)?;
    let space = Kernel { k: kernel };
    let run = run_restarts(&space, k, seed, restarts);
    let mut partition = tagged(&run.assignment, "kernel-kmeans", k, seed, restarts);
    if let Some(beta) = kernel.beta() {
        partition = partition.with_param("beta", beta);
    }
    Ok(KMeansResult {
        partition,
        centers: None,
        within_energy: run.energy,
        restarts_used: restarts,
        iterations: run.iterations,
        energy_trace: run.trace,
    })
}

fn tagged(assignment: &[usize], method: &str, k: usize, seed: u64, restarts: usize) -> Partition {
    Partition::from_raw(assignment, method)
        .with_param("k", k)
        .with_param("seed", seed)
        .with_param("restarts", restarts)
}

/// Laplacian → `p` smallest eigenvectors → k-means.
pub fn spectral_clustering(
    g: &WeightedGraph,
    p: usize,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult> {
    let embedding = spectral_embedding(&laplacian(g), p)?;
    let mut result = kmeans(embedding.view(), k, seed, restarts)?;
    result.partition.method = "spectral".into();
    result.partition = result.partition.with_param("p", p);
    Ok(result)
}

/// Squared feature-space distance from `φ(x_j)` to `Σ_i coeffs_i φ(x_i)`.
pub fn kernel_distance_sq(k: &KernelMatrix, j: usize, coeffs: &[f64]) -> Result<f64> {
    let n = k.order();
    if coeffs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: coeffs.len(),
        });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, order: n });
    }
    if coeffs.iter().any(|&c| c.is_nan() || c < 0.0) {
        return Err(Error::InvalidArgument("coefficients must be nonnegative".into()));
    }
    let sum: f64 = coeffs.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "coefficients sum to {sum}, expected 1"
        )));
    }
    let km = k.as_array();
    let support: Vec<usize> = (0..n).filter(|&i| coeffs[i] > 0.0).collect();
    let cross: f64 = support.iter().map(|&i| coeffs[i] * km[[i, j]]).sum();
    let quad: f64 = support
        .iter()
        .map(|&a| coeffs[a] * support.iter().map(|&b| coeffs[b] * km[[a, b]]).sum::<f64>())
        .sum();
    Ok((km[[j, j]] - 2.0 * cross + quad).max(0.0))
}
