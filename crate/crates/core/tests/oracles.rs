//! Fixed cases checked against independent brute-force or explicit-coordinate oracles.

mod common;

use common::{explicit_energy, two_cliques};
use graphsom::clustering::{kernel_kmeans, kmeans};
use graphsom::graph::connected_components;
use graphsom::laplacian;
use graphsom::linalg::{heat_kernel, kernel_feature_coordinates, KernelMatrix};
use graphsom::som::{batch_kernel_som, batch_som, u_matrix, SomData, SomGrid, SomOptions, SomSchedule};
use graphsom::Partition;
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn blobs(centers: &[[f64; 2]], per_blob: usize, sigma: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    let n = centers.len() * per_blob;
    let mut points = Array2::zeros((n, 2));
    let mut truth = Vec::with_capacity(n);
    for (b, c) in centers.iter().enumerate() {
        for i in 0..per_blob {
            let row = b * per_blob + i;
            points[[row, 0]] = c[0] + noise.sample(&mut rng);
            points[[row, 1]] = c[1] + noise.sample(&mut rng);
            truth.push(b);
        }
    }
    (points, truth)
}

/// Minimum k-means energy over all k^n labelings, via Σ||x||² − Σ_c ||S_c||²/n_c.
fn exhaustive_min_energy(points: &Array2<f64>, k: usize) -> f64 {
    let n = points.nrows();
    let total_sq: f64 = points.iter().map(|v| v * v).sum();
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    loop {
        let mut sx = vec![0.0; k];
        let mut sy = vec![0.0; k];
        let mut cnt = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            sx[c] += points[[i, 0]];
            sy[c] += points[[i, 1]];
            cnt[c] += 1;
        }
        let mut explained = 0.0;
        for c in 0..k {
            if cnt[c] > 0 {
                explained += (sx[c] * sx[c] + sy[c] * sy[c]) / cnt[c] as f64;
            }
        }
        best = best.min(total_sq - explained);
        // next labeling in base k
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

#[test]
fn kmeans_matches_exhaustive_enumeration_on_four_blobs() {
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
    let (points, truth) = blobs(&corners, 3, 0.1, 2024);
    let result = kmeans(points.view(), 4, 7, 10).unwrap();
    assert!(result.partition.same_grouping(&Partition::from_raw(&truth, "truth")));
    let oracle = exhaustive_min_energy(&points, 4);
    assert!(
        (result.within_energy - oracle).abs() <= 1e-9 * oracle.max(1.0),
        "kmeans {} vs exhaustive {}",
        result.within_energy,
        oracle
    );
    assert!((explicit_energy(&points, result.partition.assignment()) - oracle).abs() < 1e-9);
}

#[test]
fn heat_kernel_kmeans_recovers_cliques_like_explicit_coordinates() {
    let g = two_cliques(10);
    let kernel = heat_kernel(&laplacian(&g), 0.05).unwrap();
    let components = connected_components(&g);
    let implicit = kernel_kmeans(&kernel, 2, 3, 10).unwrap();
    assert!(implicit.partition.same_grouping(&components));

    let coords = kernel_feature_coordinates(&kernel).unwrap();
    let explicit = kmeans(coords.view(), 2, 3, 10).unwrap();
    assert_eq!(explicit.partition.assignment(), implicit.partition.assignment());
    assert!((explicit.within_energy - implicit.within_energy).abs() < 1e-6);
}

fn clique_som_options() -> SomOptions {
    let schedule = SomSchedule {
        epochs: 100,
        sigma_start: 1.0,
        sigma_end: 0.1,
    };
    SomOptions::new(schedule, 5)
}

#[test]
fn kernel_som_on_cliques_matches_explicit_batch_som() {
    let g = two_cliques(10);
    let kernel = heat_kernel(&laplacian(&g), 0.05).unwrap();
    let grid = SomGrid::new(1, 2).unwrap();
    let options = clique_som_options();
    let model = batch_kernel_som(&kernel, grid, &options).unwrap();
    let p = Partition::from_raw(&model.assignment, "som");
    assert!(p.same_grouping(&connected_components(&g)));

    let coords = kernel_feature_coordinates(&kernel).unwrap();
    let explicit = batch_som(coords.view(), grid, &options).unwrap();
    assert_eq!(explicit.assignment, model.assignment);
    for (a, b) in model.energy_trace.iter().zip(&explicit.energy_trace) {
        assert!((a - b).abs() < 1e-6);
    }

    // With a final radius of 0.1 the cross-unit neighborhood weight is e^-50.
    for m in 0..2 {
        let outside: f64 = (0..20)
            .filter(|&i| model.assignment[i] != m)
            .map(|i| model.gamma[[m, i]])
            .sum();
        assert!(outside < 1e-15, "unit {m} keeps {outside} on the other clique");
    }
}

#[test]
fn umatrix_matches_explicit_prototype_distance() {
    let g = two_cliques(10);
    let kernel = heat_kernel(&laplacian(&g), 0.05).unwrap();
    let grid = SomGrid::new(1, 2).unwrap();
    let model = batch_kernel_som(&kernel, grid, &clique_som_options()).unwrap();
    let um = u_matrix(&model, SomData::Kernel(&kernel)).unwrap();

    let coords = kernel_feature_coordinates(&kernel).unwrap();
    let w0: Array1<f64> = model.gamma.row(0).dot(&coords);
    let w1: Array1<f64> = model.gamma.row(1).dot(&coords);
    let oracle = (&w0 - &w1).mapv(|v| v * v).sum().sqrt();
    assert!(oracle > 0.0);
    for v in &um.values {
        assert!((v - oracle).abs() < 1e-6, "u-matrix {v} vs explicit {oracle}");
    }
}

/// Batch-SOM distortion at radius `sigma` when blob b sits on unit order[b],
/// prototypes set by one batch update.
fn distortion(points: &Array2<f64>, blob_of: &[usize], order: &[usize], sigma: f64) -> f64 {
    let units = order.len();
    let h = |a: usize, b: usize| (-((a as f64 - b as f64).powi(2)) / (2.0 * sigma * sigma)).exp();
    let unit_of: Vec<usize> = blob_of.iter().map(|&b| order[b]).collect();
    let mut energy = 0.0;
    for m in 0..units {
        let weights: Vec<f64> = unit_of.iter().map(|&u| h(u, m)).collect();
        let mass: f64 = weights.iter().sum();
        let mut proto = [0.0; 2];
        for (i, w) in weights.iter().enumerate() {
            proto[0] += w * points[[i, 0]] / mass;
            proto[1] += w * points[[i, 1]] / mass;
        }
        for (i, w) in weights.iter().enumerate() {
            energy += w * ((points[[i, 0]] - proto[0]).powi(2) + (points[[i, 1]] - proto[1]).powi(2));
        }
    }
    energy
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[test]
fn line_of_blobs_maps_in_grid_order() {
    let centers = [[0.0, 0.0], [5.0, 0.5], [10.0, 0.0]];
    let (points, truth) = blobs(&centers, 6, 0.3, 31);
    let grid = SomGrid::new(1, 3).unwrap();
    let sigma_end = 0.3;
    let schedule = SomSchedule {
        epochs: 60,
        sigma_start: 1.5,
        sigma_end,
    };
    let model = batch_som(points.view(), grid, &SomOptions::new(schedule, 8)).unwrap();
    let learned: Vec<usize> = (0..3).map(|b| model.assignment[b * 6]).collect();
    for (i, &b) in truth.iter().enumerate() {
        assert_eq!(model.assignment[i], learned[b], "blob {b} split across units");
    }

    let scores: Vec<(Vec<usize>, f64)> = permutations(3)
        .into_iter()
        .map(|order| {
            let e = distortion(&points, &truth, &order, sigma_end);
            (order, e)
        })
        .collect();
    let best = scores.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let optimal: Vec<&Vec<usize>> = scores.iter().filter(|s| s.1 <= best * (1.0 + 1e-9)).map(|s| &s.0).collect();
    assert!(optimal.iter().all(|o| **o == [0, 1, 2] || **o == [2, 1, 0]));
    assert!(learned == [0, 1, 2] || learned == [2, 1, 0], "learned order {learned:?}");
}

#[test]
fn explicit_gram_oracle_equivalence_small() {
    let points = common::random_points(12, 3, 77);
    let kernel = KernelMatrix::gram(points.view()).unwrap();
    let a = kmeans(points.view(), 3, 1, 10).unwrap();
    let b = kernel_kmeans(&kernel, 3, 1, 10).unwrap();
    assert_eq!(a.partition.assignment(), b.partition.assignment());
    assert!((a.within_energy - explicit_energy(&points, a.partition.assignment())).abs() < 1e-9);
}
