#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use graphsom::WeightedGraph;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Each pair joined with probability `density`, weight uniform in [0.1, 2).
pub fn random_graph(n: usize, density: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                edges.push((i, j, rng.random_range(0.1..2.0)));
            }
        }
    }
    WeightedGraph::from_edges(labels(n), edges).unwrap()
}

/// Random graph plus a weighted path through all vertices.
pub fn random_connected_graph(n: usize, density: f64, seed: u64) -> WeightedGraph {
    let base = random_graph(n, density, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    let mut edges: Vec<_> = base.edges().collect();
    edges.extend((1..n).map(|i| (i - 1, i, rng.random_range(0.1..2.0))));
    WeightedGraph::from_edges(labels(n), edges).unwrap()
}

/// `m` distinct unit-weight edges drawn uniformly.
pub fn sparse_random_graph(n: usize, m: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < m {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            seen.insert((a.min(b), a.max(b)));
        }
    }
    WeightedGraph::from_edges(labels(n), seen.into_iter().map(|(a, b)| (a, b, 1.0))).unwrap()
}

pub fn unit_graph(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::from_edges(labels(n), edges.iter().map(|&(a, b)| (a, b, 1.0))).unwrap()
}

/// Two disjoint unit-weight complete graphs on `size` vertices each.
pub fn two_cliques(size: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for base in [0, size] {
        for i in 0..size {
            for j in i + 1..size {
                edges.push((base + i, base + j));
            }
        }
    }
    unit_graph(2 * size, &edges)
}

pub fn random_points(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((n, d), || rng.random_range(-1.0..1.0))
}

/// Σ_{k ≤ terms} (−βL)^k / k!, straight from the definition.
pub fn power_series(l: &Array2<f64>, beta: f64, terms: usize) -> Array2<f64> {
    let n = l.nrows();
    let step = l.mapv(|v| -beta * v);
    let mut term = Array2::<f64>::eye(n);
    let mut sum = term.clone();
    for k in 1..=terms {
        term = term.dot(&step) / k as f64;
        sum += &term;
    }
    sum
}

/// Σ_i ||x_i − mean of its cluster||², computed from explicit coordinates.
pub fn explicit_energy(points: &Array2<f64>, assignment: &[usize]) -> f64 {
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let d = points.ncols();
    let mut sums = Array2::<f64>::zeros((k, d));
    let mut counts = vec![0usize; k];
    for (i, &c) in assignment.iter().enumerate() {
        counts[c] += 1;
        let row = points.row(i).to_owned();
        let mut s = sums.row_mut(c);
        s += &row;
    }
    let mut energy = 0.0;
    for (i, &c) in assignment.iter().enumerate() {
        for j in 0..d {
            let mean = sums[[c, j]] / counts[c] as f64;
            energy += (points[[i, j]] - mean).powi(2);
        }
    }
    energy
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn write_edge_list(g: &WeightedGraph, path: &Path) {
    let mut text = String::from("# generated\n");
    for (i, j, w) in g.edges() {
        let _ = writeln!(text, "{}\t{}\t{}", g.label(i), g.label(j), w);
    }
    std::fs::write(path, text).unwrap();
}
