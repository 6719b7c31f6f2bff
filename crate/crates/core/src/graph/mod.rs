//! Weighted undirected graphs, their Laplacian, and connectivity.
//!
//! Weights are stored densely (the target scale is a few hundred to a few
//! thousand vertices) with adjacency lists kept alongside for traversal and
//! layout.

mod io;
pub(crate) mod summary;

use std::collections::HashMap;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::partition::Partition;

pub use io::{load_edge_list, load_edge_list_path, LoadOptions, SelfLoopPolicy};
pub use summary::{summary_graph, ClusterSummaryGraph, SummaryEdge, SummaryNode};

/// Square matrix that is symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix(Array2<f64>);

impl SymmetricMatrix {
    /// Fills the upper triangle from `f` and mirrors it.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Array2::zeros((order, order));
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        SymmetricMatrix(m)
    }

    /// Accepts `m` only if it is square and exactly symmetric.
    pub fn try_from_array(m: Array2<f64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, got: c });
        }
        for i in 0..r {
            for j in (i + 1)..r {
                if m[[i, j]] != m[[j, i]] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix(m))
    }

    /// Symmetrizes `m` as `(m + mᵀ) / 2`.
    pub fn symmetrized(m: &Array2<f64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::DimensionMismatch { expected: r, got: c });
        }
        Ok(SymmetricMatrix::from_fn(r, |i, j| {
            if i == j {
                m[[i, i]]
            } else {
                0.5 * (m[[i, j]] + m[[j, i]])
            }
        }))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Undirected graph with symmetric nonnegative edge weights and no self-loops.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    weights: Array2<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph from vertex labels and `(i, j, w)` triples. Repeated
    /// pairs (in either orientation) have their weights summed.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = labels.len();
        let mut weights = Array2::zeros((n, n));
        for (i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, order: n });
                }
            }
            if i == j {
                return Err(Error::InvalidArgument(format!(
                    "self-loop on vertex {:?}",
                    labels[i]
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite);
            }
            if w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w}")));
            }
            weights[[i, j]] += w;
            weights[[j, i]] += w;
        }
        WeightedGraph::from_dense(labels, weights)
    }

    /// Builds a graph from a dense weight matrix, checking every invariant.
    pub fn from_dense(labels: Vec<String>, weights: Array2<f64>) -> Result<Self> {
        let n = labels.len();
        if weights.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.nrows(),
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate vertex label {label:?}"
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            if weights[[i, i]] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "nonzero diagonal weight at vertex {:?}",
                    labels[i]
                )));
            }
            for j in 0..n {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(Error::NonFinite);
                }
                if w < 0.0 {
                    return Err(Error::InvalidArgument(format!("negative weight {w}")));
                }
                if w != weights[[j, i]] {
                    return Err(Error::InvalidArgument(format!(
                        "asymmetric weights between {:?} and {:?}",
                        labels[i], labels[j]
                    )));
                }
                if w > 0.0 {
                    adjacency[i].push((j, w));
                }
            }
        }
        Ok(WeightedGraph {
            labels,
            index,
            weights,
            adjacency,
        })
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[[i, j]]
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Positive-weight neighbors of `i` in increasing index order.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Positive-weight edges as `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, nbrs)| {
            nbrs.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Σ_{i<j} w_ij.
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Weighted degree d_i = Σ_j w_ij.
    pub fn degree(&self, i: usize) -> Result<f64> {
        if i >= self.order() {
            return Err(Error::IndexOutOfRange {
                index: i,
                order: self.order(),
            });
        }
        Ok(self.weights.row(i).sum())
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.weights.rows().into_iter().map(|r| r.sum()).collect()
    }

    /// Copy of the graph with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        WeightedGraph::from_dense(self.labels.clone(), &self.weights * factor)
    }

    /// Induced copy with vertices reordered: new vertex `v` is old `order[v]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.order();
        if order.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: order.len(),
            });
        }
        let labels = order.iter().map(|&o| self.labels[o].clone()).collect();
        let weights = Array2::from_shape_fn((n, n), |(i, j)| self.weights[[order[i], order[j]]]);
        WeightedGraph::from_dense(labels, weights)
    }
}

/// Combinatorial Laplacian: `L_ii = d_i`, `L_ij = -w_ij`.
pub fn laplacian(g: &WeightedGraph) -> SymmetricMatrix {
    let degrees = g.degrees();
    SymmetricMatrix::from_fn(g.order(), |i, j| {
        if i == j {
            degrees[i]
        } else {
            -g.weight(i, j)
        }
    })
}

/// Connected components over positive-weight edges, numbered by their
/// smallest vertex index.
pub fn connected_components(g: &WeightedGraph) -> Partition {
    let n = g.order();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &(u, _) in g.neighbors(v) {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    Partition::from_raw(&comp, "components")
}
