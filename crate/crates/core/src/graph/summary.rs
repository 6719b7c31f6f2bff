use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::WeightedGraph;
use crate::error::Result;
use crate::partition::Partition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryNode {
    pub cluster: usize,
    pub vertex_count: usize,
    /// Σ w_ij over unordered pairs inside the cluster.
    pub intra_weight: f64,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEdge {
    pub a: usize,
    pub b: usize,
    pub inter_weight: f64,
}

/// One node per cluster, one edge per pair of clusters joined by positive weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummaryGraph {
    pub nodes: Vec<SummaryNode>,
    /// Sorted by `(a, b)` with `a < b`.
    pub edges: Vec<SummaryEdge>,
}

impl ClusterSummaryGraph {
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.intra_weight).sum::<f64>()
            + self.edges.iter().map(|e| e.inter_weight).sum::<f64>()
    }
}

/// Intra-cluster weights and nonzero inter-cluster weights keyed by `(a, b)`, `a < b`.
pub(crate) fn cluster_weights(
    g: &WeightedGraph,
    p: &Partition,
    unweighted: bool,
) -> (Vec<f64>, BTreeMap<(usize, usize), f64>) {
    let mut intra = vec![0.0; p.k()];
    let mut inter = BTreeMap::new();
    for (i, j, w) in g.edges() {
        let w = if unweighted { 1.0 } else { w };
        let (ci, cj) = (p.cluster_of(i), p.cluster_of(j));
        if ci == cj {
            intra[ci] += w;
        } else {
            *inter.entry((ci.min(cj), ci.max(cj))).or_insert(0.0) += w;
        }
    }
    (intra, inter)
}

pub fn summary_graph(g: &WeightedGraph, p: &Partition) -> Result<ClusterSummaryGraph> {
    p.check_covers(g.order())?;
    let (intra, inter) = cluster_weights(g, p, false);
    let nodes = p
        .members()
        .into_iter()
        .enumerate()
        .map(|(cluster, members)| SummaryNode {
            cluster,
            vertex_count: members.len(),
            intra_weight: intra[cluster],
            members,
        })
        .collect();
    let edges = inter
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|((a, b), inter_weight)| SummaryEdge { a, b, inter_weight })
        .collect();
    Ok(ClusterSummaryGraph { nodes, edges })
}
