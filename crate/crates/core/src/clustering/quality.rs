use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{summary::cluster_weights, WeightedGraph};
use crate::partition::Partition;

/// Newman's modularity `Σ_j (e_j - a_j²)` with edge weights counted as
/// relation multiplicities.
///
/// `e_j` is the fraction of total weight inside cluster `j`, `a_j` the
/// fraction of edge endpoints (weight-counted) falling in `j`.
pub fn q_modularity(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    modularity(g, p, false)
}

/// Modularity counting every positive-weight edge once, ignoring weights.
pub fn q_modularity_unweighted(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    modularity(g, p, true)
}

fn modularity(g: &WeightedGraph, p: &Partition, unweighted: bool) -> Result<f64> {
    p.check_covers(g.order())?;
    let (intra, inter) = cluster_weights(g, p, unweighted);
    let mut incident = intra.iter().map(|w| 2.0 * w).collect::<Vec<_>>();
    for (&(a, b), &w) in &inter {
        incident[a] += w;
        incident[b] += w;
    }
    let total = intra.iter().sum::<f64>() + inter.values().sum::<f64>();
    if total <= 0.0 {
        return Err(Error::Edgeless);
    }
    Ok(intra
        .iter()
        .zip(&incident)
        .map(|(w, d)| {
            let e = w / total;
            let a = d / (2.0 * total);
            e - a * a
        })
        .sum())
}

/// Size distribution and modularity of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    /// `None` when the graph has no edges.
    pub q_modularity: Option<f64>,
    pub q_modularity_unweighted: Option<f64>,
    pub num_clusters: usize,
    pub num_singletons: usize,
    pub max_size: usize,
    pub median_size: f64,
    pub third_quartile_size: f64,
}

pub fn partition_stats(g: &WeightedGraph, p: &Partition) -> Result<PartitionStats> {
    p.check_covers(g.order())?;
    let mut sizes = p.sizes();
    sizes.sort_unstable();
    let optional = |r: Result<f64>| match r {
        Ok(q) => Ok(Some(q)),
        Err(Error::Edgeless) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(PartitionStats {
        q_modularity: optional(q_modularity(g, p))?,
        q_modularity_unweighted: optional(q_modularity_unweighted(g, p))?,
        num_clusters: sizes.len(),
        num_singletons: sizes.iter().filter(|&&s| s == 1).count(),
        max_size: sizes.last().copied().unwrap_or(0),
        median_size: quantile(&sizes, 0.5),
        third_quartile_size: quantile(&sizes, 0.75),
    })
}

/// Linear-interpolation quantile of an ascending sequence.
pub(crate) fn quantile(sorted: &[usize], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] as f64 + frac * (sorted[hi] as f64 - sorted[lo] as f64)
}
