use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::clustering::PartitionStats;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::partition::Partition;
use crate::som::{SomGrid, SomModel, SomSchedule};

pub const SCHEMA_VERSION: u32 = 1;

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Partition statistics as reported, q-modularity rounded to 4 places.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub vertices: usize,
    pub edges: usize,
    pub q_modularity: Option<f64>,
    pub q_modularity_unweighted: Option<f64>,
    pub num_clusters: usize,
    pub num_singletons: usize,
    pub max_size: usize,
    pub median_size: f64,
    pub third_quartile_size: f64,
}

impl ReportStats {
    pub fn new(g: &WeightedGraph, stats: &PartitionStats) -> Self {
        ReportStats {
            vertices: g.order(),
            edges: g.edge_count(),
            q_modularity: stats.q_modularity.map(round4),
            q_modularity_unweighted: stats.q_modularity_unweighted.map(round4),
            num_clusters: stats.num_clusters,
            num_singletons: stats.num_singletons,
            max_size: stats.max_size,
            median_size: stats.median_size,
            third_quartile_size: stats.third_quartile_size,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub method: String,
    pub params: BTreeMap<String, String>,
    /// Absent when the partition was not produced by a recorded run.
    pub config: Option<RunConfig>,
    pub stats: ReportStats,
}

/// Feature space a map was trained in, enough to rebuild it from the graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SomSpace {
    HeatKernel { beta: f64 },
    Spectral { p: usize },
}

/// Trained map keyed by vertex label rather than index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SomModelDocument {
    pub grid: SomGrid,
    pub space: SomSpace,
    pub seed: u64,
    pub schedule: SomSchedule,
    pub vertices: Vec<String>,
    /// Unit of each entry of `vertices`.
    pub assignment: Vec<usize>,
    /// One row of convex weights per unit, columns in `vertices` order.
    pub gamma: Vec<Vec<f64>>,
    pub energy_trace: Vec<f64>,
}

impl SomModelDocument {
    pub fn new(model: &SomModel, g: &WeightedGraph, space: SomSpace) -> Self {
        SomModelDocument {
            grid: model.grid,
            space,
            seed: model.seed,
            schedule: model.schedule,
            vertices: g.labels().to_vec(),
            assignment: model.assignment.clone(),
            gamma: model.gamma.rows().into_iter().map(|r| r.to_vec()).collect(),
            energy_trace: model.energy_trace.clone(),
        }
    }

    /// The model with columns reordered to the vertex order of `g`.
    pub fn to_model(&self, g: &WeightedGraph) -> Result<SomModel> {
        let n = g.order();
        let units = self.grid.units();
        if self.vertices.len() != n || self.assignment.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.vertices.len(),
            });
        }
        if self.gamma.len() != units || self.gamma.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "model weights must be {units} rows of {n} entries"
            )));
        }
        let mut gamma = Array2::zeros((units, n));
        let mut assignment = vec![0; n];
        let mut seen = vec![false; n];
        for (col, label) in self.vertices.iter().enumerate() {
            let v = g
                .index_of(label)
                .ok_or_else(|| Error::InvalidArgument(format!("model vertex {label:?} is not in the graph")))?;
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!("model lists vertex {label:?} twice")));
            }
            if self.assignment[col] >= units {
                return Err(Error::IndexOutOfRange {
                    index: self.assignment[col],
                    order: units,
                });
            }
            assignment[v] = self.assignment[col];
            for m in 0..units {
                gamma[[m, v]] = self.gamma[m][col];
            }
        }
        Ok(SomModel {
            grid: self.grid,
            gamma,
            assignment,
            energy_trace: self.energy_trace.clone(),
            schedule: self.schedule,
            seed: self.seed,
        })
    }
}

/// Serialized partition: tag, parameters, label to cluster map and stats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionDocument {
    pub schema_version: u32,
    pub method: String,
    pub params: BTreeMap<String, String>,
    pub config: Option<RunConfig>,
    pub num_clusters: usize,
    pub assignment: BTreeMap<String, usize>,
    pub stats: ReportStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub som: Option<SomModelDocument>,
}

impl PartitionDocument {
    pub fn new(
        g: &WeightedGraph,
        partition: &Partition,
        stats: &PartitionStats,
        config: Option<RunConfig>,
        som: Option<SomModelDocument>,
    ) -> Self {
        let assignment = g
            .labels()
            .iter()
            .zip(partition.assignment())
            .map(|(label, &c)| (label.clone(), c))
            .collect();
        PartitionDocument {
            schema_version: SCHEMA_VERSION,
            method: partition.method.clone(),
            params: partition.params.clone(),
            config,
            num_clusters: partition.k(),
            assignment,
            stats: ReportStats::new(g, stats),
            som,
        }
    }

    pub fn report(&self) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            method: self.method.clone(),
            params: self.params.clone(),
            config: self.config.clone(),
            stats: self.stats.clone(),
        }
    }

    /// Partition over the vertices of `g`; labels must match exactly.
    pub fn partition_for(&self, g: &WeightedGraph) -> Result<Partition> {
        if let Some(extra) = self.assignment.keys().find(|l| g.index_of(l).is_none()) {
            return Err(Error::InvalidArgument(format!(
                "partition names vertex {extra:?} which is not in the graph"
            )));
        }
        let raw = g
            .labels()
            .iter()
            .map(|label| {
                self.assignment
                    .get(label)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("vertex {label:?} is missing from the partition")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut partition = Partition::from_raw(&raw, self.method.clone());
        partition.params = self.params.clone();
        Ok(partition)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let doc: PartitionDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported partition schema version {}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
