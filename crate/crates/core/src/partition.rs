use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of every vertex to exactly one cluster.
///
/// Cluster ids are always contiguous `0..k`: constructors drop empty clusters
/// and renumber the survivors in increasing order of their original id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
    pub method: String,
    pub params: BTreeMap<String, String>,
}

impl Partition {
    /// Builds a compacted partition from raw (possibly gappy) cluster ids.
    pub fn from_raw(raw: &[usize], method: impl Into<String>) -> Self {
        let max = raw.iter().copied().max().map_or(0, |m| m + 1);
        let mut remap = vec![usize::MAX; max];
        for &c in raw {
            remap[c] = 0;
        }
        let mut next = 0;
        for slot in remap.iter_mut() {
            if *slot == 0 {
                *slot = next;
                next += 1;
            }
        }
        Partition {
            assignment: raw.iter().map(|&c| remap[c]).collect(),
            k: next,
            method: method.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn single_cluster(n: usize, method: impl Into<String>) -> Self {
        Partition::from_raw(&vec![0; n], method)
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of (nonempty) clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of vertices covered.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_of(&self, vertex: usize) -> usize {
        self.assignment[vertex]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Member vertex indices of each cluster, in increasing vertex order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            members[c].push(v);
        }
        members
    }

    pub(crate) fn check_covers(&self, order: usize) -> Result<()> {
        if self.assignment.len() != order {
            return Err(Error::DimensionMismatch {
                expected: order,
                got: self.assignment.len(),
            });
        }
        Ok(())
    }

    /// True when both partitions group vertices identically, whatever the ids.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        if self.len() != other.len() || self.k != other.k {
            return false;
        }
        let mut forward = vec![usize::MAX; self.k];
        for (&a, &b) in self.assignment.iter().zip(&other.assignment) {
            if forward[a] == usize::MAX {
                forward[a] = b;
            } else if forward[a] != b {
                return false;
            }
        }
        let mut seen = vec![false; other.k];
        forward.iter().all(|&b| !std::mem::replace(&mut seen[b], true))
    }
}
