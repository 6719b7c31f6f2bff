use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::document::{PartitionDocument, SCHEMA_VERSION};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Numeric,
    Categorical,
}

/// Per-vertex `key → value` records.
///
/// Text form: `vertex<TAB>key<TAB>value` lines, `#` comments, and an optional
/// `#schema<TAB>key:numeric<TAB>key:categorical ...` line. Undeclared keys are
/// numeric when every value parses as a finite number. Empty values count as
/// missing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttributeTable {
    kinds: BTreeMap<String, AttributeKind>,
    records: BTreeMap<String, BTreeMap<String, String>>,
}

fn parse_number(value: &str) -> Option<f64> {
    value.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl AttributeTable {
    pub fn parse<R: Read>(source: R) -> Result<Self> {
        let mut declared = BTreeMap::new();
        let mut records: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut value_lines: BTreeMap<(String, String), usize> = BTreeMap::new();
        for (idx, line) in BufReader::new(source).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let line = line.trim_end_matches('\r');
            if let Some(rest) = line.strip_prefix("#schema") {
                for field in rest.split('\t').filter(|f| !f.is_empty()) {
                    let (key, kind) = field.rsplit_once(':').ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: format!("schema entry {field:?} is not key:kind"),
                    })?;
                    let kind = match kind {
                        "numeric" => AttributeKind::Numeric,
                        "categorical" => AttributeKind::Categorical,
                        other => {
                            return Err(Error::Parse {
                                line: lineno,
                                message: format!("unknown attribute kind {other:?}"),
                            })
                        }
                    };
                    declared.insert(key.to_string(), kind);
                }
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [vertex, key, value] = fields[..] else {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            };
            if vertex.is_empty() || key.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "empty vertex or key".into(),
                });
            }
            let slot = records.entry(vertex.to_string()).or_default();
            if slot.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("vertex {vertex:?} has key {key:?} twice"),
                });
            }
            value_lines.insert((vertex.to_string(), key.to_string()), lineno);
        }
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }

        let mut kinds = declared;
        let mut seen_keys: Vec<&String> = records.values().flat_map(|r| r.keys()).collect();
        seen_keys.sort();
        seen_keys.dedup();
        for key in seen_keys {
            if kinds.contains_key(key) {
                continue;
            }
            let numeric = records
                .values()
                .filter_map(|r| r.get(key))
                .filter(|v| !v.is_empty())
                .all(|v| parse_number(v).is_some());
            let kind = if numeric {
                AttributeKind::Numeric
            } else {
                AttributeKind::Categorical
            };
            kinds.insert(key.clone(), kind);
        }
        for ((vertex, key), line) in &value_lines {
            let value = &records[vertex][key];
            if kinds[key] == AttributeKind::Numeric && !value.is_empty() && parse_number(value).is_none() {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("value {value:?} of numeric key {key:?} is not a number"),
                });
            }
        }
        Ok(AttributeTable { kinds, records })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(File::open(path)?)
    }

    pub fn kinds(&self) -> &BTreeMap<String, AttributeKind> {
        &self.kinds
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    /// Present, nonempty value.
    pub fn value(&self, vertex: &str, key: &str) -> Option<&str> {
        self.records
            .get(vertex)?
            .get(key)
            .map(String::as_str)
            .filter(|v| !v.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub count: usize,
    pub missing: usize,
    pub mean: Option<f64>,
    /// Population form.
    pub std: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryShare {
    pub value: String,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoricalSummary {
    pub missing: usize,
    /// Most frequent first, ties by value.
    pub distribution: Vec<CategoryShare>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterAttributes {
    pub cluster: usize,
    pub size: usize,
    pub numeric: BTreeMap<String, NumericSummary>,
    pub categorical: BTreeMap<String, CategoricalSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub schema_version: u32,
    pub method: String,
    pub kinds: BTreeMap<String, AttributeKind>,
    pub clusters: Vec<ClusterAttributes>,
}

fn numeric_summary(values: &[f64], missing: usize) -> NumericSummary {
    if values.is_empty() {
        return NumericSummary {
            count: 0,
            missing,
            mean: None,
            std: None,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    NumericSummary {
        count: values.len(),
        missing,
        mean: Some(mean),
        std: Some(var.sqrt()),
    }
}

fn categorical_summary(values: &[&str], missing: usize) -> CategoricalSummary {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    let mut distribution: Vec<CategoryShare> = counts
        .into_iter()
        .map(|(value, count)| CategoryShare {
            value: value.to_string(),
            count,
            fraction: count as f64 / values.len() as f64,
        })
        .collect();
    distribution.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
    CategoricalSummary { missing, distribution }
}

/// Per-cluster statistics of every attribute key over the partition's vertices.
pub fn summarize_attributes(doc: &PartitionDocument, table: &AttributeTable) -> Result<AttributeSummary> {
    if let Some(unknown) = table.vertices().find(|v| !doc.assignment.contains_key(*v)) {
        return Err(Error::InvalidArgument(format!(
            "attribute file names vertex {unknown:?} which is not in the partition"
        )));
    }
    if table.vertices().next().is_none() {
        return Err(Error::InvalidArgument(
            "attribute file and partition share no vertices".into(),
        ));
    }
    let mut members: Vec<Vec<&str>> = vec![Vec::new(); doc.num_clusters];
    for (label, &c) in &doc.assignment {
        if c >= doc.num_clusters {
            return Err(Error::IndexOutOfRange {
                index: c,
                order: doc.num_clusters,
            });
        }
        members[c].push(label);
    }

    let clusters = members
        .iter()
        .enumerate()
        .map(|(cluster, labels)| {
            let mut numeric = BTreeMap::new();
            let mut categorical = BTreeMap::new();
            for (key, kind) in table.kinds() {
                let present: Vec<&str> = labels.iter().filter_map(|v| table.value(v, key)).collect();
                let missing = labels.len() - present.len();
                match kind {
                    AttributeKind::Numeric => {
                        let values: Vec<f64> = present.iter().filter_map(|v| parse_number(v)).collect();
                        numeric.insert(key.clone(), numeric_summary(&values, missing));
                    }
                    AttributeKind::Categorical => {
                        categorical.insert(key.clone(), categorical_summary(&present, missing));
                    }
                }
            }
            ClusterAttributes {
                cluster,
                size: labels.len(),
                numeric,
                categorical,
            }
        })
        .collect();
    Ok(AttributeSummary {
        schema_version: SCHEMA_VERSION,
        method: doc.method.clone(),
        kinds: table.kinds().clone(),
        clusters,
    })
}
