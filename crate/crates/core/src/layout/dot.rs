use std::fmt::Write;

use super::{ClusterSummaryGraph, LayoutScene};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Double-quoted DOT identifier.
fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn check_scene(scene: Option<&LayoutScene>, nodes: usize) -> Result<()> {
    match scene {
        Some(s) if s.nodes.len() != nodes => Err(Error::DimensionMismatch {
            expected: nodes,
            got: s.nodes.len(),
        }),
        _ => Ok(()),
    }
}

/// Placement attributes; positions are pinned (`!`) and sizes in inches.
fn placement(scene: Option<&LayoutScene>, i: usize) -> String {
    match scene {
        Some(s) => {
            let node = &s.nodes[i];
            format!(
                ", pos=\"{:.3},{:.3}!\", width={:.4}, fixedsize=true",
                node.position[0],
                node.position[1],
                2.0 * node.radius / 72.0
            )
        }
        None => String::new(),
    }
}

/// One node per cluster with its vertex count, one edge per linked pair.
pub fn summary_dot(sg: &ClusterSummaryGraph, scene: Option<&LayoutScene>) -> Result<String> {
    check_scene(scene, sg.nodes.len())?;
    let mut out = String::from("graph summary {\n  node [shape=circle];\n");
    for (i, node) in sg.nodes.iter().enumerate() {
        let caption = match scene {
            Some(s) => s.nodes[i].caption.clone(),
            None => node.cluster.to_string(),
        };
        let _ = writeln!(
            out,
            "  {} [label={}, vertex_count={}, intra_weight={}{}];",
            quote(&format!("c{}", node.cluster)),
            quote(&caption),
            node.vertex_count,
            node.intra_weight,
            placement(scene, i)
        );
    }
    for e in &sg.edges {
        let _ = writeln!(
            out,
            "  {} -- {} [weight={}];",
            quote(&format!("c{}", e.a)),
            quote(&format!("c{}", e.b)),
            e.inter_weight
        );
    }
    out.push_str("}\n");
    Ok(out)
}

/// Every vertex under its label, every edge with its weight.
pub fn graph_dot(g: &WeightedGraph, scene: Option<&LayoutScene>) -> Result<String> {
    check_scene(scene, g.order())?;
    let mut out = String::from("graph G {\n  node [shape=point];\n");
    for i in 0..g.order() {
        let attrs = match scene {
            Some(s) => format!(" [cluster={}{}]", s.nodes[i].cluster, placement(scene, i)),
            None => String::new(),
        };
        let _ = writeln!(out, "  {}{attrs};", quote(g.label(i)));
    }
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "  {} -- {} [weight={}];", quote(g.label(i)), quote(g.label(j)), w);
    }
    out.push_str("}\n");
    Ok(out)
}
