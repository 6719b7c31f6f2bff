//! Summary-graph and whole-graph layouts, SVG and DOT output.

mod dot;
mod force;
mod svg;

pub use crate::graph::{summary_graph, ClusterSummaryGraph, SummaryEdge, SummaryNode};
pub use dot::{graph_dot, summary_dot};
pub use force::{
    constrained_full_layout, force_directed_layout, som_map_scene, DEFAULT_FULL_ITERATIONS,
    DEFAULT_SUMMARY_ITERATIONS,
};
pub use svg::{render_svg, Palette, SvgOptions, DEFAULT_LABEL_THRESHOLD};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::som::SomGrid;

pub type Point = [f64; 2];

/// Widest summary edge, in user units.
pub const MAX_EDGE_WIDTH: f64 = 6.0;

/// Axis-aligned rectangle with positive extent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    x: f64,
    y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    pub fn new(x: f64, y: f64, width: f64, height: f64) -> Result<Self> {
        let finite = [x, y, width, height].iter().all(|v| v.is_finite());
        if !finite || width <= 0.0 || height <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "degenerate frame at ({x}, {y}) of size {width} x {height}"
            )));
        }
        Ok(Self {
            x,
            y,
            width,
            height,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn short_side(&self) -> f64 {
        self.width.min(self.height)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn center(&self) -> Point {
        [self.x + self.width / 2.0, self.y + self.height / 2.0]
    }

    /// Closed-rectangle membership.
    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x && p[0] <= self.x + self.width && p[1] >= self.y && p[1] <= self.y + self.height
    }

    pub fn clamp(&self, p: Point) -> Point {
        [
            p[0].clamp(self.x, self.x + self.width),
            p[1].clamp(self.y, self.y + self.height),
        ]
    }

    /// Shrinks each side by `fraction` of the extent along that axis.
    pub fn inset(&self, fraction: f64) -> Frame {
        Frame {
            x: self.x + fraction * self.width,
            y: self.y + fraction * self.height,
            width: self.width * (1.0 - 2.0 * fraction),
            height: self.height * (1.0 - 2.0 * fraction),
        }
    }

    /// Point at relative coordinates `(u, v)` in `[0, 1]²`.
    pub fn at(&self, u: f64, v: f64) -> Point {
        [self.x + u * self.width, self.y + v * self.height]
    }

    /// Tile of `unit` when the grid is stretched over this frame.
    pub fn grid_cell(&self, grid: &SomGrid, unit: usize) -> Frame {
        let (r, c) = grid.coords(unit);
        let w = self.width / grid.cols() as f64;
        let h = self.height / grid.rows() as f64;
        Frame {
            x: self.x + c as f64 * w,
            y: self.y + r as f64 * h,
            width: w,
            height: h,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneNode {
    pub position: Point,
    pub radius: f64,
    pub caption: String,
    pub cluster: usize,
    /// Vertex count of the node's cluster; drives labelling.
    pub cluster_size: usize,
    /// Grid unit whose cell holds the node, for map and constrained scenes.
    pub unit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutScene {
    pub frame: Frame,
    pub nodes: Vec<SceneNode>,
    pub edges: Vec<SceneEdge>,
    /// Cell rectangle of every grid unit, row-major.
    pub cells: Option<Vec<Frame>>,
}

impl LayoutScene {
    pub fn positions(&self) -> Vec<Point> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    /// Nodes lying outside the frame or outside their assigned cell.
    pub fn containment_violations(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| {
                let in_cell = match (node.unit, &self.cells) {
                    (Some(u), Some(cells)) => cells.get(u).is_some_and(|c| c.contains(node.position)),
                    _ => true,
                };
                !in_cell || !self.frame.contains(node.position)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Replaces each summary glyph's caption by its members' labels, joined
    /// by commas. Only worth doing for small clusters, which are the ones
    /// that get labelled.
    pub fn caption_members(&mut self, sg: &ClusterSummaryGraph, g: &WeightedGraph, max_size: usize) {
        for node in &mut self.nodes {
            if let Some(summary) = sg.nodes.get(node.cluster) {
                if summary.vertex_count <= max_size {
                    let names: Vec<&str> = summary.members.iter().map(|&v| g.label(v)).collect();
                    node.caption = names.join(", ");
                }
            }
        }
    }
}

/// `r₀·√count` with `r₀` chosen so the largest count gets `largest`.
pub fn glyph_radii(counts: &[usize], largest: f64) -> Vec<f64> {
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0.0; counts.len()];
    }
    let r0 = largest / (max as f64).sqrt();
    counts.iter().map(|&c| r0 * (c as f64).sqrt()).collect()
}

/// Widths proportional to weight, the heaviest at `widest`.
pub fn edge_widths(weights: &[f64], widest: f64) -> Vec<f64> {
    let max = weights.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return vec![0.0; weights.len()];
    }
    weights.iter().map(|w| widest * w / max).collect()
}

pub(crate) fn summary_scene_edges(sg: &ClusterSummaryGraph) -> Vec<SceneEdge> {
    let weights: Vec<f64> = sg.edges.iter().map(|e| e.inter_weight).collect();
    let widths = edge_widths(&weights, MAX_EDGE_WIDTH);
    sg.edges
        .iter()
        .zip(widths)
        .map(|(e, width)| SceneEdge {
            a: e.a,
            b: e.b,
            weight: e.inter_weight,
            width,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_frames_rejected() {
        assert!(Frame::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(Frame::new(0.0, 0.0, 1.0, -2.0).is_err());
        assert!(Frame::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
        assert!(Frame::new(0.0, 0.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn grid_cells_tile_the_frame() {
        let frame = Frame::new(10.0, 20.0, 300.0, 200.0).unwrap();
        let grid = SomGrid::new(2, 3).unwrap();
        let area: f64 = (0..6).map(|m| frame.grid_cell(&grid, m).area()).sum();
        assert!((area - frame.area()).abs() < 1e-9);
        let last = frame.grid_cell(&grid, 5);
        assert_eq!([last.x(), last.y()], [210.0, 120.0]);
        assert_eq!(frame.grid_cell(&grid, 1).center(), [160.0, 70.0]);
    }

    #[test]
    fn inset_keeps_center() {
        let frame = Frame::new(0.0, 0.0, 100.0, 40.0).unwrap();
        let inner = frame.inset(0.05);
        assert_eq!(inner.center(), frame.center());
        assert!((inner.width() - 90.0).abs() < 1e-12);
        assert!((inner.height() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn radii_follow_square_root_of_size() {
        let r = glyph_radii(&[1, 4, 9, 16], 8.0);
        assert_eq!(r, vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(glyph_radii(&[0, 0], 5.0), vec![0.0, 0.0]);
    }

    #[test]
    fn widths_follow_weight() {
        assert_eq!(edge_widths(&[1.0, 3.0, 1.5], 6.0), vec![2.0, 6.0, 3.0]);
    }
}
