use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{glyph_radii, summary_scene_edges, ClusterSummaryGraph, Frame, LayoutScene, Point, SceneEdge, SceneNode};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::som::{som_partition, SomModel};

pub const DEFAULT_SUMMARY_ITERATIONS: usize = 500;
pub const DEFAULT_FULL_ITERATIONS: usize = 1000;

/// Fraction of a cell kept free along each border in constrained layouts.
const CELL_MARGIN: f64 = 0.05;

/// Widest edge in whole-graph drawings.
const FULL_EDGE_WIDTH: f64 = 1.0;

/// Distances below `MIN_SEPARATION·k` are treated as this value.
const MIN_SEPARATION: f64 = 1e-6;

// Spreads coincident pairs in a fixed, index-dependent direction.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

fn repulsion(pu: Point, pv: Point, k: f64, u: usize, v: usize) -> Point {
    let (dx, dy) = (pu[0] - pv[0], pu[1] - pv[1]);
    let d = dx.hypot(dy);
    let floor = MIN_SEPARATION * k;
    if d < floor {
        let theta = GOLDEN_ANGLE * (u * 31 + v) as f64;
        let f = k * k / floor;
        return [f * theta.cos(), f * theta.sin()];
    }
    // k²/d along the unit vector
    let s = k * k / (d * d);
    [dx * s, dy * s]
}

/// Attraction on `pu` towards `pv`: magnitude `d²/k·w`.
fn attraction(pu: Point, pv: Point, k: f64, w: f64) -> Point {
    let (dx, dy) = (pv[0] - pu[0], pv[1] - pu[1]);
    let s = dx.hypot(dy) / k * w;
    [dx * s, dy * s]
}

fn step(p: Point, disp: Point, temperature: f64) -> Point {
    let len = disp[0].hypot(disp[1]);
    if len == 0.0 || !len.is_finite() {
        return p;
    }
    let s = len.min(temperature) / len;
    [p[0] + disp[0] * s, p[1] + disp[1] * s]
}

fn temperature(frame: &Frame, iteration: usize, iterations: usize) -> f64 {
    frame.diagonal() / 10.0 * (1.0 - iteration as f64 / iterations as f64)
}

fn normalized_springs(edges: impl Iterator<Item = (usize, usize, f64)>) -> Vec<(usize, usize, f64)> {
    let springs: Vec<_> = edges.collect();
    let max = springs.iter().map(|s| s.2).fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    springs.into_iter().map(|(a, b, w)| (a, b, w / max)).collect()
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("at least one layout iteration is required".into()));
    }
    Ok(())
}

/// Fruchterman-Reingold drawing of a cluster summary graph.
///
/// Ideal length `k = √(area / nodes)`, displacement capped by a temperature
/// cooling linearly from a tenth of the frame diagonal to zero, positions
/// clamped to the frame. Initial placement is uniform from `seed`.
pub fn force_directed_layout(
    sg: &ClusterSummaryGraph,
    iterations: usize,
    frame: Frame,
    seed: u64,
) -> Result<LayoutScene> {
    check_iterations(iterations)?;
    let n = sg.nodes.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let k = (frame.area() / n as f64).sqrt();
    let springs = normalized_springs(sg.edges.iter().map(|e| (e.a, e.b, e.inter_weight)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = if n == 1 {
        vec![frame.center()]
    } else {
        (0..n)
            .map(|_| {
                let (u, v) = (rng.random::<f64>(), rng.random::<f64>());
                frame.at(u, v)
            })
            .collect()
    };

    if n > 1 {
        for it in 0..iterations {
            let t = temperature(&frame, it, iterations);
            let mut disp = vec![[0.0; 2]; n];
            for u in 0..n {
                for v in u + 1..n {
                    let f = repulsion(pos[u], pos[v], k, u, v);
                    disp[u] = [disp[u][0] + f[0], disp[u][1] + f[1]];
                    disp[v] = [disp[v][0] - f[0], disp[v][1] - f[1]];
                }
            }
            for &(a, b, w) in &springs {
                let f = attraction(pos[a], pos[b], k, w);
                disp[a] = [disp[a][0] + f[0], disp[a][1] + f[1]];
                disp[b] = [disp[b][0] - f[0], disp[b][1] - f[1]];
            }
            for (p, d) in pos.iter_mut().zip(&disp) {
                *p = frame.clamp(step(*p, *d, t));
            }
        }
    }

    let counts: Vec<usize> = sg.nodes.iter().map(|n| n.vertex_count).collect();
    let radii = glyph_radii(&counts, frame.short_side() / 8.0);
    let nodes = sg
        .nodes
        .iter()
        .zip(pos)
        .zip(radii)
        .map(|((node, position), radius)| SceneNode {
            position,
            radius,
            caption: node.cluster.to_string(),
            cluster: node.cluster,
            cluster_size: node.vertex_count,
            unit: None,
        })
        .collect();
    Ok(LayoutScene {
        frame,
        nodes,
        edges: summary_scene_edges(sg),
        cells: None,
    })
}

fn grid_cells(model: &SomModel, frame: &Frame) -> Vec<Frame> {
    (0..model.grid.units()).map(|m| frame.grid_cell(&model.grid, m)).collect()
}

/// Summary glyphs centered on their unit's cell of the map.
///
/// `sg` must come from the partition of `model`: one node per nonempty unit,
/// in row-major unit order. Glyphs are sized as in summary drawings but never
/// wider than their cell.
pub fn som_map_scene(model: &SomModel, sg: &ClusterSummaryGraph, frame: Frame) -> Result<LayoutScene> {
    let sp = som_partition(model);
    let sizes = model.unit_sizes();
    let matches = sg.nodes.len() == sp.units.len()
        && sg
            .nodes
            .iter()
            .zip(&sp.units)
            .all(|(node, &u)| node.vertex_count == sizes[u]);
    if !matches {
        return Err(Error::InvalidArgument(
            "summary graph does not match the nonempty units of the map".into(),
        ));
    }
    let cells = grid_cells(model, &frame);
    let cell_side = cells[0].short_side();
    let largest = (frame.short_side() / 8.0).min(0.45 * cell_side);
    let counts: Vec<usize> = sg.nodes.iter().map(|n| n.vertex_count).collect();
    let radii = glyph_radii(&counts, largest);
    let nodes = sg
        .nodes
        .iter()
        .zip(&sp.units)
        .zip(radii)
        .map(|((node, &unit), radius)| SceneNode {
            position: cells[unit].center(),
            radius,
            caption: node.cluster.to_string(),
            cluster: node.cluster,
            cluster_size: node.vertex_count,
            unit: Some(unit),
        })
        .collect();
    Ok(LayoutScene {
        frame,
        nodes,
        edges: summary_scene_edges(sg),
        cells: Some(cells),
    })
}

/// Whole-graph drawing with every vertex confined to its unit's cell.
///
/// Attraction acts along all edges, repulsion only between vertices of the
/// same cell, each cell using its own ideal length. After every move a
/// vertex is projected back into its cell shrunk by a 5% margin.
pub fn constrained_full_layout(
    g: &WeightedGraph,
    model: &SomModel,
    frame: Frame,
    iterations: usize,
    seed: u64,
) -> Result<LayoutScene> {
    check_iterations(iterations)?;
    let n = g.order();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if model.vertices() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: model.vertices(),
        });
    }
    let units = model.grid.units();
    if let Some(&bad) = model.assignment.iter().find(|&&u| u >= units) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            order: units,
        });
    }

    let cells = grid_cells(model, &frame);
    let inner: Vec<Frame> = cells.iter().map(|c| c.inset(CELL_MARGIN)).collect();
    let mut members = vec![Vec::new(); units];
    for (v, &u) in model.assignment.iter().enumerate() {
        members[u].push(v);
    }
    let ideal: Vec<f64> = (0..units)
        .map(|u| (inner[u].area() / members[u].len().max(1) as f64).sqrt())
        .collect();
    let k_of = |v: usize| ideal[model.assignment[v]];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|v| {
            let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
            inner[model.assignment[v]].at(a, b)
        })
        .collect();
    let springs = normalized_springs(g.edges());

    for it in 0..iterations {
        let t = temperature(&frame, it, iterations);
        let mut disp = vec![[0.0; 2]; n];
        for (u, group) in members.iter().enumerate() {
            let k = ideal[u];
            for (x, &a) in group.iter().enumerate() {
                for &b in &group[x + 1..] {
                    let f = repulsion(pos[a], pos[b], k, a, b);
                    disp[a] = [disp[a][0] + f[0], disp[a][1] + f[1]];
                    disp[b] = [disp[b][0] - f[0], disp[b][1] - f[1]];
                }
            }
        }
        for &(a, b, w) in &springs {
            let fa = attraction(pos[a], pos[b], k_of(a), w);
            let fb = attraction(pos[b], pos[a], k_of(b), w);
            disp[a] = [disp[a][0] + fa[0], disp[a][1] + fa[1]];
            disp[b] = [disp[b][0] + fb[0], disp[b][1] + fb[1]];
        }
        for (v, p) in pos.iter_mut().enumerate() {
            *p = inner[model.assignment[v]].clamp(step(*p, disp[v], t));
        }
    }

    let sp = som_partition(model);
    let sizes = model.unit_sizes();
    let radius = cells[0].short_side() / 40.0;
    let nodes = pos
        .into_iter()
        .enumerate()
        .map(|(v, position)| {
            let unit = model.assignment[v];
            SceneNode {
                position,
                radius,
                caption: g.label(v).to_string(),
                cluster: sp.partition.cluster_of(v),
                cluster_size: sizes[unit],
                unit: Some(unit),
            }
        })
        .collect();
    let edges = springs
        .into_iter()
        .map(|(a, b, w)| SceneEdge {
            a,
            b,
            weight: g.weight(a, b),
            width: FULL_EDGE_WIDTH * w,
        })
        .collect();
    Ok(LayoutScene {
        frame,
        nodes,
        edges,
        cells: Some(cells),
    })
}
