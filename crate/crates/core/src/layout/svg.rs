use std::fmt::Write;

use super::LayoutScene;
use crate::error::{Error, Result};
use crate::som::Raster;

pub const DEFAULT_LABEL_THRESHOLD: usize = 3;

const CATEGORICAL: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f",
    "#bab0ac",
];

/// Fill colors cycled by cluster index.
#[derive(Clone, Debug, PartialEq)]
pub struct Palette(Vec<String>);

impl Palette {
    /// Colors are written verbatim into attributes, so only `#`, letters and
    /// digits are accepted.
    pub fn new(colors: Vec<String>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::InvalidArgument("palette needs at least one color".into()));
        }
        if let Some(bad) = colors
            .iter()
            .find(|c| c.is_empty() || !c.chars().all(|ch| ch == '#' || ch.is_ascii_alphanumeric()))
        {
            return Err(Error::InvalidArgument(format!("invalid color {bad:?}")));
        }
        Ok(Self(colors))
    }

    pub fn color(&self, i: usize) -> &str {
        &self.0[i % self.0.len()]
    }
}

impl Default for Palette {
    fn default() -> Self {
        Self(CATEGORICAL.iter().map(|c| c.to_string()).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    pub labels: bool,
    /// Nodes whose cluster has at most this many vertices get their caption drawn.
    pub label_threshold: usize,
    /// Stretched over the frame beneath everything else.
    pub umatrix: Option<Raster>,
    pub palette: Palette,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            labels: true,
            label_threshold: DEFAULT_LABEL_THRESHOLD,
            umatrix: None,
            palette: Palette::default(),
        }
    }
}

/// Fixed three-decimal formatting without negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// High values dark: borders between clusters show as ridges.
fn gray(t: f64) -> String {
    let level = (255.0 * (1.0 - 0.8 * t.clamp(0.0, 1.0))).round() as u8;
    format!("#{level:02x}{level:02x}{level:02x}")
}

/// Standalone SVG 1.1 document. Output depends only on the scene and the
/// options.
pub fn render_svg(scene: &LayoutScene, options: &SvgOptions) -> String {
    let f = &scene.frame;
    let mut out = String::new();
    // write! into a String cannot fail
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(f.width()),
        num(f.height()),
        num(f.x()),
        num(f.y()),
        num(f.width()),
        num(f.height())
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        num(f.x()),
        num(f.y()),
        num(f.width()),
        num(f.height())
    );

    if let Some(raster) = options.umatrix.as_ref().filter(|r| r.width > 0 && r.height > 0) {
        let lo = raster.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = raster.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let (pw, ph) = (f.width() / raster.width as f64, f.height() / raster.height as f64);
        let _ = writeln!(out, r#"<g id="umatrix" shape-rendering="crispEdges">"#);
        for py in 0..raster.height {
            for px in 0..raster.width {
                let v = raster.values[py * raster.width + px];
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                    num(f.x() + px as f64 * pw),
                    num(f.y() + py as f64 * ph),
                    num(pw),
                    num(ph),
                    gray((v - lo) / span)
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }

    if let Some(cells) = &scene.cells {
        let _ = writeln!(out, r##"<g id="cells" fill="none" stroke="#999999" stroke-width="0.5">"##);
        for c in cells {
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                num(c.x()),
                num(c.y()),
                num(c.width()),
                num(c.height())
            );
        }
        let _ = writeln!(out, "</g>");
    }

    if !scene.edges.is_empty() {
        let _ = writeln!(out, r##"<g id="edges" stroke="#555555" stroke-opacity="0.6" stroke-linecap="round">"##);
        for e in &scene.edges {
            let (p, q) = (scene.nodes[e.a].position, scene.nodes[e.b].position);
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="{}"/>"#,
                num(p[0]),
                num(p[1]),
                num(q[0]),
                num(q[1]),
                num(e.width)
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r##"<g id="glyphs" stroke="#222222" stroke-width="0.5">"##);
    for node in &scene.nodes {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{}"/>"#,
            num(node.position[0]),
            num(node.position[1]),
            num(node.radius),
            options.palette.color(node.cluster)
        );
    }
    let _ = writeln!(out, "</g>");

    if options.labels {
        let small: Vec<_> = scene
            .nodes
            .iter()
            .filter(|n| n.cluster_size <= options.label_threshold && !n.caption.is_empty())
            .collect();
        if !small.is_empty() {
            let size = f.short_side() / 60.0;
            let _ = writeln!(out, r#"<g id="labels" font-family="sans-serif" font-size="{}">"#, num(size));
            for node in small {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}">{}</text>"#,
                    num(node.position[0] + node.radius + size / 4.0),
                    num(node.position[1] + size / 3.0),
                    escape(&node.caption)
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }
    out.push_str("</svg>\n");
    out
}
