//! End-to-end runs behind the `graphsom` command.

mod attrs;
mod document;

pub use attrs::{
    summarize_attributes, AttributeKind, AttributeSummary, AttributeTable, CategoricalSummary, CategoryShare,
    ClusterAttributes, NumericSummary,
};
pub use document::{PartitionDocument, Report, ReportStats, SomModelDocument, SomSpace, SCHEMA_VERSION};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::{kernel_kmeans, partition_stats, spectral_clustering, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::graph::{laplacian, load_edge_list_path, summary_graph, LoadOptions, WeightedGraph};
use crate::layout::{
    constrained_full_layout, force_directed_layout, graph_dot, render_svg, som_map_scene, summary_dot, Frame,
    LayoutScene, SvgOptions, DEFAULT_FULL_ITERATIONS, DEFAULT_LABEL_THRESHOLD, DEFAULT_SUMMARY_ITERATIONS,
};
use crate::linalg::{heat_kernel, spectral_embedding, DEFAULT_BETA};
use crate::partition::Partition;
use crate::som::{
    batch_kernel_som, som_partition, spectral_som, u_matrix, SomData, SomGrid, SomInit, SomModel, SomOptions,
    SomSchedule, UMatrix, DEFAULT_EPOCHS,
};

pub const DEFAULT_K: usize = 50;

/// Pixels per map unit in the U-matrix background.
const UMATRIX_UPSAMPLE: usize = 12;

/// Width of every drawing, in user units.
const DRAWING_WIDTH: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Spectral,
    KernelKmeans,
    SpectralSom,
    KernelSom,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::KernelKmeans => "kernel-kmeans",
            Method::SpectralSom => "spectral-som",
            Method::KernelSom => "kernel-som",
        }
    }

    pub fn is_som(&self) -> bool {
        matches!(self, Method::SpectralSom | Method::KernelSom)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Spectral, Method::KernelKmeans, Method::SpectralSom, Method::KernelSom]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Starting prototypes of a map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMethod {
    #[default]
    Principal,
    Dirichlet,
}

impl FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "principal" => Ok(InitMethod::Principal),
            "dirichlet" => Ok(InitMethod::Dirichlet),
            _ => Err(Error::InvalidArgument(format!("unknown initialization {s:?}"))),
        }
    }
}

/// Everything that determines a clustering run; embedded in its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub method: Method,
    pub k: usize,
    pub p: usize,
    pub beta: f64,
    pub grid: Option<SomGrid>,
    pub epochs: usize,
    /// Neighborhood radius at the first and last epoch.
    pub radius: Option<(f64, f64)>,
    pub init: InitMethod,
    pub seed: u64,
    pub restarts: usize,
    pub out: PathBuf,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, method: Method, seed: u64, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            method,
            k: DEFAULT_K,
            p: DEFAULT_K,
            beta: DEFAULT_BETA,
            grid: None,
            epochs: DEFAULT_EPOCHS,
            radius: None,
            init: InitMethod::default(),
            seed,
            restarts: DEFAULT_RESTARTS,
            out: out.into(),
            report: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.method.is_som() && self.grid.is_none() {
            return Err(Error::InvalidArgument(format!("method {} requires --grid", self.method)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if self.k == 0 || self.p == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument("k, p and restarts must be at least 1".into()));
        }
        if let Some(grid) = self.grid {
            self.schedule(&grid).validate()?;
        }
        Ok(())
    }

    fn schedule(&self, grid: &SomGrid) -> SomSchedule {
        let (sigma_start, sigma_end) = self.radius.unwrap_or_else(|| {
            let d = SomSchedule::default_for(grid);
            (d.sigma_start, d.sigma_end)
        });
        SomSchedule {
            epochs: self.epochs,
            sigma_start,
            sigma_end,
        }
    }

    fn som_options(&self, grid: &SomGrid) -> SomOptions {
        let init = match self.init {
            InitMethod::Principal => SomInit::PrincipalPlane,
            InitMethod::Dirichlet => SomInit::Dirichlet,
        };
        SomOptions::new(self.schedule(grid), self.seed).with_init(init)
    }
}

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::EmptyInput | Error::Io(_) | Error::Json(_) => 3,
        Error::NonFinite | Error::NoConvergence { .. } | Error::NotPositiveSemiDefinite { .. } => 4,
        Error::InvalidArgument(_)
        | Error::IndexOutOfRange { .. }
        | Error::DimensionMismatch { .. }
        | Error::Edgeless => 2,
    }
}

pub fn load_graph(path: &Path) -> Result<WeightedGraph> {
    load_edge_list_path(path, LoadOptions::default())
}

pub struct ClusterOutcome {
    pub graph: WeightedGraph,
    pub partition: Partition,
    pub model: Option<SomModel>,
    pub document: PartitionDocument,
}

/// Clusters the graph at `config.input` without writing anything.
pub fn cluster(config: &RunConfig) -> Result<ClusterOutcome> {
    config.validate()?;
    let g = load_graph(&config.input)?;
    let (partition, model, space) = match config.method {
        Method::Spectral => {
            let r = spectral_clustering(&g, config.p, config.k, config.seed, config.restarts)?;
            (r.partition, None, None)
        }
        Method::KernelKmeans => {
            let kernel = heat_kernel(&laplacian(&g), config.beta)?;
            let r = kernel_kmeans(&kernel, config.k, config.seed, config.restarts)?;
            (r.partition, None, None)
        }
        Method::SpectralSom | Method::KernelSom => {
            let grid = config.grid.expect("validated");
            let options = config.som_options(&grid);
            let (model, space) = if config.method == Method::KernelSom {
                let kernel = heat_kernel(&laplacian(&g), config.beta)?;
                let space = SomSpace::HeatKernel { beta: config.beta };
                (batch_kernel_som(&kernel, grid, &options)?, space)
            } else {
                (spectral_som(&g, config.p, grid, &options)?, SomSpace::Spectral { p: config.p })
            };
            let mut partition = som_partition(&model).partition;
            partition.method = config.method.as_str().to_string();
            if let SomSpace::HeatKernel { beta } = space {
                partition = partition.with_param("beta", beta);
            } else {
                partition = partition.with_param("p", config.p);
            }
            (partition, Some(model), Some(space))
        }
    };
    let stats = partition_stats(&g, &partition)?;
    let som = model
        .as_ref()
        .zip(space)
        .map(|(m, space)| SomModelDocument::new(m, &g, space));
    let document = PartitionDocument::new(&g, &partition, &stats, Some(config.clone()), som);
    Ok(ClusterOutcome {
        graph: g,
        partition,
        model,
        document,
    })
}

/// Runs [`cluster`], writes the partition document and, when requested,
/// the report. Returns the report.
pub fn run_cluster(config: &RunConfig) -> Result<Report> {
    let outcome = cluster(config)?;
    fs::write(&config.out, outcome.document.to_json()?)?;
    let report = outcome.document.report();
    if let Some(path) = &config.report {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(report)
}

/// Report for an existing partition document against a graph.
pub fn run_stats(input: &Path, partition: &Path) -> Result<Report> {
    let g = load_graph(input)?;
    let doc = PartitionDocument::read(partition)?;
    let p = doc.partition_for(&g)?;
    let stats = partition_stats(&g, &p)?;
    let fresh = PartitionDocument::new(&g, &p, &stats, doc.config.clone(), None);
    Ok(fresh.report())
}

pub fn run_attributes(partition: &Path, attributes: &Path, out: &Path) -> Result<AttributeSummary> {
    let doc = PartitionDocument::read(partition)?;
    let table = AttributeTable::from_path(attributes)?;
    let summary = summarize_attributes(&doc, &table)?;
    fs::write(out, serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutMode {
    Summary,
    Map,
    Full,
}

impl FromStr for LayoutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "summary" => Ok(LayoutMode::Summary),
            "map" => Ok(LayoutMode::Map),
            "full" => Ok(LayoutMode::Full),
            _ => Err(Error::InvalidArgument(format!("unknown layout mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutConfig {
    pub mode: LayoutMode,
    pub input: PathBuf,
    /// Partition document; must embed a map for `map` and `full`.
    pub partition: PathBuf,
    pub svg: PathBuf,
    pub dot: Option<PathBuf>,
    pub iterations: Option<usize>,
    pub seed: u64,
}

pub struct Drawing {
    pub scene: LayoutScene,
    pub svg: String,
    pub dot: String,
}

fn map_frame(grid: &SomGrid) -> Result<Frame> {
    let height = DRAWING_WIDTH * grid.rows() as f64 / grid.cols() as f64;
    Frame::new(0.0, 0.0, DRAWING_WIDTH, height)
}

fn som_model(doc: &PartitionDocument, g: &WeightedGraph, mode: LayoutMode) -> Result<(SomModel, SomSpace)> {
    let som = doc.som.as_ref().ok_or_else(|| {
        Error::InvalidArgument(format!("layout mode {mode:?} needs a partition produced by a SOM method"))
    })?;
    Ok((som.to_model(g)?, som.space))
}

/// Computes a drawing of the graph at `config.input` without writing files.
pub fn layout(config: &LayoutConfig) -> Result<Drawing> {
    let g = load_graph(&config.input)?;
    let doc = PartitionDocument::read(&config.partition)?;
    let options = SvgOptions::default();
    let (scene, dot) = match config.mode {
        LayoutMode::Summary => {
            let p = doc.partition_for(&g)?;
            let sg = summary_graph(&g, &p)?;
            let iterations = config.iterations.unwrap_or(DEFAULT_SUMMARY_ITERATIONS);
            let frame = Frame::new(0.0, 0.0, DRAWING_WIDTH, DRAWING_WIDTH)?;
            let mut scene = force_directed_layout(&sg, iterations, frame, config.seed)?;
            scene.caption_members(&sg, &g, DEFAULT_LABEL_THRESHOLD);
            let dot = summary_dot(&sg, Some(&scene))?;
            (scene, dot)
        }
        LayoutMode::Map => {
            let (model, space) = som_model(&doc, &g, config.mode)?;
            let umatrix = match space {
                SomSpace::HeatKernel { beta } => {
                    let kernel = heat_kernel(&laplacian(&g), beta)?;
                    u_matrix(&model, SomData::Kernel(&kernel))?
                }
                SomSpace::Spectral { p } => {
                    let points = spectral_embedding(&laplacian(&g), p)?;
                    u_matrix(&model, SomData::Points(points.view()))?
                }
            };
            return map_drawing(&g, &model, Some(&umatrix));
        }
        LayoutMode::Full => {
            let (model, _) = som_model(&doc, &g, config.mode)?;
            let iterations = config.iterations.unwrap_or(DEFAULT_FULL_ITERATIONS);
            let scene = constrained_full_layout(&g, &model, map_frame(&model.grid)?, iterations, config.seed)?;
            let dot = graph_dot(&g, Some(&scene))?;
            (scene, dot)
        }
    };
    let svg = render_svg(&scene, &options);
    Ok(Drawing { scene, svg, dot })
}

/// Cluster glyphs on the cells of a trained map, over its U-matrix when given.
pub fn map_drawing(g: &WeightedGraph, model: &SomModel, umatrix: Option<&UMatrix>) -> Result<Drawing> {
    let sg = summary_graph(g, &som_partition(model).partition)?;
    let mut scene = som_map_scene(model, &sg, map_frame(&model.grid)?)?;
    scene.caption_members(&sg, g, DEFAULT_LABEL_THRESHOLD);
    let options = SvgOptions {
        umatrix: umatrix.map(|u| u.upsample(UMATRIX_UPSAMPLE)),
        ..SvgOptions::default()
    };
    let svg = render_svg(&scene, &options);
    let dot = summary_dot(&sg, Some(&scene))?;
    Ok(Drawing { scene, svg, dot })
}

pub fn run_layout(config: &LayoutConfig) -> Result<Drawing> {
    let drawing = layout(config)?;
    fs::write(&config.svg, &drawing.svg)?;
    if let Some(path) = &config.dot {
        fs::write(path, &drawing.dot)?;
    }
    Ok(drawing)
}
