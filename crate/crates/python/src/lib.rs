//! Python bindings: graphs, heat kernels, clustering, kernel SOMs and map drawings.

use std::path::PathBuf;

use graphsom::clustering::{self, KMeansResult};
use graphsom::graph::{load_edge_list, load_edge_list_path, LoadOptions};
use graphsom::linalg::{self, KernelMatrix};
use graphsom::pipeline::{self, Method, RunConfig};
use graphsom::som::{self, SomData, SomGrid, SomInit, SomModel, SomOptions, SomSchedule};
use graphsom::{Error, Partition, WeightedGraph};
use ndarray::Array2;
use pyo3::exceptions::{PyArithmeticError, PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e @ (Error::NonFinite | Error::NoConvergence { .. }) => PyArithmeticError::new_err(e.to_string()),
        e @ Error::NotPositiveSemiDefinite { .. } => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<Array2<f64>> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("rows must all have the same length"));
    }
    Array2::from_shape_vec((n, d), rows.into_iter().flatten().collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn partition(g: &WeightedGraph, assignment: &[usize]) -> PyResult<Partition> {
    if assignment.len() != g.order() {
        return Err(PyValueError::new_err(format!(
            "assignment has {} entries for a graph of order {}",
            assignment.len(),
            g.order()
        )));
    }
    Ok(Partition::from_raw(assignment, "python"))
}

fn grid(rows: usize, cols: usize) -> PyResult<SomGrid> {
    SomGrid::new(rows, cols).map_err(to_py)
}

fn som_options(grid: &SomGrid, epochs: usize, seed: u64, init: &str) -> PyResult<SomOptions> {
    let init = match init {
        "principal" => SomInit::PrincipalPlane,
        "dirichlet" => SomInit::Dirichlet,
        other => return Err(PyValueError::new_err(format!("unknown initialization {other:?}"))),
    };
    let schedule = SomSchedule { epochs, ..SomSchedule::default_for(grid) };
    Ok(SomOptions::new(schedule, seed).with_init(init))
}

/// Undirected weighted graph with string vertex labels.
#[pyclass(name = "Graph", module = "pygraphsom", frozen)]
pub struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    /// `edges` holds `(i, j, weight)` triples over indices into `labels`.
    #[new]
    fn new(labels: Vec<String>, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let inner = WeightedGraph::from_edges(labels, edges).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    /// Reads a tab-separated `a b [w]` edge list.
    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let inner = load_edge_list_path(path, LoadOptions::default()).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = load_edge_list(text.as_bytes(), LoadOptions::default()).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<f64> {
        self.inner.degrees()
    }

    fn laplacian(&self) -> Vec<Vec<f64>> {
        rows(graphsom::laplacian(&self.inner).as_array())
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("Graph(order={}, edges={})", self.inner.order(), self.inner.edge_count())
    }
}

/// Symmetric positive semi-definite kernel matrix.
#[pyclass(name = "Kernel", module = "pygraphsom", frozen)]
pub struct PyKernel {
    inner: KernelMatrix,
}

#[pymethods]
impl PyKernel {
    /// `exp(-beta L)` of the graph Laplacian.
    #[staticmethod]
    #[pyo3(signature = (graph, beta = linalg::DEFAULT_BETA))]
    fn heat(py: Python<'_>, graph: &PyGraph, beta: f64) -> PyResult<Self> {
        let g = &graph.inner;
        let inner = py.detach(|| linalg::heat_kernel(&graphsom::laplacian(g), beta)).map_err(to_py)?;
        Ok(PyKernel { inner })
    }

    /// Linear kernel `X Xᵀ` of the rows of `points`.
    #[staticmethod]
    fn gram(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let x = matrix(points)?;
        let inner = KernelMatrix::gram(x.view()).map_err(to_py)?;
        Ok(PyKernel { inner })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn beta(&self) -> Option<f64> {
        self.inner.beta()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.inner.as_array())
    }

    fn __repr__(&self) -> String {
        match self.inner.beta() {
            Some(beta) => format!("Kernel(order={}, beta={beta})", self.inner.order()),
            None => format!("Kernel(order={})", self.inner.order()),
        }
    }
}

/// Result of a k-means run.
#[pyclass(name = "Clustering", module = "pygraphsom", frozen, get_all)]
pub struct PyClustering {
    assignment: Vec<usize>,
    num_clusters: usize,
    within_energy: f64,
    iterations: usize,
    energy_trace: Vec<f64>,
}

impl From<KMeansResult> for PyClustering {
    fn from(r: KMeansResult) -> Self {
        PyClustering {
            num_clusters: r.partition.k(),
            assignment: r.partition.assignment().to_vec(),
            within_energy: r.within_energy,
            iterations: r.iterations,
            energy_trace: r.energy_trace,
        }
    }
}

#[pymethods]
impl PyClustering {
    fn __repr__(&self) -> String {
        format!("Clustering(num_clusters={}, within_energy={})", self.num_clusters, self.within_energy)
    }
}

/// Trained self-organizing map.
#[pyclass(name = "SomMap", module = "pygraphsom", frozen)]
pub struct PySomMap {
    inner: SomModel,
}

#[pymethods]
impl PySomMap {
    #[getter]
    fn rows(&self) -> usize {
        self.inner.grid.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.grid.cols()
    }

    /// Best-matching unit of each vertex, row-major.
    #[getter]
    fn assignment(&self) -> Vec<usize> {
        self.inner.assignment.clone()
    }

    #[getter]
    fn energy_trace(&self) -> Vec<f64> {
        self.inner.energy_trace.clone()
    }

    fn gamma(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.gamma)
    }

    fn unit_sizes(&self) -> Vec<usize> {
        self.inner.unit_sizes()
    }

    /// Vertex clusters numbered over nonempty units.
    fn partition(&self) -> Vec<usize> {
        som::som_partition(&self.inner).partition.assignment().to_vec()
    }

    /// Mean distance from each unit to its grid neighbors, one list per grid row.
    fn u_matrix(&self, kernel: &PyKernel) -> PyResult<Vec<Vec<f64>>> {
        let um = som::u_matrix(&self.inner, SomData::Kernel(&kernel.inner)).map_err(to_py)?;
        Ok(um.values.chunks(self.inner.grid.cols()).map(<[f64]>::to_vec).collect())
    }

    /// Cluster glyphs drawn on the map cells, over the U-matrix when `kernel` is given.
    #[pyo3(signature = (graph, kernel = None))]
    fn map_svg(&self, graph: &PyGraph, kernel: Option<&PyKernel>) -> PyResult<String> {
        let umatrix = kernel
            .map(|k| som::u_matrix(&self.inner, SomData::Kernel(&k.inner)))
            .transpose()
            .map_err(to_py)?;
        let drawing = pipeline::map_drawing(&graph.inner, &self.inner, umatrix.as_ref()).map_err(to_py)?;
        Ok(drawing.svg)
    }

    fn __repr__(&self) -> String {
        format!("SomMap({}x{}, vertices={})", self.rows(), self.cols(), self.inner.vertices())
    }
}

#[pyfunction]
#[pyo3(signature = (points, k, seed = 0, restarts = clustering::DEFAULT_RESTARTS))]
fn kmeans(points: Vec<Vec<f64>>, k: usize, seed: u64, restarts: usize) -> PyResult<PyClustering> {
    let x = matrix(points)?;
    Ok(clustering::kmeans(x.view(), k, seed, restarts).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (kernel, k, seed = 0, restarts = clustering::DEFAULT_RESTARTS))]
fn kernel_kmeans(py: Python<'_>, kernel: &PyKernel, k: usize, seed: u64, restarts: usize) -> PyResult<PyClustering> {
    let kernel = &kernel.inner;
    let result = py.detach(|| clustering::kernel_kmeans(kernel, k, seed, restarts)).map_err(to_py)?;
    Ok(result.into())
}

/// k-means on the `p` smallest Laplacian eigenvectors; `p` defaults to `k`.
#[pyfunction]
#[pyo3(signature = (graph, k, p = None, seed = 0, restarts = clustering::DEFAULT_RESTARTS))]
fn spectral_clustering(
    py: Python<'_>,
    graph: &PyGraph,
    k: usize,
    p: Option<usize>,
    seed: u64,
    restarts: usize,
) -> PyResult<PyClustering> {
    let g = &graph.inner;
    let result =
        py.detach(|| clustering::spectral_clustering(g, p.unwrap_or(k), k, seed, restarts)).map_err(to_py)?;
    Ok(result.into())
}

#[pyfunction]
#[pyo3(signature = (kernel, rows, cols, epochs = som::DEFAULT_EPOCHS, seed = 0, init = "principal"))]
fn kernel_som(
    py: Python<'_>,
    kernel: &PyKernel,
    rows: usize,
    cols: usize,
    epochs: usize,
    seed: u64,
    init: &str,
) -> PyResult<PySomMap> {
    let grid = grid(rows, cols)?;
    let options = som_options(&grid, epochs, seed, init)?;
    let kernel = &kernel.inner;
    let inner = py.detach(|| som::batch_kernel_som(kernel, grid, &options)).map_err(to_py)?;
    Ok(PySomMap { inner })
}

/// Batch SOM on the `p` smallest Laplacian eigenvectors.
#[pyfunction]
#[pyo3(signature = (graph, p, rows, cols, epochs = som::DEFAULT_EPOCHS, seed = 0, init = "principal"))]
#[allow(clippy::too_many_arguments)]
fn spectral_som(
    py: Python<'_>,
    graph: &PyGraph,
    p: usize,
    rows: usize,
    cols: usize,
    epochs: usize,
    seed: u64,
    init: &str,
) -> PyResult<PySomMap> {
    let grid = grid(rows, cols)?;
    let options = som_options(&grid, epochs, seed, init)?;
    let g = &graph.inner;
    let inner = py.detach(|| som::spectral_som(g, p, grid, &options)).map_err(to_py)?;
    Ok(PySomMap { inner })
}

#[pyfunction]
#[pyo3(signature = (graph, assignment, weighted = true))]
fn q_modularity(graph: &PyGraph, assignment: Vec<usize>, weighted: bool) -> PyResult<f64> {
    let p = partition(&graph.inner, &assignment)?;
    if weighted {
        clustering::q_modularity(&graph.inner, &p).map_err(to_py)
    } else {
        clustering::q_modularity_unweighted(&graph.inner, &p).map_err(to_py)
    }
}

#[pyfunction]
fn partition_stats<'py>(py: Python<'py>, graph: &PyGraph, assignment: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let p = partition(&graph.inner, &assignment)?;
    let s = clustering::partition_stats(&graph.inner, &p).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("q_modularity", s.q_modularity)?;
    d.set_item("q_modularity_unweighted", s.q_modularity_unweighted)?;
    d.set_item("num_clusters", s.num_clusters)?;
    d.set_item("num_singletons", s.num_singletons)?;
    d.set_item("max_size", s.max_size)?;
    d.set_item("median_size", s.median_size)?;
    d.set_item("third_quartile_size", s.third_quartile_size)?;
    Ok(d)
}

/// Same as `graphsom cluster`: writes the partition document to `out` and
/// returns the run report as JSON text.
#[pyfunction]
#[pyo3(signature = (input, out, method, k = None, p = None, beta = None, grid = None, epochs = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn cluster_file(
    py: Python<'_>,
    input: PathBuf,
    out: PathBuf,
    method: &str,
    k: Option<usize>,
    p: Option<usize>,
    beta: Option<f64>,
    grid: Option<(usize, usize)>,
    epochs: Option<usize>,
    seed: u64,
) -> PyResult<String> {
    let method: Method = method.parse().map_err(to_py)?;
    let mut config = RunConfig::new(input, method, seed, out);
    if let Some(k) = k {
        config.k = k;
    }
    config.p = p.or(k).unwrap_or(config.p);
    if let Some(beta) = beta {
        config.beta = beta;
    }
    if let Some((rows, cols)) = grid {
        config.grid = Some(SomGrid::new(rows, cols).map_err(to_py)?);
    }
    if let Some(epochs) = epochs {
        config.epochs = epochs;
    }
    let report = py.detach(|| pipeline::run_cluster(&config)).map_err(to_py)?;
    serde_json::to_string_pretty(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn pygraphsom(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyClustering>()?;
    m.add_class::<PySomMap>()?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_clustering, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_som, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_som, m)?)?;
    m.add_function(wrap_pyfunction!(q_modularity, m)?)?;
    m.add_function(wrap_pyfunction!(partition_stats, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_file, m)?)?;
    Ok(())
}
