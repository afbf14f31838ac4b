//! Python bindings for `wikinet`.
//!
//! Structured results cross the boundary as plain dicts and lists built
//! from the JSON form of the Rust types.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use wikinet::centrality::{self, CentralityOptions};
use wikinet::noise::{self, EnsembleOptions, NoiseConfig};
use wikinet::{graph, extract, poset, stats, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::File { .. } | Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(format!("{}: {e}", e.kind())),
    }
}

fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Undirected simple graph with string labels.
#[pyclass(name = "Graph", module = "pywikinet", frozen)]
struct PyGraph {
    inner: wikinet::Graph,
}

impl PyGraph {
    fn id(&self, label: &str) -> PyResult<wikinet::NodeId> {
        self.inner
            .node_id(label)
            .ok_or_else(|| PyValueError::new_err(format!("unknown node {label:?}")))
    }
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from `(a, b)` label pairs. `nodes` fixes the node set
    /// and order; edges naming other labels are then rejected.
    #[new]
    #[pyo3(signature = (edges, nodes=None))]
    fn new(edges: Vec<(String, String)>, nodes: Option<Vec<String>>) -> PyResult<Self> {
        let mut b = wikinet::GraphBuilder::new();
        let fixed = nodes.is_some();
        for label in nodes.unwrap_or_default() {
            b.add_node(&label);
        }
        for (x, y) in &edges {
            let (u, v) = if fixed {
                match (b.node_id(x), b.node_id(y)) {
                    (Some(u), Some(v)) => (u, v),
                    _ => return Err(PyValueError::new_err(format!("edge ({x:?}, {y:?}) names an unknown node"))),
                }
            } else {
                (b.add_node(x), b.add_node(y))
            };
            b.add_edge(u, v);
        }
        Ok(PyGraph { inner: b.build().0 })
    }

    /// Reads a tab-separated edge list and an optional biography list.
    #[staticmethod]
    #[pyo3(signature = (path, nodes=None))]
    fn read(path: std::path::PathBuf, nodes: Option<std::path::PathBuf>) -> PyResult<Self> {
        let (inner, _) = graph::io::load_graph(&path, nodes.as_deref()).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn degree(&self, label: &str) -> PyResult<usize> {
        Ok(self.inner.degree(self.id(label)?))
    }

    fn neighbors(&self, label: &str) -> PyResult<Vec<String>> {
        let v = self.id(label)?;
        Ok(self.inner.neighbors(v).map(|w| self.inner.label(w).to_owned()).collect())
    }

    fn has_edge(&self, a: &str, b: &str) -> PyResult<bool> {
        Ok(self.inner.has_edge(self.id(a)?, self.id(b)?))
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner
            .edges()
            .map(|(u, v)| (self.inner.label(u).to_owned(), self.inner.label(v).to_owned()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

fn options(alpha: f64) -> CentralityOptions {
    CentralityOptions {
        alpha,
        ..Default::default()
    }
}

/// Centrality table and network parameters: `{"table": ..., "parameters": ...}`.
#[pyfunction]
#[pyo3(signature = (graph, alpha=0.85))]
fn analyze<'py>(py: Python<'py>, graph: &PyGraph, alpha: f64) -> PyResult<Bound<'py, PyAny>> {
    let a = py.detach(|| centrality::analyze(&graph.inner, &options(alpha))).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("table", to_object(py, &a.table)?)?;
    out.set_item("parameters", to_object(py, &a.parameters)?)?;
    Ok(out.into_any())
}

#[pyfunction]
fn network_parameters<'py>(py: Python<'py>, graph: &PyGraph) -> PyResult<Bound<'py, PyAny>> {
    let p = py.detach(|| graph::network_parameters(&graph.inner));
    to_object(py, &p)
}

/// One rewiring drawn from stream `index` of `seed`.
#[pyfunction]
#[pyo3(signature = (graph, p, seed, index=0))]
fn rewire<'py>(py: Python<'py>, graph: &PyGraph, p: f64, seed: u64, index: u64) -> PyResult<(PyGraph, Bound<'py, PyAny>)> {
    let mut rng = noise::sample_rng(seed, index);
    let (g, report) = noise::rewire(&graph.inner, p, &mut rng).map_err(to_py)?;
    Ok((PyGraph { inner: g }, to_object(py, &report)?))
}

/// Rewiring ensemble statistics plus the degree-spread regression.
#[pyfunction]
#[pyo3(signature = (graph, p=0.1, samples=1000, seed=20170620, alpha=0.85, top_k=35))]
fn run_ensemble<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    p: f64,
    samples: usize,
    seed: u64,
    alpha: f64,
    top_k: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = NoiseConfig {
        p,
        samples,
        master_seed: seed,
    };
    let opts = EnsembleOptions {
        centrality: options(alpha),
        top_k,
        ..Default::default()
    };
    let ens = py.detach(|| noise::run_ensemble(&graph.inner, &cfg, &opts)).map_err(to_py)?;
    let out = to_object(py, &ens)?;
    let fit = noise::degree_std_regression(&ens).ok();
    out.set_item("degree_std_fit", to_object(py, &fit)?)?;
    Ok(out)
}

#[pyfunction]
fn degree_theory<'py>(py: Python<'py>, k: f64, p: f64, edges: usize) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &noise::degree_theory(k, p, edges).map_err(to_py)?)
}

#[pyfunction]
fn box_stats<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &noise::box_stats(&values).map_err(to_py)?)
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    stats::pearson(&x, &y).map_err(to_py)
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    stats::spearman(&x, &y).map_err(to_py)
}

#[pyfunction]
fn fractional_ranks(values: Vec<f64>) -> Vec<f64> {
    stats::fractional_ranks(&values)
}

#[pyfunction]
#[pyo3(signature = (graph, ratio=1.5))]
fn degree_distribution_fit<'py>(py: Python<'py>, graph: &PyGraph, ratio: f64) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &stats::degree_distribution_fit(&graph.inner, ratio).map_err(to_py)?)
}

fn dag(titles: Vec<String>, ratings: Vec<[f64; 5]>, averages: Option<Vec<f64>>) -> PyResult<poset::HasseDag> {
    let p = poset::DominancePoset::from_ratings(titles, ratings, averages).map_err(to_py)?;
    Ok(p.transitive_reduction())
}

/// Hasse diagram of the dominance order over five-measure ratings, as
/// `{"nodes": [{title, height, average, is_top}], "edges": [[from, to]]}`.
#[pyfunction]
#[pyo3(signature = (titles, ratings, averages=None))]
fn hasse<'py>(
    py: Python<'py>,
    titles: Vec<String>,
    ratings: Vec<[f64; 5]>,
    averages: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let json = dag(titles, ratings, averages)?.to_json().map_err(to_py)?;
    py.import("json")?.call_method1("loads", (json,))
}

#[pyfunction]
#[pyo3(signature = (titles, ratings, averages=None))]
fn hasse_dot(titles: Vec<String>, ratings: Vec<[f64; 5]>, averages: Option<Vec<f64>>) -> PyResult<String> {
    Ok(dag(titles, ratings, averages)?.to_dot())
}

#[pyfunction]
fn normalize_title(raw: &str) -> Option<String> {
    extract::normalize_title(raw)
}

/// First page of a MediaWiki export: `{"title": ..., "out_links": [...]}`.
#[pyfunction]
fn parse_links<'py>(py: Python<'py>, doc_xml: &str) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &extract::parse_links(doc_xml).map_err(to_py)?)
}

#[pyfunction]
fn parse_catalogue<'py>(py: Python<'py>, wikitext: &str) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &extract::parse_catalogue(wikitext))
}

#[pymodule]
fn pywikinet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(network_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(rewire, m)?)?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(degree_theory, m)?)?;
    m.add_function(wrap_pyfunction!(box_stats, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(degree_distribution_fit, m)?)?;
    m.add_function(wrap_pyfunction!(hasse, m)?)?;
    m.add_function(wrap_pyfunction!(hasse_dot, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_title, m)?)?;
    m.add_function(wrap_pyfunction!(parse_links, m)?)?;
    m.add_function(wrap_pyfunction!(parse_catalogue, m)?)?;
    Ok(())
}
