//! Python bindings: graphs, generators, spectra, metrics and evolution runs.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectra_evolve_core::{
    engine, generators, io, metrics, operators, spectral, Error, EvolutionConfig, ExperimentConfig, Graph,
    MutationParams,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::EigenFailure | Error::GeneratorExhausted { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph", eq, module = "spectra_evolve", skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyGraph {
    inner: Graph,
}

impl From<Graph> for PyGraph {
    fn from(inner: Graph) -> Self {
        PyGraph { inner }
    }
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("graph needs at least one vertex"));
        }
        Graph::from_edges(n, edges).map(Into::into).map_err(to_py)
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        io::parse_edge_list(text).map(Into::into).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::load_edge_list(path).map(Into::into).map_err(to_py)
    }

    fn to_edge_list(&self) -> String {
        io::edge_list_string(&self.inner)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::save_edge_list(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.inner.n() && v < self.inner.n() && self.inner.has_edge(u, v)
    }

    fn degree(&self, v: usize) -> PyResult<usize> {
        if v >= self.inner.n() {
            return Err(to_py(Error::VertexOutOfRange { vertex: v, n: self.inner.n() }));
        }
        Ok(self.inner.degree(v))
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees().to_vec()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(to_py(Error::VertexOutOfRange { vertex: v, n: self.inner.n() }));
        }
        Ok(self.inner.neighbors(v).collect())
    }

    fn add_edge(&mut self, u: usize, v: usize) -> PyResult<()> {
        self.inner.add_edge(u, v).map_err(to_py)
    }

    fn remove_edge(&mut self, u: usize, v: usize) -> PyResult<()> {
        self.inner.remove_edge(u, v).map_err(to_py)
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn complement(&self) -> Self {
        self.inner.complement().into()
    }

    fn relabeled(&self, perm: Vec<usize>) -> PyResult<Self> {
        self.inner.relabeled(&perm).map(Into::into).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

#[pyfunction]
fn star(n: usize) -> PyResult<PyGraph> {
    generators::make_star(n).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn circulant(n: usize, offsets: Vec<usize>) -> PyResult<PyGraph> {
    generators::make_circulant(n, &offsets).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, p=generators::InitFamily::DEFAULT_ER_P, seed=0))]
fn erdos_renyi(n: usize, p: f64, seed: u64) -> PyResult<PyGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generators::make_erdos_renyi(n, p, &mut rng).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, m0=generators::InitFamily::DEFAULT_BA_M0, m=generators::InitFamily::DEFAULT_BA_M, seed=0))]
fn barabasi_albert(n: usize, m0: usize, m: usize, seed: u64) -> PyResult<PyGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generators::make_barabasi_albert(n, m0, m, &mut rng).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, k=generators::InitFamily::DEFAULT_WS_K, beta=generators::InitFamily::DEFAULT_WS_BETA, seed=0))]
fn watts_strogatz(n: usize, k: usize, beta: f64, seed: u64) -> PyResult<PyGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generators::make_watts_strogatz(n, k, beta, &mut rng).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, k, seed=0))]
fn random_regular(n: usize, k: usize, seed: u64) -> PyResult<PyGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generators::make_random_regular(n, k, &mut rng).map(Into::into).map_err(to_py)
}

/// Sorted normalized-Laplacian eigenvalues.
#[pyfunction]
fn eigenvalues(g: &PyGraph) -> PyResult<Vec<f64>> {
    spectral::eigen_spectrum(&g.inner).map(|s| s.eigenvalues).map_err(to_py)
}

#[pyfunction]
fn algebraic_connectivity(g: &PyGraph) -> PyResult<f64> {
    spectral::algebraic_connectivity(&g.inner).map_err(to_py)
}

/// Spectral density on the default grid as `(xs, phis)`.
#[pyfunction]
fn density(g: &PyGraph) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = spectral::density(&spectral::eigen_spectrum(&g.inner).map_err(to_py)?);
    Ok((grid.xs, grid.phis))
}

/// L1 distance between the spectral densities of two graphs of equal size.
#[pyfunction]
fn spectral_distance(a: &PyGraph, b: &PyGraph) -> PyResult<f64> {
    let da = spectral::density(&spectral::eigen_spectrum(&a.inner).map_err(to_py)?);
    let db = spectral::density(&spectral::eigen_spectrum(&b.inner).map_err(to_py)?);
    spectral::spectral_distance(&da, &db).map_err(to_py)
}

/// Fiedler split as `(cluster_a, cluster_b)`.
#[pyfunction]
fn fiedler_bisection(g: &PyGraph) -> PyResult<(Vec<usize>, Vec<usize>)> {
    spectral::fiedler_bisection(&g.inner)
        .map(|b| (b.cluster_a, b.cluster_b))
        .map_err(to_py)
}

#[pyfunction]
fn graph_metrics<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let s = metrics::MetricSample::compute("", &g.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("ac", s.ac)?;
    d.set_item("pl", s.pl)?;
    d.set_item("cc", s.cc)?;
    d.set_item("bc", s.bc)?;
    Ok(d)
}

/// Gap-product contributions in input order; extremes are `inf`.
#[pyfunction]
fn diversity(values: Vec<f64>) -> PyResult<Vec<f64>> {
    let report = metrics::diversity_contributions(&values).map_err(to_py)?;
    Ok((0..values.len()).map(|i| report.contribution_of(i)).collect())
}

/// One mutation step of `g`, steered by the algebraic connectivity of `target`.
#[pyfunction]
#[pyo3(signature = (g, target, seed=0, alpha=0.75, beta=4, lambda2_threshold=0.001))]
fn mutate(g: &PyGraph, target: &PyGraph, seed: u64, alpha: f64, beta: usize, lambda2_threshold: f64) -> PyResult<PyGraph> {
    let params = MutationParams {
        alpha,
        beta,
        lambda2_threshold,
    };
    let tgt = engine::Target::new(target.inner.clone()).map_err(to_py)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    operators::mutate(&g.inner, tgt.lambda2, &params, &mut rng)
        .map(Into::into)
        .map_err(to_py)
}

fn record_dict<'py>(py: Python<'py>, rec: &engine::RunRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("seed", rec.seed)?;
    d.set_item("target_lambda2", rec.target_lambda2)?;
    d.set_item("initial_best", rec.initial_best)?;
    d.set_item("best", rec.best.clone())?;
    d.set_item("mean", rec.mean.clone())?;
    d.set_item("repair_edges", rec.repair_edges.clone())?;
    d.set_item("final_fitness", rec.final_fitness.clone())?;
    let finals: Vec<PyGraph> = rec.final_population.iter().cloned().map(Into::into).collect();
    d.set_item("final_population", finals)?;
    Ok(d)
}

/// Runs one evolution from `key = value` config text (only the evolution
/// keys matter; `runs` and output settings are ignored).
#[pyfunction]
fn run_evolution<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg: EvolutionConfig = ExperimentConfig::parse(config).map_err(to_py)?.evolution;
    let rec = py.detach(|| engine::run_evolution(&cfg)).map_err(to_py)?;
    record_dict(py, &rec)
}

#[pymodule]
fn spectra_evolve(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(star, m)?)?;
    m.add_function(wrap_pyfunction!(circulant, m)?)?;
    m.add_function(wrap_pyfunction!(erdos_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(barabasi_albert, m)?)?;
    m.add_function(wrap_pyfunction!(watts_strogatz, m)?)?;
    m.add_function(wrap_pyfunction!(random_regular, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(algebraic_connectivity, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_distance, m)?)?;
    m.add_function(wrap_pyfunction!(fiedler_bisection, m)?)?;
    m.add_function(wrap_pyfunction!(graph_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(diversity, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(run_evolution, m)?)?;
    Ok(())
}
