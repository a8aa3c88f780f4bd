//! Python bindings. Structured configs and reports cross the boundary as JSON
//! strings so the Python side can use plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use metricreg::harness::compare::{compare as run_compare, CompareConfig};
use metricreg::harness::generator::{generate as gen, GeneratorSpec};
use metricreg::phased::PhasedConfig;
use metricreg::{
    BandwidthSchedule, Dataset, EigenvalueProfile, LabeledExample, SymMatrix,
};

fn err(e: metricreg::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("invalid JSON: {e}"))
}

fn profile(eigenvalues: Vec<f64>) -> PyResult<EigenvalueProfile> {
    EigenvalueProfile::new(eigenvalues).map_err(err)
}

fn examples(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> PyResult<Vec<LabeledExample>> {
    if xs.len() != ys.len() {
        return Err(PyValueError::new_err("xs and ys differ in length"));
    }
    xs.into_iter()
        .zip(ys)
        .map(|(x, y)| LabeledExample::new(x, y).map_err(err))
        .collect()
}

/// Mahalanobis metric built from a positive definite matrix, spectrally
/// normalized so the top eigenvalue is 1.
#[pyclass(module = "pymetricreg")]
#[derive(Clone)]
struct Metric {
    inner: metricreg::Metric,
}

#[pymethods]
impl Metric {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let m = SymMatrix::from_rows(&rows).map_err(err)?;
        Ok(Metric { inner: metricreg::spectral_normalize(&m).map_err(err)? })
    }

    #[staticmethod]
    fn identity(dim: usize) -> Self {
        Metric { inner: metricreg::Metric::identity(dim) }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    #[getter]
    fn eigenvectors(&self) -> Vec<Vec<f64>> {
        self.inner.spectrum().vectors.clone()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inner.matrix().rows()
    }

    fn distance(&self, x: Vec<f64>, z: Vec<f64>) -> PyResult<f64> {
        self.inner.distance(&x, &z).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Metric(dim={}, eigenvalues={:?})", self.inner.dim(), self.inner.eigenvalues())
    }
}

/// Online nearest-center regressor on an adaptive ellipsoid packing.
#[pyclass(module = "pymetricreg")]
struct OnlineRegressor {
    inner: metricreg::OnlineRegressor,
}

#[pymethods]
impl OnlineRegressor {
    #[new]
    fn new(metric: &Metric) -> Self {
        OnlineRegressor { inner: metricreg::OnlineRegressor::new(metric.inner.clone()) }
    }

    /// Predicts, then updates on (x, y). Returns the step outcome as a dict-ready JSON string.
    fn step(&mut self, x: Vec<f64>, y: f64) -> PyResult<String> {
        let ex = LabeledExample::new(x, y).map_err(err)?;
        let out = self.inner.step(&ex).map_err(err)?;
        serde_json::to_string(&out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn predictions(&mut self, xs: Vec<Vec<f64>>, ys: Vec<f64>) -> PyResult<Vec<f64>> {
        examples(xs, ys)?
            .iter()
            .map(|ex| self.inner.step(ex).map(|o| o.prediction).map_err(err))
            .collect()
    }

    #[getter]
    fn round(&self) -> usize {
        self.inner.round()
    }

    #[getter]
    fn n_centers(&self) -> usize {
        self.inner.centers().len()
    }

    /// Radius in force at the latest round.
    #[getter]
    fn radius(&self) -> f64 {
        self.inner.current_radius()
    }

    fn anchors(&self) -> Vec<Vec<f64>> {
        self.inner.centers().iter().map(|c| c.anchor.clone()).collect()
    }
}

#[pyfunction]
fn kappa(eigenvalues: Vec<f64>, r: usize, t: f64) -> PyResult<usize> {
    metricreg::kappa(&profile(eigenvalues)?, r, t).map_err(err)
}

#[pyfunction]
fn effective_rank(eigenvalues: Vec<f64>, t: f64) -> PyResult<usize> {
    metricreg::effective_rank(&profile(eigenvalues)?, t).map_err(err)
}

#[pyfunction]
fn kappa_tilde(eigenvalues: Vec<f64>, gamma_bar: f64, r: usize, t: f64) -> PyResult<usize> {
    metricreg::kappa_tilde(&profile(eigenvalues)?, gamma_bar, r, t).map_err(err)
}

#[pyfunction]
fn effective_rank_tilde(eigenvalues: Vec<f64>, gamma_bar: f64, t: f64) -> PyResult<usize> {
    metricreg::effective_rank_tilde(&profile(eigenvalues)?, gamma_bar, t).map_err(err)
}

/// Gradient outer product estimate; returns (matrix rows, diagnostics JSON).
#[pyfunction]
#[pyo3(signature = (xs, ys, c_eps=1.0, c_tau=1.0, tau0=1.0, rate=None))]
fn estimate_gop(
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    c_eps: f64,
    c_tau: f64,
    tau0: f64,
    rate: Option<f64>,
) -> PyResult<(Vec<Vec<f64>>, String)> {
    let data = Dataset::from_examples(&examples(xs, ys)?).map_err(err)?;
    let schedule = BandwidthSchedule { c_eps, c_tau, tau0, rate, ..Default::default() };
    let est = metricreg::estimate_gop(&data, &schedule).map_err(err)?;
    Ok((est.matrix.rows(), est.diagnostics().to_string()))
}

/// Runs the phased learner; `config` is a JSON object (empty for defaults).
/// Returns (predictions, per-round phase labels, phase diagnostics JSON).
#[pyfunction]
#[pyo3(signature = (xs, ys, config="{}"))]
fn run_phased(
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    config: &str,
) -> PyResult<(Vec<f64>, Vec<usize>, String)> {
    let cfg: PhasedConfig = if config.trim() == "{}" {
        PhasedConfig::default()
    } else {
        serde_json::from_str(config).map_err(json_err)?
    };
    let run = metricreg::run_phased(&examples(xs, ys)?, &cfg).map_err(err)?;
    let preds = run.outcomes.iter().map(|o| o.outcome.prediction).collect();
    let phases = run.outcomes.iter().map(|o| o.phase).collect();
    let diag = serde_json::to_string(&run.phases).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((preds, phases, diag))
}

/// Single-index synthetic data; returns (xs, ys, oracle JSON).
#[pyfunction]
#[pyo3(signature = (dim, n, seed=0, noise=0.05, spec=None))]
fn generate(
    dim: usize,
    n: usize,
    seed: u64,
    noise: f64,
    spec: Option<&str>,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, String)> {
    let spec = match spec {
        Some(s) => serde_json::from_str::<GeneratorSpec>(s).map_err(json_err)?,
        None => GeneratorSpec::single_index(dim, noise, seed),
    };
    let (stream, oracle) = gen(&spec, n).map_err(err)?;
    let ys = stream.iter().map(|e| e.y).collect();
    let xs = stream.into_iter().map(|e| e.x).collect();
    let oracle = serde_json::to_string(&oracle).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((xs, ys, oracle))
}

/// Identity / oracle / learned comparison; `config` and the result are JSON.
#[pyfunction]
fn compare(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg: CompareConfig = serde_json::from_str(config).map_err(json_err)?;
    let report = py.allow_threads(|| run_compare(&cfg)).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn pymetricreg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Metric>()?;
    m.add_class::<OnlineRegressor>()?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(effective_rank, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(effective_rank_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_gop, m)?)?;
    m.add_function(wrap_pyfunction!(run_phased, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
