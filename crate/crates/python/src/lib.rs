//! Python bindings: systems, sampled spaces, dynamical balls, classification
//! and the theorem-check suite. Reports cross the boundary as JSON text.

use expanso_core::catalog;
use expanso_core::classify::{self, ClassificationReport, ClassifyParams};
use expanso_core::cli::config::{build_system, ExperimentConfig, SystemSpec};
use expanso_core::space::{build_grid, MetricFn, SampledSpace};
use expanso_core::system::{self as sys, MapSequence};
use expanso_core::verify::{self, SuiteParams};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A non-autonomous system `φ₁, φ₂, …`.
#[pyclass(name = "System", module = "expanso", frozen)]
pub struct PySystem {
    inner: MapSequence,
}

#[pymethods]
impl PySystem {
    /// Catalog system by name.
    #[staticmethod]
    fn from_catalog(name: &str) -> PyResult<Self> {
        Ok(PySystem { inner: catalog::by_name(name).map_err(err)?.system })
    }

    /// System from a JSON spec: a catalog name or an inline affine, matrix
    /// or alternation object.
    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<Self> {
        let spec: SystemSpec = serde_json::from_str(spec).map_err(err)?;
        Ok(PySystem { inner: build_system(&spec).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn invertible(&self) -> bool {
        self.inner.is_invertible()
    }

    #[getter]
    fn equicontinuous(&self) -> bool {
        self.inner.is_equicontinuous()
    }

    /// `φ_n(x)`.
    fn apply(&self, n: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&x)?;
        let mut p = x;
        self.inner.apply(n, &mut p);
        Ok(p)
    }

    /// `φ_i^j(x) = φ_j ∘ … ∘ φ_i(x)`; the identity when `i > j`.
    fn compose(&self, i: usize, j: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&x)?;
        Ok(sys::compose(&self.inner, i, j, &x).to_vec())
    }

    fn iterate(&self, k: usize) -> PyResult<Self> {
        Ok(PySystem { inner: sys::kth_iterate(&self.inner, k).map_err(err)? })
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PySystem { inner: sys::inverse_system(&self.inner).map_err(err)? })
    }

    fn product(&self, other: &PySystem) -> Self {
        PySystem { inner: sys::product(&self.inner, &other.inner) }
    }

    fn __repr__(&self) -> String {
        format!("System({:?}, dim={})", self.inner.name(), self.inner.dim())
    }
}

impl PySystem {
    fn check_dim(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.inner.dim() {
            return Err(err(format!("expected {} coordinates, got {}", self.inner.dim(), x.len())));
        }
        Ok(())
    }
}

/// A finite grid sample of a compact metric space or bounded window.
#[pyclass(name = "Space", module = "expanso", frozen)]
pub struct PySpace {
    inner: SampledSpace,
}

#[pymethods]
impl PySpace {
    /// `metric` is one of `euclidean`, `circle`, `torus`, `lattice`.
    #[staticmethod]
    #[pyo3(signature = (spacing, metric, window = Vec::new(), dimension = None))]
    fn grid(spacing: f64, metric: &str, window: Vec<(f64, f64)>, dimension: Option<usize>) -> PyResult<Self> {
        let m = match metric {
            "euclidean" => MetricFn::euclidean(window.len()),
            "lattice" => MetricFn::lattice(window.len()),
            "circle" => MetricFn::circle(),
            "torus" => MetricFn::torus(dimension.unwrap_or(2)),
            other => return Err(err(format!("unknown metric `{other}`"))),
        };
        Ok(PySpace { inner: build_grid(&window, spacing, m).map_err(err)? })
    }

    /// A catalog system's space by label (its default space when omitted).
    #[staticmethod]
    #[pyo3(signature = (system, label = None))]
    fn from_catalog(system: &str, label: Option<&str>) -> PyResult<Self> {
        let e = catalog::by_name(system).map_err(err)?;
        let inner = match label {
            Some(l) => e.space(l),
            None => e.default_space(),
        };
        Ok(PySpace { inner: inner.map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().iter().map(|p| p.to_vec()).collect()
    }

    fn refine(&self, factor: usize) -> PyResult<Self> {
        Ok(PySpace { inner: self.inner.refine(factor).map_err(err)? })
    }

    fn distance(&self, a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
        self.inner.metric().distance(&a, &b).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Space(points={}, spacing={})", self.inner.len(), self.inner.spacing())
    }
}

/// Classification of one system at one radius.
#[pyclass(name = "Report", module = "expanso", frozen)]
pub struct PyReport {
    inner: ClassificationReport,
}

#[pymethods]
impl PyReport {
    /// Largest ball cardinality when the system looks n-expansive, else None.
    #[getter]
    fn n_expansive(&self) -> Option<usize> {
        self.inner.verdicts().n_expansive
    }

    #[getter]
    fn aleph0(&self) -> bool {
        self.inner.verdicts().aleph0_proxy
    }

    /// None on spaces with isolated points.
    #[getter]
    fn cw(&self) -> Option<bool> {
        self.inner.verdicts().cw_expansive
    }

    #[getter]
    fn meagre(&self) -> bool {
        self.inner.verdicts().meagre_expansive
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        let v = self.inner.verdicts();
        format!(
            "Report(c={}, n_expansive={:?}, aleph0={}, cw={:?}, meagre={})",
            self.inner.c, v.n_expansive, v.aleph0_proxy, v.cw_expansive, v.meagre_expansive
        )
    }
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    catalog::NAMES.iter().map(|s| s.to_string()).collect()
}

/// Members of `S_c(center)` as coordinate lists.
#[pyfunction]
#[pyo3(signature = (system, space, center, c, horizon, bilateral = false))]
fn dynamical_ball(
    py: Python<'_>,
    system: &PySystem,
    space: &PySpace,
    center: Vec<f64>,
    c: f64,
    horizon: usize,
    bilateral: bool,
) -> PyResult<Vec<Vec<f64>>> {
    py.detach(|| {
        let table = sys::build_orbit_table(&system.inner, &space.inner, horizon, bilateral).map_err(err)?;
        let ball = expanso_core::dynamical_ball(&table, &center, c, bilateral).map_err(err)?;
        Ok(ball.members.points(&space.inner).iter().map(|p| p.to_vec()).collect())
    })
}

#[pyfunction(name = "classify")]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (system, space, c, horizon, refinements = None, bilateral = None, seed = 0))]
fn classify_py(
    py: Python<'_>,
    system: &PySystem,
    space: &PySpace,
    c: f64,
    horizon: usize,
    refinements: Option<Vec<usize>>,
    bilateral: Option<bool>,
    seed: u64,
) -> PyResult<PyReport> {
    let params = ClassifyParams::new(c, horizon)
        .with_refinements(refinements.unwrap_or_else(|| vec![2]))
        .with_bilateral(bilateral.unwrap_or(system.inner.is_invertible()))
        .with_seed(seed);
    let inner = py.detach(|| classify::classify(&system.inner, &space.inner, &params)).map_err(err)?;
    Ok(PyReport { inner })
}

/// Classifies every radius of a JSON experiment config.
#[pyfunction]
fn classify_config(py: Python<'_>, config: &str) -> PyResult<Vec<PyReport>> {
    let cfg = ExperimentConfig::parse(config).map_err(err)?;
    let r = cfg.resolve().map_err(err)?;
    py.detach(|| {
        r.params
            .iter()
            .map(|p| classify::classify(&r.system, &r.space, p).map(|inner| PyReport { inner }).map_err(err))
            .collect()
    })
}

/// Largest generator intersection over seeded bisequences.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (system, space, horizon, cover_radius, num_sequences, seq_length, seed = 0))]
fn generator_check(
    py: Python<'_>,
    system: &PySystem,
    space: &PySpace,
    horizon: usize,
    cover_radius: f64,
    num_sequences: usize,
    seq_length: usize,
    seed: u64,
) -> PyResult<usize> {
    py.detach(|| {
        let table = sys::build_orbit_table(&system.inner, &space.inner, horizon, true).map_err(err)?;
        let g = classify::generator_check(&table, cover_radius, num_sequences, seq_length, seed).map_err(err)?;
        Ok(g.max_intersection_cardinality)
    })
}

/// Theorem-check suite over the catalog; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (only = Vec::new(), seed = 0))]
fn run_suite(py: Python<'_>, only: Vec<String>, seed: u64) -> PyResult<String> {
    let params = SuiteParams { only, seed, ..SuiteParams::default() };
    let report = py.detach(|| verify::run_default(&params)).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[pymodule]
fn expanso(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(dynamical_ball, m)?)?;
    m.add_function(wrap_pyfunction!(classify_py, m)?)?;
    m.add_function(wrap_pyfunction!(classify_config, m)?)?;
    m.add_function(wrap_pyfunction!(generator_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
