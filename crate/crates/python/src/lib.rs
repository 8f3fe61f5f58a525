//! Python module `hochlab_py`: algebras, chains, homology and the scenario
//! runner.

use std::path::Path;
use std::sync::Arc;

use hochlab::algebra::{self, AlgebraPresentation};
use hochlab::chain::{self, ComplexKind};
use hochlab::frame;
use hochlab::homology::{self as engine, EngineOptions};
use hochlab::linalg::SparseVector;
use hochlab::norms::{self, NormKind};
use hochlab::rational::{format_q, parse_q};
use hochlab::Q;
use hochlab_cli::{RunOptions, Scenario};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde_json::Value;

create_exception!(hochlab_py, BudgetError, PyException);

fn err(e: hochlab::Error) -> PyErr {
    match e {
        hochlab::Error::Budget { .. } => BudgetError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn enum_from_str<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> PyResult<T> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| PyValueError::new_err(format!("unknown {what} {s:?}")))
}

fn to_python(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_all(xs: &[String]) -> PyResult<Vec<Q>> {
    xs.iter().map(|s| parse_q(s).map_err(err)).collect()
}

fn options(budget_cols: Option<u64>) -> EngineOptions {
    let mut o = EngineOptions::default();
    if let Some(b) = budget_cols {
        o.budget_cols = b;
    }
    o
}

/// A finite-dimensional algebra over the rationals given by structure constants.
#[pyclass(frozen, name = "Algebra")]
struct PyAlgebra(Arc<AlgebraPresentation>);

#[pymethods]
impl PyAlgebra {
    #[staticmethod]
    fn matrix(m: usize) -> PyResult<Self> {
        algebra::matrix_algebra(m).map(Self).map_err(err)
    }

    #[staticmethod]
    fn scalar() -> Self {
        Self(algebra::scalar_algebra())
    }

    #[staticmethod]
    fn square_zero(dim: usize) -> Self {
        Self(algebra::square_zero_algebra(dim))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        AlgebraPresentation::from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn tensor(&self, other: &PyAlgebra) -> PyResult<Self> {
        algebra::tensor_product(&self.0, &other.0).map(Self).map_err(err)
    }

    fn unitization(&self) -> PyResult<Self> {
        algebra::unitization(&self.0).map(|(a, _)| Self(a)).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    #[getter]
    fn is_unital(&self) -> bool {
        self.0.is_unital()
    }

    #[getter]
    fn hash(&self) -> String {
        self.0.hash().to_string()
    }

    /// Product of two coefficient vectors, each a list of `"p/q"` strings.
    fn multiply(&self, x: Vec<String>, y: Vec<String>) -> PyResult<Vec<String>> {
        let d = self.0.dim();
        if x.len() != d || y.len() != d {
            return Err(PyValueError::new_err(format!("expected {d} coefficients")));
        }
        let (x, y) = (SparseVector::from_dense(&parse_all(&x)?), SparseVector::from_dense(&parse_all(&y)?));
        let p = self.0.mul(&x, &y);
        Ok((0..d).map(|i| format_q(&p.get(i))).collect())
    }

    #[pyo3(signature = (max_degree, kind = "hochschild", budget_cols = None))]
    fn homology(&self, max_degree: usize, kind: &str, budget_cols: Option<u64>) -> PyResult<Vec<usize>> {
        let kind: ComplexKind = enum_from_str(kind, "complex kind")?;
        engine::homology(&self.0, kind, max_degree, &options(budget_cols)).map(|r| r.dims()).map_err(err)
    }

    #[pyo3(signature = (max_degree, kind = "hochschild", budget_cols = None))]
    fn cohomology(&self, max_degree: usize, kind: &str, budget_cols: Option<u64>) -> PyResult<Vec<usize>> {
        let kind: ComplexKind = enum_from_str(kind, "complex kind")?;
        engine::cohomology(&self.0, kind, max_degree, &options(budget_cols)).map(|r| r.dims()).map_err(err)
    }

    /// Bar-complex acyclicity up to `max_degree`, as a dict.
    #[pyo3(signature = (max_degree, budget_cols = None))]
    fn h_unital(&self, py: Python<'_>, max_degree: usize, budget_cols: Option<u64>) -> PyResult<Py<PyAny>> {
        let v = engine::is_h_unital_up_to(&self.0, max_degree, &options(budget_cols)).map_err(err)?;
        to_python(py, &serde_json::to_value(v).map_err(|e| PyValueError::new_err(e.to_string()))?)
    }

    fn __repr__(&self) -> String {
        format!("Algebra(dim={}, hash={})", self.0.dim(), &self.0.hash()[..12])
    }
}

/// A homogeneous chain: a rational combination of basis tuples.
#[pyclass(frozen, name = "Chain")]
struct PyChain(chain::Chain);

#[pymethods]
impl PyChain {
    /// `terms` is a list of `(tuple, "p/q")` pairs; every tuple has length `degree + 1`.
    #[new]
    fn new(algebra: &PyAlgebra, degree: usize, terms: Vec<(Vec<usize>, String)>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(t, x)| Ok((t, parse_q(&x).map_err(err)?)))
            .collect::<PyResult<Vec<_>>>()?;
        chain::Chain::from_terms(algebra.0.clone(), degree, terms).map(Self).map_err(err)
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn terms(&self) -> Vec<(Vec<usize>, String)> {
        self.0.terms().map(|(t, x)| (t, format_q(x))).collect()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    #[pyo3(signature = (kind = "hochschild"))]
    fn boundary(&self, kind: &str) -> PyResult<Self> {
        let kind: ComplexKind = enum_from_str(kind, "complex kind")?;
        let out = match kind {
            ComplexKind::Bar => chain::bar_differential(&self.0),
            ComplexKind::Hochschild => chain::hochschild_differential(&self.0),
        };
        out.map(Self).map_err(err)
    }

    fn __add__(&self, other: &PyChain) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &PyChain) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    /// `"p/q"` when the value is exact, otherwise a float string.
    #[pyo3(signature = (kind = "l1"))]
    fn norm(&self, kind: &str) -> PyResult<String> {
        let kind: NormKind = enum_from_str(kind, "norm")?;
        let v = norms::chain_norm(&self.0, kind).map_err(err)?;
        Ok(match v.exact() {
            Some(x) => format_q(x),
            None => v.to_f64().to_string(),
        })
    }

    fn __repr__(&self) -> String {
        format!("Chain(degree={}, nnz={})", self.0.degree(), self.0.nnz())
    }
}

/// The matrix frame `M_{kN}` with its shift structure.
#[pyclass(frozen, name = "ShiftFrame")]
struct PyShiftFrame(frame::ShiftFrame);

#[pymethods]
impl PyShiftFrame {
    #[new]
    #[pyo3(signature = (k, blocks, spare = 1))]
    fn new(k: usize, blocks: usize, spare: usize) -> PyResult<Self> {
        frame::ShiftFrame::new(k, blocks, spare).map(Self).map_err(err)
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    fn index(&self, i: usize, j: usize, t: usize) -> usize {
        self.0.index(i, j, t)
    }

    fn ambient(&self) -> PyAlgebra {
        PyAlgebra(self.0.ambient().clone())
    }

    fn corner(&self) -> PyAlgebra {
        PyAlgebra(self.0.corner_algebra().clone())
    }
}

/// Runs a scenario given as JSON text and returns `(report, exit_code)`.
#[pyfunction]
#[pyo3(signature = (text, base_dir = ".", jobs = None, seed = None))]
fn run_scenario(py: Python<'_>, text: &str, base_dir: &str, jobs: Option<usize>, seed: Option<u64>) -> PyResult<(Py<PyAny>, i32)> {
    let scenario = Scenario::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let opts = RunOptions { jobs, seed, ..RunOptions::default() };
    let outcome = py
        .detach(|| hochlab_cli::run_scenario(&scenario, Path::new(base_dir), &opts))
        .map_err(err)?;
    Ok((to_python(py, &outcome.report)?, outcome.exit_code))
}

#[pymodule]
fn hochlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyChain>()?;
    m.add_class::<PyShiftFrame>()?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    Ok(())
}
