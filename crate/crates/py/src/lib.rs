//! Python bindings for the dlpbound core library.

use std::sync::Arc;

use num_traits::ToPrimitive;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dlpbound_core::certify::{self, DualCertificate as CoreCert, VerificationReport, VerifyOptions};
use dlpbound_core::closedform;
use dlpbound_core::exactnum::{BoundValue, Rounding};
use dlpbound_core::lp::{FloatSolution as CoreSolution, Limits};
use dlpbound_core::orbits::{enumerate_reps, Params as CoreParams};
use dlpbound_core::pipeline::{self, RunConfig};
use dlpbound_core::symdft::{Backend, SymDftMatrix};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

#[pyclass(frozen, skip_from_py_object, name = "Params")]
#[derive(Clone)]
struct Params {
    inner: CoreParams,
}

#[pymethods]
impl Params {
    #[new]
    fn new(d: u32, m: u32, r2: u64) -> PyResult<Self> {
        CoreParams::new(d, m, r2).map(|inner| Params { inner }).map_err(value_err)
    }

    #[getter]
    fn d(&self) -> u32 {
        self.inner.d
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m
    }

    #[getter]
    fn r2(&self) -> u64 {
        self.inner.r2
    }

    fn __repr__(&self) -> String {
        format!("Params(d={}, m={}, r2={})", self.inner.d, self.inner.m, self.inner.r2)
    }
}

/// Symmetrized Fourier matrix over orbit representatives.
#[pyclass(frozen, name = "Matrix")]
struct Matrix {
    inner: Arc<SymDftMatrix>,
}

#[pymethods]
impl Matrix {
    #[new]
    #[pyo3(signature = (d, m, exact = false))]
    fn new(d: u32, m: u32, exact: bool) -> PyResult<Self> {
        let index = enumerate_reps(d, m).map_err(value_err)?;
        let backend = if exact { Backend::Exact } else { Backend::Float64 };
        let inner = SymDftMatrix::build(Arc::new(index), backend).map_err(value_err)?;
        Ok(Matrix { inner: Arc::new(inner) })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.len();
        if i >= n || j >= n {
            return Err(value_err(format!("index out of range for {n} representatives")));
        }
        Ok(self.inner.get(i, j))
    }

    fn reps(&self) -> Vec<Vec<u32>> {
        self.inner.index().reps().iter().map(|r| r.coords().to_vec()).collect()
    }

    fn apply(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&v).map_err(value_err)
    }

    fn apply_transpose(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply_transpose(&v).map_err(value_err)
    }
}

/// Floating LP solution (dual or primal).
#[pyclass(frozen, name = "FloatSolution")]
struct FloatSolution {
    inner: CoreSolution,
}

#[pymethods]
impl FloatSolution {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        text.parse().map(|inner| FloatSolution { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn status(&self) -> String {
        self.inner.status.to_string()
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }

    #[getter]
    fn values(&self) -> Vec<(Vec<u32>, f64)> {
        self.inner
            .entries
            .iter()
            .map(|(r, v)| (r.coords().to_vec(), *v))
            .collect()
    }

    /// Rounds to an exact certificate; `scheme` is `auto`, `lattice:q` or `denom:Q`.
    #[pyo3(signature = (scheme = "auto"))]
    fn rationalize(&self, scheme: &str) -> PyResult<Certificate> {
        let scheme = scheme.parse().map_err(value_err)?;
        certify::rationalize(&self.inner, scheme)
            .map(|inner| Certificate { inner })
            .map_err(value_err)
    }
}

#[pyclass(frozen, name = "Report")]
struct Report {
    inner: VerificationReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn verified(&self) -> bool {
        self.inner.is_verified()
    }

    #[getter]
    fn status(&self) -> String {
        self.inner.render().lines().next().unwrap_or_default().trim_start_matches("status: ").to_string()
    }

    /// Exact objective as `q*sqrt(n)` terms.
    #[getter]
    fn objective(&self) -> String {
        self.inner.objective.to_string()
    }

    #[getter]
    fn objective_float(&self) -> f64 {
        self.inner.objective.to_f64()
    }

    #[getter]
    fn lower_bound(&self) -> String {
        self.inner.decimal_lower_bound.clone()
    }

    #[getter]
    fn exceeds_packing(&self) -> Option<bool> {
        self.inner.comparison.exceeds_packing
    }

    #[getter]
    fn exceeds_upper(&self) -> Option<bool> {
        self.inner.comparison.exceeds_upper
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!("Report(status={:?}, lower_bound={})", self.status(), self.inner.decimal_lower_bound)
    }
}

/// Exact dual certificate.
#[pyclass(frozen, name = "Certificate")]
struct Certificate {
    inner: CoreCert,
}

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        text.parse().map(|inner| Certificate { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn params(&self) -> Params {
        Params { inner: self.inner.params }
    }

    /// Stored entries as `(coords, "p/q")`.
    #[getter]
    fn mu(&self) -> Vec<(Vec<u32>, String)> {
        self.inner
            .mu
            .iter()
            .map(|(r, v)| (r.coords().to_vec(), dlpbound_core::exactnum::format_rational(v)))
            .collect()
    }

    fn objective(&self) -> String {
        certify::objective(&self.inner).to_string()
    }

    #[pyo3(signature = (digits = 8, max_bits = None))]
    fn verify(&self, py: Python<'_>, digits: u32, max_bits: Option<u64>) -> PyResult<Report> {
        let opts = VerifyOptions {
            digits,
            max_bits: max_bits.unwrap_or_else(pipeline::env_max_bits),
        };
        let cert = self.inner.clone();
        py.detach(move || certify::verify(&cert, &opts))
            .map(|inner| Report { inner })
            .map_err(runtime_err)
    }
}

#[pyfunction]
fn reps(d: u32, m: u32) -> PyResult<Vec<(Vec<u32>, u64, u64)>> {
    let index = enumerate_reps(d, m).map_err(value_err)?;
    Ok((0..index.len())
        .map(|i| (index.rep(i).coords().to_vec(), index.norm_sq(i), index.orbit_size(i)))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (d, m, r2, eps = 1e-10))]
fn solve_dual(py: Python<'_>, d: u32, m: u32, r2: u64, eps: f64) -> PyResult<FloatSolution> {
    let params = CoreParams::new(d, m, r2).map_err(value_err)?;
    py.detach(move || {
        let index = enumerate_reps(d, m).map_err(value_err)?;
        let matrix = SymDftMatrix::build(Arc::new(index), Backend::Float64).map_err(value_err)?;
        pipeline::solve_dual(&params, &matrix, eps, &Limits::default()).map_err(runtime_err)
    })
    .map(|inner| FloatSolution { inner })
}

#[pyfunction]
#[pyo3(signature = (d, m, r2, eps = 1e-10, scheme = "auto"))]
fn run_pipeline(py: Python<'_>, d: u32, m: u32, r2: u64, eps: f64, scheme: &str) -> PyResult<(Certificate, Report)> {
    let mut cfg = RunConfig::new(CoreParams::new(d, m, r2).map_err(value_err)?);
    cfg.eps = eps;
    cfg.scheme = scheme.parse().map_err(value_err)?;
    let out = py.detach(move || pipeline::pipeline(&cfg)).map_err(runtime_err)?;
    Ok((Certificate { inner: out.certificate }, Report { inner: out.report }))
}

/// Runs a named preset; returns `(expectation_met, rendered report)`.
#[pyfunction]
#[pyo3(signature = (name, allow_long = false))]
fn run_preset(py: Python<'_>, name: String, allow_long: bool) -> PyResult<(bool, String)> {
    let out = py.detach(move || pipeline::run_preset(&name, allow_long)).map_err(runtime_err)?;
    Ok((out.expectation_met, out.render()))
}

#[pyfunction]
fn preset_names() -> Vec<String> {
    pipeline::presets().into_iter().map(|p| p.name).collect()
}

/// Closed-form certificate at `m = 4`, `r^2 = 4`.
#[pyfunction]
fn closed_form(py: Python<'_>, d: u32) -> PyResult<Certificate> {
    py.detach(move || {
        let table = closedform::table_for(d).map_err(value_err)?;
        let matrix = closedform::matrix_m4(d).map_err(value_err)?;
        closedform::certificate_from_lambda(&table, &matrix).map_err(runtime_err)
    })
    .map(|inner| Certificate { inner })
}

#[pyfunction]
fn krawtchouk(j: u32, i: u32, n: u32) -> PyResult<i64> {
    let v = closedform::krawtchouk(j, i, n).map_err(value_err)?;
    v.to_i64().ok_or_else(|| value_err("value does not fit in 64 bits"))
}

/// Comparison against known densities; `bound` accepts rationals, decimals and `q*sqrt(n)` sums.
#[pyfunction]
fn compare(d: u32, bound: &str) -> PyResult<String> {
    let b: BoundValue = bound.parse().map_err(value_err)?;
    Ok(format!(
        "bound: {} = {}\n{}",
        b,
        b.to_decimal(8, Rounding::Floor),
        certify::compare_known(d, &b).render()
    ))
}

#[pymodule]
fn dlpbound(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_class::<Matrix>()?;
    m.add_class::<FloatSolution>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(reps, m)?)?;
    m.add_function(wrap_pyfunction!(solve_dual, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(krawtchouk, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
