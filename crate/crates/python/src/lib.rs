//! Python bindings: `import ucp`.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use ucp_core::analytic::{bargmann as bargmann_at, hardy_classify};
use ucp_core::evolution::{self, dissipation_report, dissipation_rows, Equation};
use ucp_core::hermite::hermite_basis as basis;
use ucp_core::localization::{
    annihilation_constant as dense_constant, annihilation_constant_power, faris_constant as faris,
    local_uncertainty_check,
};
use ucp_core::moments::{heisenberg_check, time_frequency_moments};
use ucp_core::prolate::prolate_system;
use ucp_core::sequences::{shapiro_table, OrthonormalSequence};
use ucp_core::sets::SetOnGrid;
use ucp_core::umbrella::{self, Envelope};
use ucp_core::{io, Grid, SampledFunction, UcpError};

fn err(e: UcpError) -> PyErr {
    match e {
        UcpError::PrecisionLoss(_) | UcpError::WindowTooSmall(_) => PyArithmeticError::new_err(e.to_string()),
        UcpError::UnboundedCertificate(_) => PyRuntimeError::new_err(e.to_string()),
        UcpError::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialized report as a plain Python object (dict, list, float...).
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn equation(name: &str) -> PyResult<Equation> {
    match name {
        "heat" => Ok(Equation::Heat),
        "schrodinger" => Ok(Equation::Schrodinger),
        other => Err(PyValueError::new_err(format!("equation must be heat or schrodinger, got {other}"))),
    }
}

#[pyclass(name = "Grid", module = "ucp", frozen)]
#[derive(Clone, Copy)]
struct PyGrid(Grid);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (half_width = 16.0, n = 2048))]
    fn new(half_width: f64, n: usize) -> PyResult<Self> {
        Grid::with_half_width(half_width, n).map(PyGrid).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.0.half_width()
    }

    fn points(&self) -> Vec<f64> {
        self.0.points().collect()
    }

    /// Frequency grid paired with this one by the transform.
    fn dual(&self) -> Self {
        PyGrid(self.0.dual())
    }

    fn __repr__(&self) -> String {
        format!("Grid(half_width={}, n={})", self.0.half_width(), self.0.n())
    }
}

#[pyclass(name = "SampledFunction", module = "ucp")]
#[derive(Clone)]
struct PyFunction(SampledFunction);

#[pymethods]
impl PyFunction {
    #[new]
    fn new(grid: PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        SampledFunction::new(grid.0, values).map(PyFunction).map_err(err)
    }

    /// `c e^{-πax²}`.
    #[staticmethod]
    #[pyo3(signature = (grid, a = 1.0, c = 1.0))]
    fn gaussian(grid: PyGrid, a: f64, c: f64) -> Self {
        PyFunction(SampledFunction::from_real_fn(grid.0, |x| c * (-std::f64::consts::PI * a * x * x).exp()))
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::load(path).map(PyFunction).map_err(err)
    }

    /// Binary unless the path ends in `.json`.
    fn save(&self, path: &str) -> PyResult<()> {
        if path.ends_with(".json") {
            io::save_text(&self.0, path)
        } else {
            io::save_binary(&self.0, path)
        }
        .map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inner(&self, other: &PyFunction) -> PyResult<Complex64> {
        self.0.inner(&other.0).map_err(err)
    }

    fn fourier_transform(&self) -> PyResult<Self> {
        self.0.fourier_transform().map(PyFunction).map_err(err)
    }

    fn inverse_fourier_transform(&self) -> PyResult<Self> {
        self.0.inverse_fourier_transform().map(PyFunction).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }
}

#[pyclass(name = "Envelope", module = "ucp", frozen)]
#[derive(Clone)]
struct PyEnvelope(Envelope);

#[pymethods]
impl PyEnvelope {
    /// `C e^{-πax²}`.
    #[staticmethod]
    fn gaussian(c: f64, a: f64) -> PyResult<Self> {
        Envelope::gaussian(c, a).map(PyEnvelope).map_err(err)
    }

    /// `C (1+|x|)^{-p}`.
    #[staticmethod]
    fn power(c: f64, p: f64) -> PyResult<Self> {
        Envelope::power(c, p).map(PyEnvelope).map_err(err)
    }

    #[staticmethod]
    fn tabulated(f: &PyFunction) -> PyResult<Self> {
        Envelope::tabulated(f.0.clone()).map(PyEnvelope).map_err(err)
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.eval(x)
    }
}

fn sets(grid: &PyGrid, s: &str, sigma: &str) -> PyResult<(SetOnGrid, SetOnGrid)> {
    Ok((
        SetOnGrid::parse(grid.0, s).map_err(err)?,
        SetOnGrid::parse(grid.0.dual(), sigma).map_err(err)?,
    ))
}

#[pyfunction]
fn hermite_basis(grid: PyGrid, k: usize) -> PyResult<Vec<PyFunction>> {
    let b = basis(grid.0, k).map_err(err)?;
    Ok(b.functions().iter().cloned().map(PyFunction).collect())
}

/// `(time, frequency)` moment reports.
#[pyfunction]
fn moments(py: Python<'_>, f: &PyFunction) -> PyResult<(PyObject, PyObject)> {
    let (t, w) = time_frequency_moments(&f.0).map_err(err)?;
    Ok((to_py(py, &t)?, to_py(py, &w)?))
}

#[pyfunction]
fn heisenberg(py: Python<'_>, f: &PyFunction) -> PyResult<PyObject> {
    to_py(py, &heisenberg_check(&f.0).map_err(err)?)
}

/// Mean-dispersion sums for `h_0..h_n`.
#[pyfunction]
fn shapiro(py: Python<'_>, grid: PyGrid, n: usize) -> PyResult<PyObject> {
    let b = basis(grid.0, n).map_err(err)?;
    let seq = OrthonormalSequence::hermite(&b, n + 1).map_err(err)?;
    to_py(py, &shapiro_table(&seq).map_err(err)?)
}

/// `(eigenvalues, functions)` for `[-T, T] × [-Ω, Ω]`.
#[pyfunction]
#[pyo3(signature = (grid, t, omega, count = 16))]
fn prolates(grid: PyGrid, t: f64, omega: f64, count: usize) -> PyResult<(Vec<f64>, Vec<PyFunction>)> {
    let sys = prolate_system(grid.0, t, omega, count).map_err(err)?;
    Ok((
        sys.eigenvalues().to_vec(),
        sys.functions().iter().cloned().map(PyFunction).collect(),
    ))
}

/// `S` is a time-side literal, `sigma` a frequency-side one, e.g. `"-1,1;2,3"`.
#[pyfunction]
#[pyo3(signature = (grid, s, sigma, method = "dense"))]
fn annihilation_constant(py: Python<'_>, grid: PyGrid, s: &str, sigma: &str, method: &str) -> PyResult<PyObject> {
    let (s, sigma) = sets(&grid, s, sigma)?;
    let r = match method {
        "dense" => dense_constant(&s, &sigma),
        "power" => annihilation_constant_power(&s, &sigma),
        other => return Err(PyValueError::new_err(format!("method must be dense or power, got {other}"))),
    }
    .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn faris_constant(alpha: f64, d: u32) -> PyResult<f64> {
    faris(alpha, d).map_err(err)
}

/// Local bound for the transform of `f` on the frequency set `e`.
#[pyfunction]
fn local_uncertainty(py: Python<'_>, f: &PyFunction, e: &str, alpha: f64) -> PyResult<PyObject> {
    let set = SetOnGrid::parse(f.0.grid().dual(), e).map_err(err)?;
    to_py(py, &local_uncertainty_check(&f.0, &set, alpha).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (phi, psi = None))]
fn umbrella_bound(py: Python<'_>, phi: &PyEnvelope, psi: Option<&PyEnvelope>) -> PyResult<PyObject> {
    let psi = psi.unwrap_or(phi);
    to_py(py, &umbrella::umbrella_bound(&phi.0, &psi.0).map_err(err)?)
}

#[pyfunction]
fn gaussian_envelope_bound(c: f64, a: f64) -> PyResult<f64> {
    umbrella::gaussian_envelope_bound(c, a).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, t, equation = "heat"))]
fn propagate(f: &PyFunction, t: f64, equation: &str) -> PyResult<PyFunction> {
    evolution::propagate(&f.0, t, self::equation(equation)?).map(PyFunction).map_err(err)
}

/// Dissipation rows for initial data with spectrum in `sigma`.
#[pyfunction]
fn dissipation(
    py: Python<'_>,
    f: &PyFunction,
    times: Vec<f64>,
    equation: &str,
    s: &str,
    sigma: &str,
) -> PyResult<PyObject> {
    let (s, sigma) = sets(&PyGrid(*f.0.grid()), s, sigma)?;
    let ev = evolution::run(&f.0, &times, self::equation(equation)?).map_err(err)?;
    let reports = dissipation_report(&ev, &s, &sigma).map_err(err)?;
    to_py(py, &dissipation_rows(&ev, &reports))
}

#[pyfunction]
fn bargmann(f: &PyFunction, z: Complex64) -> PyResult<Complex64> {
    bargmann_at(&f.0, z).map_err(err)
}

#[pyfunction]
fn hardy(py: Python<'_>, f: &PyFunction) -> PyResult<PyObject> {
    to_py(py, &hardy_classify(&f.0).map_err(err)?)
}

#[pymodule]
fn ucp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyEnvelope>()?;
    m.add_function(wrap_pyfunction!(hermite_basis, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg, m)?)?;
    m.add_function(wrap_pyfunction!(shapiro, m)?)?;
    m.add_function(wrap_pyfunction!(prolates, m)?)?;
    m.add_function(wrap_pyfunction!(annihilation_constant, m)?)?;
    m.add_function(wrap_pyfunction!(faris_constant, m)?)?;
    m.add_function(wrap_pyfunction!(local_uncertainty, m)?)?;
    m.add_function(wrap_pyfunction!(umbrella_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_envelope_bound, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(dissipation, m)?)?;
    m.add_function(wrap_pyfunction!(bargmann, m)?)?;
    m.add_function(wrap_pyfunction!(hardy, m)?)?;
    Ok(())
}
