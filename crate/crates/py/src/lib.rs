//! Python module `aor_precond`: matrices, preconditioner specs, AOR
//! iteration matrices, spectral radii, class checks, theorem comparison and
//! sweeps.

use std::path::PathBuf;

use aor_precond::aor::{aor_iteration_matrix, AorParams};
use aor_precond::classes;
use aor_precond::harness::{self, ExperimentConfig, GeneratorConfig, MatrixSource};
use aor_precond::mm::{self, MmLayout};
use aor_precond::preconditioners::{self, PreconditionerSpec};
use aor_precond::spectral::{self, DEFAULT_MAX_ITER, DEFAULT_TOL};
use aor_precond::theorems::{self, CompareOptions};
use aor_precond::{Error, Matrix};
use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for aor_precond::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Dense square matrix of floats.
#[pyclass(name = "Matrix", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyMatrix(pub Matrix);

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Matrix::from_rows(&rows).map(PyMatrix).py()
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyMatrix(Matrix::identity(n))
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn __len__(&self) -> usize {
        self.0.order()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<f64> {
        let n = self.0.order();
        if idx.0 >= n || idx.1 >= n {
            return Err(PyIndexError::new_err(format!("index {idx:?} out of range for order {n}")));
        }
        Ok(self.0[idx])
    }

    fn __repr__(&self) -> String {
        format!("Matrix({:?})", self.0.rows())
    }
}

/// A catalog preconditioner in the text form, e.g. `variant=q4 alpha=0.5`.
#[pyclass(name = "PreconditionerSpec", frozen)]
pub struct PySpec(pub PreconditionerSpec);

#[pymethods]
impl PySpec {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PySpec).py()
    }

    #[getter]
    fn variant(&self) -> u8 {
        self.0.variant().number()
    }

    /// The matrix `Q` for a unit-diagonal `a`.
    fn build_q(&self, a: &PyMatrix) -> PyResult<PyMatrix> {
        preconditioners::build_q(&self.0, &a.0).map(PyMatrix).py()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PreconditionerSpec('{}')", self.0)
    }
}

#[pyfunction]
#[pyo3(signature = (a, eps = 0.0))]
fn classify<'py>(py: Python<'py>, a: &PyMatrix, eps: f64) -> PyResult<Bound<'py, PyDict>> {
    let c = classes::classify(&a.0, eps);
    let d = PyDict::new(py);
    d.set_item("is_z", c.is_z)?;
    d.set_item("is_l", c.is_l)?;
    d.set_item("is_irreducible", c.is_irreducible)?;
    d.set_item("is_nonsingular_m", c.is_nonsingular_m)?;
    d.set_item("is_monotone", c.is_monotone)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (a, eps_pattern = 0.0))]
fn is_irreducible(a: &PyMatrix, eps_pattern: f64) -> bool {
    classes::is_irreducible(&a.0, eps_pattern)
}

#[pyfunction]
#[pyo3(signature = (t, tol = DEFAULT_TOL, max_iter = DEFAULT_MAX_ITER))]
fn spectral_radius(t: &PyMatrix, tol: f64, max_iter: usize) -> PyResult<f64> {
    spectral::spectral_radius(&t.0, tol, max_iter).map(|r| r.rho).py()
}

#[pyfunction]
fn iteration_matrix(a: &PyMatrix, gamma: f64, omega: f64) -> PyResult<PyMatrix> {
    let p = AorParams::new(gamma, omega).py()?;
    aor_iteration_matrix(&a.0, p).map(PyMatrix).py()
}

/// `(I + Q) A`.
#[pyfunction]
fn precondition(a: &PyMatrix, q: &PyMatrix) -> PyResult<PyMatrix> {
    preconditioners::precondition(&a.0, &q.0).map(|s| PyMatrix(s.pa)).py()
}

#[pyfunction]
fn normalize_diag(a: &PyMatrix) -> PyResult<PyMatrix> {
    harness::normalize_diag(&a.0).map(PyMatrix).py()
}

#[pyfunction]
#[pyo3(signature = (n, density, seed, irreducible = false))]
fn gen_l_matrix(n: usize, density: f64, seed: u64, irreducible: bool) -> PyResult<PyMatrix> {
    harness::gen_l_matrix(n, density, irreducible, seed).map(PyMatrix).py()
}

#[pyfunction]
#[pyo3(signature = (n, density, seed, dominance = GeneratorConfig::DEFAULT_DOMINANCE, irreducible = false))]
fn gen_m_matrix(n: usize, density: f64, seed: u64, dominance: f64, irreducible: bool) -> PyResult<PyMatrix> {
    harness::gen_m_matrix_with(n, density, dominance, irreducible, seed).map(PyMatrix).py()
}

/// Radii of the plain and preconditioned AOR iteration matrices with the
/// branch and a verdict per requested theorem.
#[pyfunction]
#[pyo3(signature = (a, spec, gamma, omega, theorems = "A,B,C,D"))]
fn compare<'py>(
    py: Python<'py>,
    a: &PyMatrix,
    spec: &PySpec,
    gamma: f64,
    omega: f64,
    theorems: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let tags = harness::parse_theorems(theorems).py()?;
    let q = preconditioners::build_q(&spec.0, &a.0).py()?;
    let rep = theorems::compare(&a.0, &q, gamma, omega, &tags, &CompareOptions::default()).py()?;
    let d = PyDict::new(py);
    d.set_item("rho_base", rep.rho_base)?;
    d.set_item("rho_pre", rep.rho_pre)?;
    d.set_item("branch", rep.branch.branch.as_str())?;
    let verdicts = PyDict::new(py);
    for (t, v) in &rep.verdicts {
        verdicts.set_item(t.to_string(), v.as_str())?;
    }
    d.set_item("verdicts", verdicts)?;
    let failed = PyDict::new(py);
    for h in rep.hypotheses.iter().filter(|h| !h.passed) {
        failed.set_item(h.theorem.to_string(), h.failed_conditions.clone())?;
    }
    d.set_item("failed_conditions", failed)?;
    Ok(d)
}

/// Runs both counterexample replays; returns `(passed, report)`.
#[pyfunction]
fn replay_counterexamples() -> PyResult<(bool, String)> {
    let rep = harness::replay_counterexamples().py()?;
    Ok((rep.passed(), rep.to_string()))
}

/// Sweeps generated instances (`n,density,kind,seed`) over the grids and
/// returns the summary counts; `out` writes the CSV.
#[pyfunction]
#[pyo3(signature = (gen, precond, instances = 1, gamma_grid = "0:1:0.25", omega_grid = "0:1:0.25", theorems = "A,B,C,D", out = None))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    gen: &str,
    precond: &str,
    instances: usize,
    gamma_grid: &str,
    omega_grid: &str,
    theorems: &str,
    out: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut g: GeneratorConfig = gen.parse().py()?;
    g.instances = instances;
    let mut cfg = ExperimentConfig::new(MatrixSource::Generated(g), precond.parse().py()?);
    cfg.gamma_grid = harness::parse_grid(gamma_grid).py()?;
    cfg.omega_grid = harness::parse_grid(omega_grid).py()?;
    cfg.theorems = harness::parse_theorems(theorems).py()?;
    cfg.output = out;
    let outcome = py.detach(|| harness::run_sweep(&cfg)).py()?;
    let d = PyDict::new(py);
    d.set_item("rows", outcome.records.len())?;
    d.set_item("skipped", outcome.skipped())?;
    d.set_item("refuted", outcome.refuted())?;
    d.set_item("summary", outcome.summary())?;
    Ok(d)
}

#[pyfunction]
fn load_matrix(path: PathBuf) -> PyResult<PyMatrix> {
    mm::load_matrix(path).map(PyMatrix).py()
}

#[pyfunction]
#[pyo3(signature = (path, a, coordinate = false))]
fn save_matrix(path: PathBuf, a: &PyMatrix, coordinate: bool) -> PyResult<()> {
    let layout = if coordinate { MmLayout::Coordinate } else { MmLayout::Array };
    mm::save_matrix(path, &a.0, layout).py()
}

#[pymodule]
#[pyo3(name = "aor_precond")]
pub fn aor_precond_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PySpec>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(is_irreducible, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(iteration_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(precondition, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_diag, m)?)?;
    m.add_function(wrap_pyfunction!(gen_l_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(gen_m_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(replay_counterexamples, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(load_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(save_matrix, m)?)?;
    Ok(())
}
