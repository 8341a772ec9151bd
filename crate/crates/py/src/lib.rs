//! Python bindings: schemes, problems, integration runs, and stability scans.
//!
//! Build with `cargo build -p geptrkn-py --release`; the produced cdylib
//! imports as `geptrkn_py` (see `python/smoke_test.py` for a loader).

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use geptrkn::collocation::{CollocationScheme, NodeSet};
use geptrkn::integrator::{self, ControllerConfig, LteMode};
use geptrkn::linalg::Mat;
use geptrkn::problems::{self, OdeProblem};
use geptrkn::reference;
use geptrkn::serialize;
use geptrkn::{methods, stability};

fn err_py(e: geptrkn::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mat_to_lists(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// A derived collocation method (nodes plus all weight objects).
#[pyclass(frozen)]
struct Scheme {
    inner: CollocationScheme,
}

#[pymethods]
impl Scheme {
    /// Derives the coefficients for a set of distinct collocation nodes.
    #[new]
    fn new(nodes: Vec<f64>) -> PyResult<Self> {
        let nodes = NodeSet::new(nodes).map_err(err_py)?;
        Ok(Scheme {
            inner: CollocationScheme::from_nodes(nodes).map_err(err_py)?,
        })
    }

    /// Looks up a built-in method (geptrkn5..geptrkn8, geptrkn54, pair names).
    #[staticmethod]
    fn by_name(name: &str) -> PyResult<Self> {
        Ok(Scheme {
            inner: methods::method_scheme(name).map_err(err_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Scheme {
            inner: serialize::scheme_from_json(text).map_err(err_py)?,
        })
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    #[getter]
    fn step_order(&self) -> usize {
        self.inner.step_order()
    }

    #[getter]
    fn stage_order(&self) -> usize {
        self.inner.stage_order()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.node_slice().to_vec()
    }

    #[getter]
    fn step_weights(&self) -> Vec<f64> {
        self.inner.step_weights().to_vec()
    }

    #[getter]
    fn step_deriv_weights(&self) -> Vec<f64> {
        self.inner.step_deriv_weights().to_vec()
    }

    #[getter]
    fn stage_weights(&self) -> Vec<Vec<f64>> {
        mat_to_lists(self.inner.stage_weights())
    }

    #[getter]
    fn stage_deriv_weights(&self) -> Vec<Vec<f64>> {
        mat_to_lists(self.inner.stage_deriv_weights())
    }

    /// Orthogonality integrals of the node polynomial and the certified order.
    fn orthogonality<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rep = self.inner.orthogonality();
        let d = PyDict::new(py);
        d.set_item("r0", rep.r0)?;
        d.set_item("r1", rep.r1)?;
        d.set_item("r_double", rep.r_double)?;
        d.set_item("satisfied_order", rep.satisfied_order)?;
        Ok(d)
    }

    /// Stage matrices A(q), B(q) for a step-size ratio q.
    #[allow(clippy::type_complexity)]
    fn variable_coefficients(&self, q: f64) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let (a, b) = self.inner.variable_coefficients(q).map_err(err_py)?;
        Ok((mat_to_lists(&a), mat_to_lists(&b)))
    }

    /// Continuous-extension weights at a step fraction xi in [0, 1].
    fn dense_weights(&self, xi: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        self.inner.dense_weights(xi).map_err(err_py)
    }

    /// Amplification matrix for the test equation at (z, nu).
    fn stability_matrix(&self, z: f64, nu: f64) -> Vec<Vec<f64>> {
        mat_to_lists(&stability::stability_matrix(&self.inner, z, nu))
    }

    fn to_json(&self) -> String {
        serialize::scheme_to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scheme(s={}, step_order={})",
            self.inner.s(),
            self.inner.step_order()
        )
    }
}

/// A second-order initial value problem y'' = f(t, y, y').
#[pyclass(frozen)]
struct Problem {
    inner: OdeProblem,
}

#[pymethods]
impl Problem {
    /// Damped forced linear oscillator with closed-form solution at c = lam = 2.
    #[staticmethod]
    #[pyo3(signature = (c=2.0, lam=2.0, t_end=10.0))]
    fn line(c: f64, lam: f64, t_end: f64) -> Self {
        Problem {
            inner: problems::line_problem(c, lam, t_end),
        }
    }

    /// Van der Pol oscillator on [0, 10].
    #[staticmethod]
    #[pyo3(signature = (mu=1.0))]
    fn vand(mu: f64) -> Self {
        Problem {
            inner: problems::vand_problem(mu),
        }
    }

    /// Telegraph equation semi-discretized at n-1 interior Chebyshev points.
    #[staticmethod]
    #[pyo3(signature = (a=0.01, gamma=1.0, kappa=0.0, n=11))]
    fn tele(a: f64, gamma: f64, kappa: f64, n: usize) -> Self {
        Problem {
            inner: problems::tele_problem(a, gamma, kappa, n),
        }
    }

    /// Registry lookup by name with numeric parameter overrides.
    #[staticmethod]
    #[pyo3(signature = (name, params=None))]
    fn by_name(name: &str, params: Option<BTreeMap<String, f64>>) -> PyResult<Self> {
        let params = params.unwrap_or_default();
        Ok(Problem {
            inner: problems::problem_by_name(name, &params).map_err(err_py)?,
        })
    }

    /// Problem with a Python right-hand side `rhs(t, y, yp) -> sequence`.
    #[staticmethod]
    fn custom(
        dim: usize,
        t0: f64,
        t_end: f64,
        y0: Vec<f64>,
        yp0: Vec<f64>,
        rhs: Py<PyAny>,
    ) -> PyResult<Self> {
        if y0.len() != dim || yp0.len() != dim {
            return Err(PyValueError::new_err("y0/yp0 must have length dim"));
        }
        let inner = OdeProblem::new("custom", dim, t0, t_end, y0, yp0, move |t, y, yp, out| {
            Python::attach(|py| {
                let result = rhs
                    .call1(py, (t, y.to_vec(), yp.to_vec()))
                    .expect("python rhs raised");
                let values: Vec<f64> = result
                    .extract(py)
                    .expect("python rhs must return a float sequence");
                assert_eq!(values.len(), out.len(), "python rhs returned wrong length");
                out.copy_from_slice(&values);
            });
        });
        Ok(Problem { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn t0(&self) -> f64 {
        self.inner.t0
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.inner.t_end
    }

    #[getter]
    fn y0(&self) -> Vec<f64> {
        self.inner.y0.clone()
    }

    #[getter]
    fn yp0(&self) -> Vec<f64> {
        self.inner.yp0.clone()
    }

    #[getter]
    fn has_exact(&self) -> bool {
        self.inner.has_exact()
    }

    /// Closed-form `(y, yp)` at `t`, or None.
    fn exact(&self, t: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        self.inner.exact_at(t)
    }

    /// Right-hand side evaluation (mostly for testing bindings).
    fn rhs(&self, t: f64, y: Vec<f64>, yp: Vec<f64>) -> PyResult<Vec<f64>> {
        if y.len() != self.inner.dim() || yp.len() != self.inner.dim() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        let mut out = vec![0.0; self.inner.dim()];
        self.inner.eval(t, &y, &yp, &mut out);
        Ok(out)
    }

    /// Reference values at `t`: the closed form when available, otherwise the
    /// order-5 reference solver from the initial data.
    #[pyo3(signature = (t, tol=1e-12))]
    fn reference(&self, t: f64, tol: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        if let Some(exact) = self.inner.exact_at(t) {
            return Ok(exact);
        }
        let res = reference::rk_reference(
            &self.inner,
            self.inner.t0,
            &self.inner.y0,
            &self.inner.yp0,
            &[t],
            tol,
        )
        .map_err(err_py)?;
        Ok((res.values[0].1.clone(), res.values[0].2.clone()))
    }
}

/// A finished integration: grid values, cost counters, dense evaluation.
#[pyclass(frozen)]
struct Run {
    traj: integrator::Trajectory,
    scheme: CollocationScheme,
}

#[pymethods]
impl Run {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.traj.times()
    }

    #[getter]
    fn y(&self) -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = self.traj.states.iter().map(|s| s.y.clone()).collect();
        rows.push(self.traj.y_end.clone());
        rows
    }

    #[getter]
    fn yp(&self) -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = self.traj.states.iter().map(|s| s.yp.clone()).collect();
        rows.push(self.traj.yp_end.clone());
        rows
    }

    #[getter]
    fn y_end(&self) -> Vec<f64> {
        self.traj.y_end.clone()
    }

    #[getter]
    fn yp_end(&self) -> Vec<f64> {
        self.traj.yp_end.clone()
    }

    #[getter]
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("nfe", self.traj.stats.nfe)?;
        d.set_item("start_nfe", self.traj.stats.start_nfe)?;
        d.set_item("accepts", self.traj.stats.accepts)?;
        d.set_item("rejects", self.traj.stats.rejects)?;
        Ok(d)
    }

    /// Continuous evaluation at any time inside the integrated span.
    fn sol(&self, t: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        self.traj.sample(&self.scheme, t).map_err(err_py)
    }

    fn to_csv(&self) -> String {
        self.traj.to_csv()
    }

    fn stats_json(&self) -> String {
        self.traj.stats_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Run(steps={}, nfe={}, t_end={})",
            self.traj.stats.accepts, self.traj.stats.nfe, self.traj.t_end
        )
    }
}

/// Fixed-step integration from the problem's initial data.
#[pyfunction]
#[pyo3(signature = (problem, scheme, h, t0=None, t_end=None))]
fn integrate_fixed(
    problem: &Problem,
    scheme: &Scheme,
    h: f64,
    t0: Option<f64>,
    t_end: Option<f64>,
) -> PyResult<Run> {
    let t0 = t0.unwrap_or(problem.inner.t0);
    let t_end = t_end.unwrap_or(problem.inner.t_end);
    let traj =
        integrator::integrate_fixed(&problem.inner, t0, t_end, h, &scheme.inner).map_err(err_py)?;
    Ok(Run {
        traj,
        scheme: scheme.inner.clone(),
    })
}

/// Adaptive integration with the embedded companion on the first s-1 stages
/// (or an explicit stage index list).
#[pyfunction]
#[pyo3(signature = (problem, scheme, tol, t0=None, t_end=None, h0=None, embedded_indices=None, lte_mode="position"))]
#[allow(clippy::too_many_arguments)]
fn integrate_adaptive(
    problem: &Problem,
    scheme: &Scheme,
    tol: f64,
    t0: Option<f64>,
    t_end: Option<f64>,
    h0: Option<f64>,
    embedded_indices: Option<Vec<usize>>,
    lte_mode: &str,
) -> PyResult<Run> {
    let t0 = t0.unwrap_or(problem.inner.t0);
    let t_end = t_end.unwrap_or(problem.inner.t_end);
    let embedded = match embedded_indices {
        Some(idx) => scheme.inner.embedded(&idx).map_err(err_py)?,
        None => scheme.inner.embedded_default().map_err(err_py)?,
    };
    let mut config = ControllerConfig::new(tol, embedded.scheme.step_order());
    config.h0 = h0;
    config.lte_mode = match lte_mode {
        "position" => LteMode::PositionOnly,
        "position_and_derivative" => LteMode::PositionAndDerivative,
        other => {
            return Err(PyValueError::new_err(format!(
                "lte_mode must be 'position' or 'position_and_derivative', got '{other}'"
            )))
        }
    };
    let traj = integrator::integrate_adaptive(
        &problem.inner,
        t0,
        t_end,
        &config,
        &scheme.inner,
        &embedded,
    )
    .map_err(err_py)?;
    Ok(Run {
        traj,
        scheme: scheme.inner.clone(),
    })
}

/// Spectral radius of a square matrix given as nested lists.
#[pyfunction]
fn spectral_radius(matrix: Vec<Vec<f64>>) -> PyResult<f64> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let mut m = Mat::zeros(n, n);
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    stability::spectral_radius(&m).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Stability-region scan over [z_min, 0] x [nu_min, 0]; returns a dict with
/// the axes, the sample matrix, and summary numbers.
#[pyfunction]
#[pyo3(signature = (scheme, z_min=-10.0, nu_min=-10.0, n_z=100, n_nu=100))]
fn scan_region<'py>(
    py: Python<'py>,
    scheme: &Scheme,
    z_min: f64,
    nu_min: f64,
    n_z: usize,
    n_nu: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = stability::scan_region(&scheme.inner, z_min, nu_min, n_z, n_nu).map_err(err_py)?;
    let d = PyDict::new(py);
    d.set_item("z_axis", grid.z_axis.clone())?;
    d.set_item("nu_axis", grid.nu_axis.clone())?;
    let rows = PyList::new(py, (0..grid.z_axis.len()).map(|i| grid.rho.row(i).to_vec()))?;
    d.set_item("rho", rows)?;
    d.set_item("fraction_stable", grid.fraction_stable())?;
    d.set_item("max_rho", grid.max_rho())?;
    d.set_item("failed_cells", grid.failed_cells())?;
    Ok(d)
}

#[pymodule]
fn geptrkn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scheme>()?;
    m.add_class::<Problem>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(integrate_fixed, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_adaptive, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(scan_region, m)?)?;
    Ok(())
}
