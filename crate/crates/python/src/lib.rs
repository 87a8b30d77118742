//! Python bindings for `lognls-core`.
//!
//! States cross the boundary as [`PyGraphState`]; samples come back as lists
//! of Python `complex`. Reports are plain dictionaries.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lognls_core::evolution::{propagate, PropagateOptions};
use lognls_core::stability::{self, Norm, PerturbationKind, Reference, StabilityOptions};
use lognls_core::stationary::{self, StationaryParams};
use lognls_core::variational::{self, Init, MinimizeOptions};
use lognls_core::{io, orlicz, sampling, Error, GraphState};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::InvalidGrid(_)
        | Error::GridMismatch
        | Error::VertexMismatch { .. }
        | Error::InvalidParameter(_)
        | Error::ZeroState
        | Error::Format { .. }
        | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for lognls_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// A sampled function on the star graph.
#[pyclass(name = "GraphState", module = "lognls", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyGraphState {
    inner: GraphState,
}

impl From<GraphState> for PyGraphState {
    fn from(inner: GraphState) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyGraphState {
    /// Builds a state from a vertex value and `N` lists of `M` samples at
    /// `x = h, 2h, ..., L` (the last sample must be 0).
    #[new]
    #[pyo3(signature = (length, vertex, samples))]
    fn new(length: f64, vertex: Complex64, samples: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let points = samples.first().map_or(0, Vec::len);
        let grid = lognls_core::GridSpec::new(samples.len(), length, points).py_err()?;
        GraphState::from_parts(grid, vertex, samples).py_err().map(Self::from)
    }

    /// The closed-form stationary state sampled on the grid.
    #[staticmethod]
    #[pyo3(signature = (edges, gamma, omega, kappa=0, length=20.0, points=2000))]
    fn stationary(edges: usize, gamma: f64, omega: f64, kappa: usize, length: f64, points: usize) -> PyResult<Self> {
        let params = StationaryParams::new(edges, gamma, omega, kappa).py_err()?;
        let grid = lognls_core::build_grid(edges, length, points).py_err()?;
        stationary::stationary_state(&params, grid).py_err().map(Self::from)
    }

    /// A seeded random smooth complex state.
    #[staticmethod]
    #[pyo3(signature = (edges, seed, length=20.0, points=2000))]
    fn random(edges: usize, seed: u64, length: f64, points: usize) -> PyResult<Self> {
        let grid = lognls_core::build_grid(edges, length, points).py_err()?;
        sampling::random_state(grid, seed).py_err().map(Self::from)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        io::load_state(&path).py_err().map(Self::from)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::save_state(&path, &self.inner).py_err()
    }

    #[getter(N)]
    fn edges(&self) -> usize {
        self.inner.grid().edges()
    }

    #[getter(L)]
    fn length(&self) -> f64 {
        self.inner.grid().length()
    }

    #[getter(M)]
    fn points(&self) -> usize {
        self.inner.grid().points()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.grid().spacing()
    }

    #[getter]
    fn vertex(&self) -> Complex64 {
        self.inner.vertex()
    }

    /// Sample positions `x_j = (j + 1) h`.
    fn positions(&self) -> Vec<f64> {
        let g = self.inner.grid();
        (0..g.points()).map(|j| g.position(j)).collect()
    }

    fn edge(&self, i: usize) -> PyResult<Vec<Complex64>> {
        if i >= self.inner.grid().edges() {
            return Err(PyValueError::new_err(format!("edge index {i} out of range")));
        }
        Ok(self.inner.edge(i).to_vec())
    }

    fn samples(&self) -> Vec<Vec<Complex64>> {
        self.inner.samples()
    }

    fn scaled(&self, c: Complex64) -> Self {
        self.inner.scaled(c).into()
    }

    fn mass(&self) -> f64 {
        orlicz::mass(&self.inner)
    }

    fn energy(&self, gamma: f64) -> f64 {
        orlicz::energy(&self.inner, gamma)
    }

    fn action(&self, omega: f64, gamma: f64) -> f64 {
        orlicz::action(&self.inner, omega, gamma)
    }

    fn nehari(&self, omega: f64, gamma: f64) -> f64 {
        orlicz::nehari(&self.inner, omega, gamma)
    }

    fn w_norm(&self) -> f64 {
        orlicz::w_norm(&self.inner)
    }

    /// All scalar functionals as a dict.
    fn functionals<'py>(&self, py: Python<'py>, omega: f64, gamma: f64) -> PyResult<Bound<'py, PyDict>> {
        let f = orlicz::functionals(&self.inner, omega, gamma);
        let d = PyDict::new(py);
        d.set_item("mass", f.mass)?;
        d.set_item("form", f.form)?;
        d.set_item("log_int", f.log_int)?;
        d.set_item("energy", f.energy)?;
        d.set_item("action", f.action)?;
        d.set_item("nehari", f.nehari)?;
        d.set_item("w_norm", f.w_norm)?;
        Ok(d)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let g = self.inner.grid();
        format!("GraphState(N={}, L={}, M={})", g.edges(), g.length(), g.points())
    }
}

#[pyfunction]
fn gamma_star(edges: usize) -> PyResult<f64> {
    stationary::gamma_star(edges).py_err()
}

#[pyfunction]
#[pyo3(signature = (edges, gamma, omega, kappa=0))]
fn action_closed_form(edges: usize, gamma: f64, omega: f64, kappa: usize) -> PyResult<f64> {
    Ok(stationary::action_closed_form(
        &StationaryParams::new(edges, gamma, omega, kappa).py_err()?,
    ))
}

/// `(line, halfline, kirchhoff)` infima.
#[pyfunction]
fn d_values(omega: f64) -> (f64, f64, f64) {
    let d = stationary::d_values(omega);
    (d.line, d.halfline, d.kirchhoff)
}

/// `(interior, jump)` residuals of the stationary equation.
#[pyfunction]
fn stationary_residual(u: &PyGraphState, omega: f64, gamma: f64) -> (f64, f64) {
    let r = stationary::stationary_residual(&u.inner, omega, gamma);
    (r.interior, r.jump)
}

#[pyfunction]
fn rearrange(u: &PyGraphState) -> PyGraphState {
    lognls_core::rearrange::rearrange(&u.inner).into()
}

#[pyfunction]
fn nehari_project(u: &PyGraphState, omega: f64, gamma: f64) -> PyResult<PyGraphState> {
    variational::nehari_project(&u.inner, omega, gamma)
        .py_err()
        .map(Into::into)
}

#[pyfunction]
#[pyo3(signature = (u, reference, norm="l2"))]
fn phase_distance(u: &PyGraphState, reference: &PyGraphState, norm: &str) -> PyResult<f64> {
    let norm = match norm {
        "l2" | "L2" => Norm::L2,
        "w" | "W" => Norm::W,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown norm {other:?} (expected l2 or w)"
            )))
        }
    };
    stability::phase_distance(&u.inner, &reference.inner, norm).py_err()
}

/// Evolves `u` and returns snapshots and conservation logs.
#[pyfunction]
#[pyo3(signature = (u, gamma, dt, horizon, stride=1000, m=None))]
fn evolve<'py>(
    py: Python<'py>,
    u: &PyGraphState,
    gamma: f64,
    dt: f64,
    horizon: f64,
    stride: usize,
    m: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut opts = PropagateOptions::new(dt, horizon).with_stride(stride);
    opts.m = m;
    let u0 = u.inner.clone();
    let t = py.detach(move || propagate(&u0, gamma, &opts)).py_err()?;
    let d = PyDict::new(py);
    d.set_item("m", t.m)?;
    d.set_item("times", &t.times)?;
    let states: Vec<PyGraphState> = t.states.iter().cloned().map(Into::into).collect();
    d.set_item("states", states)?;
    d.set_item("step_times", &t.step_times)?;
    d.set_item("mass", &t.mass)?;
    d.set_item("energy", &t.energy)?;
    d.set_item("mass_drift", &t.mass_drift)?;
    d.set_item("energy_drift", &t.energy_drift)?;
    Ok(d)
}

/// Minimizes the action on the Nehari manifold.
///
/// `init` may be a state, `None` (Gaussian at the vertex), or use `seed`
/// for a random symmetric start (`asymmetric=True` for a one-edge bump).
#[pyfunction]
#[pyo3(signature = (edges, gamma, omega, init=None, seed=None, asymmetric=false, length=20.0, points=2000, tol=1e-10, max_iter=50_000))]
#[allow(clippy::too_many_arguments)]
fn minimize<'py>(
    py: Python<'py>,
    edges: usize,
    gamma: f64,
    omega: f64,
    init: Option<PyGraphState>,
    seed: Option<u64>,
    asymmetric: bool,
    length: f64,
    points: usize,
    tol: f64,
    max_iter: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let start = match (init, seed) {
        (Some(s), None) => Init::FromState(s.inner),
        (Some(_), Some(_)) => return Err(PyValueError::new_err("pass either init or seed, not both")),
        (None, Some(s)) if asymmetric => Init::RandomAsymmetric(s),
        (None, Some(s)) => Init::RandomSymmetric(s),
        (None, None) => Init::VertexGaussian,
    };
    let mut opts = MinimizeOptions::new(length, points);
    opts.tol = tol;
    opts.max_iter = max_iter;
    let r = py
        .detach(move || variational::minimize_action(edges, gamma, omega, start, &opts))
        .py_err()?;
    let d = PyDict::new(py);
    d.set_item("state", PyGraphState::from(r.state))?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    d.set_item("final_nehari", r.final_nehari)?;
    d.set_item("final_action", r.final_action)?;
    d.set_item("dist_mod_phase_to_phi0", r.dist_mod_phase_to_phi0)?;
    d.set_item("centroid", r.centroid)?;
    d.set_item("escaped", r.escaped)?;
    Ok(d)
}

/// Rows `(gamma, S(phi0), d0, difference)` and the sign-change bracket.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn threshold_scan(
    edges: usize,
    omega: f64,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
) -> PyResult<(Vec<(f64, f64, f64, f64)>, Option<(f64, f64)>)> {
    let gammas = variational::gamma_grid(gamma_min, gamma_max, steps).py_err()?;
    let rows = variational::threshold_scan(edges, omega, &gammas).py_err()?;
    let bracket = variational::threshold_bracket(&rows);
    Ok((
        rows.iter()
            .map(|r| (r.gamma, r.action_phi0, r.d_kirchhoff, r.difference))
            .collect(),
        bracket,
    ))
}

/// One orbital-stability run around the ground state.
#[pyfunction]
#[pyo3(signature = (edges, gamma, omega, eps, horizon=50.0, kind="symmetric", dt=1e-3, seed=0, sampled_reference=false, length=20.0, points=2000))]
#[allow(clippy::too_many_arguments)]
fn stability_run<'py>(
    py: Python<'py>,
    edges: usize,
    gamma: f64,
    omega: f64,
    eps: f64,
    horizon: f64,
    kind: &str,
    dt: f64,
    seed: u64,
    sampled_reference: bool,
    length: f64,
    points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let kind: PerturbationKind = kind.parse().py_err()?;
    let opts = StabilityOptions {
        length,
        points,
        dt,
        seed,
        reference: if sampled_reference {
            Reference::Sampled
        } else {
            Reference::DiscreteGroundState
        },
        ..StabilityOptions::default()
    };
    let r = py
        .detach(move || stability::stability_run(edges, gamma, omega, eps, horizon, kind, &opts))
        .py_err()?;
    let d = PyDict::new(py);
    d.set_item("epsilon", r.epsilon)?;
    d.set_item("horizon", r.horizon)?;
    d.set_item("sup_dist", r.sup_dist)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("sup_dist_l2", r.sup_dist_l2)?;
    d.set_item("max_mass_drift", r.max_mass_drift)?;
    d.set_item("max_energy_drift", r.max_energy_drift)?;
    let samples: Vec<(f64, f64, f64)> = r.samples.iter().map(|s| (s.t, s.dist_l2, s.dist_w)).collect();
    d.set_item("samples", samples)?;
    Ok(d)
}

#[pymodule]
fn lognls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraphState>()?;
    m.add_function(wrap_pyfunction!(gamma_star, m)?)?;
    m.add_function(wrap_pyfunction!(action_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(d_values, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_residual, m)?)?;
    m.add_function(wrap_pyfunction!(rearrange, m)?)?;
    m.add_function(wrap_pyfunction!(nehari_project, m)?)?;
    m.add_function(wrap_pyfunction!(phase_distance, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_scan, m)?)?;
    m.add_function(wrap_pyfunction!(stability_run, m)?)?;
    m.add("FORMAT_VERSION", io::FORMAT_VERSION)?;
    Ok(())
}
