use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use heatlift::cli::{run, ExperimentConfig};
use heatlift::heat_core::{self, DiffusivityProfile, ScalarField, SourceTerm, SpaceTimeGrid};
use heatlift::lifting::{self, Coupling, LiftConfig};
use heatlift::norms::{self, EstimateId};
use heatlift::poisson::{self, RateProfile, Sampler};
use heatlift::TimeLaw;

fn err(e: heatlift::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts any serializable value to plain Python objects via `json.loads`.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(json_err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn law_from_json(text: &str) -> PyResult<TimeLaw> {
    serde_json::from_str(text).map_err(json_err)
}

/// Time-dependent diffusivity `a(t)` on `[0, horizon]`.
#[pyclass(name = "Diffusivity", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDiffusivity(DiffusivityProfile);

#[pymethods]
impl PyDiffusivity {
    #[staticmethod]
    fn constant(value: f64, horizon: f64) -> PyResult<Self> {
        DiffusivityProfile::constant(value, horizon).map(Self).map_err(err)
    }

    /// `intercept + slope * t`
    #[staticmethod]
    fn affine(intercept: f64, slope: f64, horizon: f64) -> PyResult<Self> {
        DiffusivityProfile::new(TimeLaw::affine(intercept, slope), horizon)
            .map(Self)
            .map_err(err)
    }

    /// Any time law, given as JSON (e.g. `{"kind": "cosine", ...}`).
    #[staticmethod]
    fn from_json(law: &str, horizon: f64) -> PyResult<Self> {
        DiffusivityProfile::new(law_from_json(law)?, horizon)
            .map(Self)
            .map_err(err)
    }

    fn value(&self, t: f64) -> f64 {
        self.0.value(t)
    }

    /// `A(t) = ∫₀ᵗ a(s) ds`
    fn cumulative(&self, t: f64) -> PyResult<f64> {
        heat_core::cumulative_diffusivity(&self.0, t).map_err(err)
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn __repr__(&self) -> String {
        format!("Diffusivity({:?}, horizon={})", self.0.law(), self.0.horizon())
    }
}

/// Jump intensity `λ(t)` of a Poisson process on `[0, horizon]`.
#[pyclass(name = "Rate", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRate(RateProfile);

#[pymethods]
impl PyRate {
    #[staticmethod]
    fn constant(value: f64, horizon: f64) -> PyResult<Self> {
        RateProfile::constant(value, horizon).map(Self).map_err(err)
    }

    #[staticmethod]
    fn affine(intercept: f64, slope: f64, horizon: f64) -> PyResult<Self> {
        RateProfile::new(TimeLaw::affine(intercept, slope), horizon)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(law: &str, horizon: f64) -> PyResult<Self> {
        RateProfile::new(law_from_json(law)?, horizon)
            .map(Self)
            .map_err(err)
    }

    fn value(&self, t: f64) -> f64 {
        self.0.value(t)
    }

    /// `Λ(t) = ∫₀ᵗ λ(s) ds`
    fn mean(&self, t: f64) -> f64 {
        self.0.mean(t)
    }

    /// `P(π_t - π_s = k)`
    fn increment_pmf(&self, s: f64, t: f64, k: u64) -> PyResult<f64> {
        poisson::increment_pmf(&self.0, s, t, k).map_err(err)
    }

    /// Jump times of `n` reproducible paths.
    #[pyo3(signature = (seed, n, sampler = "inversion"))]
    fn sample_paths(&self, py: Python<'_>, seed: u64, n: usize, sampler: &str) -> PyResult<Vec<Vec<f64>>> {
        let sampler = match sampler {
            "inversion" => Sampler::Inversion,
            "thinning" => Sampler::Thinning,
            other => return Err(PyValueError::new_err(format!("unknown sampler {other:?}"))),
        };
        let paths = py.detach(|| poisson::sample_paths(&self.0, seed, n, sampler));
        Ok(paths.iter().map(|p| p.jump_times().to_vec()).collect())
    }

    fn __repr__(&self) -> String {
        format!("Rate({:?}, horizon={})", self.0.law(), self.0.horizon())
    }
}

/// Forcing `f(t, z)` in one or two space dimensions.
#[pyclass(name = "Source", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySource(SourceTerm);

#[pymethods]
impl PySource {
    /// Unit Gaussian bump of width `sigma`, constant in time.
    #[staticmethod]
    fn gaussian(dim: usize, sigma: f64) -> PyResult<Self> {
        SourceTerm::gaussian_bump(dim, sigma).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __call__(&self, t: f64, z: Vec<f64>) -> PyResult<f64> {
        if z.len() != self.0.dim() {
            return Err(PyValueError::new_err(format!(
                "expected {} coordinates, got {}",
                self.0.dim(),
                z.len()
            )));
        }
        Ok(self.0.eval(t, &z))
    }

    /// `f ∘ S` for the rotation by `angle` radians.
    fn rotated(&self, angle: f64) -> PyResult<Self> {
        self.0.rotated(angle).map(Self).map_err(err)
    }

    fn scaled(&self, c: f64) -> Self {
        Self(self.0.scaled(c))
    }

    fn sup_bound(&self, horizon: f64) -> f64 {
        self.0.sup_bound(horizon)
    }
}

/// Uniform space-time grid, symmetric about the origin.
#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(SpaceTimeGrid);

#[pymethods]
impl PyGrid {
    /// `y` is `(half_width, dy)` for a planar grid.
    #[new]
    #[pyo3(signature = (horizon, nt, x_half, dx, y = None))]
    fn new(horizon: f64, nt: usize, x_half: f64, dx: f64, y: Option<(f64, f64)>) -> PyResult<Self> {
        SpaceTimeGrid::centered(horizon, nt, x_half, dx, y)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn t_nodes(&self) -> Vec<f64> {
        self.0.t_nodes().to_vec()
    }

    #[getter]
    fn x_nodes(&self) -> Vec<f64> {
        self.0.x_nodes().to_vec()
    }

    #[getter]
    fn y_nodes(&self) -> Option<Vec<f64>> {
        self.0.y_nodes().map(|y| y.to_vec())
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        (self.0.nt(), self.0.nx(), self.0.ny())
    }

    fn __repr__(&self) -> String {
        let (nt, nx, ny) = self.shape();
        format!("Grid(nt={nt}, nx={nx}, ny={ny}, dx={})", self.0.dx())
    }
}

/// Node values of a solution, indexed `[time, x, y]`.
#[pyclass(name = "Field", frozen, skip_from_py_object)]
struct PyField(ScalarField);

#[pymethods]
impl PyField {
    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        self.0.values().dim()
    }

    /// Nested lists `values[n][i][j]`.
    fn values(&self) -> Vec<Vec<Vec<f64>>> {
        self.0
            .values()
            .outer_iter()
            .map(|s| s.outer_iter().map(|r| r.to_vec()).collect())
            .collect()
    }

    fn at(&self, n: usize, i: usize, j: usize) -> PyResult<f64> {
        self.0
            .values()
            .get([n, i, j])
            .copied()
            .ok_or_else(|| PyValueError::new_err("index out of range"))
    }

    fn sup(&self) -> f64 {
        norms::sup_norm(&self.0)
    }

    fn lp(&self, p: f64) -> PyResult<f64> {
        norms::lp_norm(&self.0, p).map_err(err)
    }

    /// `sup_t` of the spatial Hölder seminorm.
    fn holder(&self, alpha: f64) -> PyResult<f64> {
        norms::sup_time_holder(&self.0, alpha).map_err(err)
    }

    /// Measured estimate ratios against the forcing `f`.
    #[pyo3(signature = (f, alpha = 0.5, p = 2.0))]
    fn estimates<'py>(&self, py: Python<'py>, f: &PySource, alpha: f64, p: f64) -> PyResult<Bound<'py, PyAny>> {
        let ids: &[EstimateId] = if self.0.grid().dim() == 1 {
            &EstimateId::ALL_1D
        } else {
            &EstimateId::ALL_2D
        };
        let reps = py
            .detach(|| norms::estimate_report(&self.0, &f.0, alpha, p, ids))
            .map_err(err)?;
        to_py(py, &reps)
    }

    /// Directional Hölder ratios for each angle in degrees.
    fn directional<'py>(
        &self,
        py: Python<'py>,
        f: &PySource,
        alpha: f64,
        angles_deg: Vec<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rep = py
            .detach(|| norms::directional_holder_report(&self.0, &f.0, alpha, &angles_deg))
            .map_err(err)?;
        to_py(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!("Field(shape={:?})", self.shape())
    }
}

#[pyfunction]
fn solve_heat_1d(py: Python<'_>, a: &PyDiffusivity, f: &PySource, grid: &PyGrid) -> PyResult<PyField> {
    py.detach(|| heat_core::solve_heat_1d(&a.0, &f.0, &grid.0))
        .map(PyField)
        .map_err(err)
}

#[pyfunction]
fn solve_heat_2d(py: Python<'_>, a: &PyDiffusivity, f: &PySource, grid: &PyGrid) -> PyResult<PyField> {
    py.detach(|| heat_core::solve_heat_2d_reference(&a.0, &f.0, &grid.0))
        .map(PyField)
        .map_err(err)
}

/// Expectation of the solution along the one-sided shifted paths.
#[pyfunction]
fn solve_lattice_v(
    py: Python<'_>,
    a: &PyDiffusivity,
    f: &PySource,
    rate: &PyRate,
    h: f64,
    grid: &PyGrid,
) -> PyResult<PyField> {
    py.detach(|| lifting::solve_lattice_v(&a.0, &f.0, &rate.0, h, &grid.0))
        .map(PyField)
        .map_err(err)
}

/// Expectation along the symmetric (difference of two processes) paths.
#[pyfunction]
fn solve_lattice_w(
    py: Python<'_>,
    a: &PyDiffusivity,
    f: &PySource,
    rate: &PyRate,
    h: f64,
    grid: &PyGrid,
) -> PyResult<PyField> {
    py.detach(|| lifting::solve_lattice_w(&a.0, &f.0, &rate.0, h, &grid.0))
        .map(PyField)
        .map_err(err)
}

/// Monte Carlo and quadrature sides of the jump identity at `(t, x, y)`.
#[pyfunction]
#[pyo3(signature = (a, f, rate, h, t, x, y, n_paths = 10_000, seed = 0, y_window = 4.0))]
#[allow(clippy::too_many_arguments)]
fn verify_jump_identity<'py>(
    py: Python<'py>,
    a: &PyDiffusivity,
    f: &PySource,
    rate: &PyRate,
    h: f64,
    t: f64,
    x: f64,
    y: f64,
    n_paths: usize,
    seed: u64,
    y_window: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = LiftConfig::new(h, Coupling::Custom(rate.0.clone()), n_paths, seed, y_window)
        .map_err(err)?;
    let rep = py
        .detach(|| lifting::verify_jump_identity(&a.0, &f.0, &rate.0, h, &cfg, t, x, y))
        .map_err(err)?;
    to_py(py, &rep)
}

/// Sup errors of the lattice solutions against the planar solution as `h`
/// shrinks. `coupling` is `"a_over_h2"` or `"h2_a"`.
#[pyfunction]
#[pyo3(signature = (a, f, grid, h_list, coupling = "a_over_h2"))]
fn lift_limit<'py>(
    py: Python<'py>,
    a: &PyDiffusivity,
    f: &PySource,
    grid: &PyGrid,
    h_list: Vec<f64>,
    coupling: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let coupling = match coupling {
        "a_over_h2" => Coupling::LambdaEqAOverH2,
        "h2_a" => Coupling::LambdaEqH2A,
        other => return Err(PyValueError::new_err(format!("unknown coupling {other:?}"))),
    };
    let rep = py
        .detach(|| lifting::dimension_lift_limit(&a.0, &f.0, &grid.0, &h_list, &coupling))
        .map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("h", rep.h.clone())?;
    d.set_item("errors", rep.errors_vs_reference.clone())?;
    d.set_item("observed_order", rep.observed_order)?;
    d.set_item("strictly_decreasing", rep.errors_strictly_decreasing())?;
    Ok(d.into_any())
}

/// Runs one configured experiment, writing its files to `out_dir`.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config_json: &str, out_dir: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err)?;
    let outcome = py
        .detach(|| run(&cfg, std::path::Path::new(out_dir)))
        .map_err(err)?;
    let d = to_py(py, &outcome)?;
    d.set_item("passed", outcome.passed())?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "heatlift")]
fn heatlift_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", heatlift::cli::VERSION)?;
    m.add_class::<PyDiffusivity>()?;
    m.add_class::<PyRate>()?;
    m.add_class::<PySource>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(solve_heat_1d, m)?)?;
    m.add_function(wrap_pyfunction!(solve_heat_2d, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lattice_v, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lattice_w, m)?)?;
    m.add_function(wrap_pyfunction!(verify_jump_identity, m)?)?;
    m.add_function(wrap_pyfunction!(lift_limit, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
