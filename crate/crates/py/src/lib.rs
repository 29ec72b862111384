//! Python bindings: radial formulas, star-shaped pairs and FEM solves.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use robin_pcap::experiments::{cmd_verify, CampaignSettings};
use robin_pcap::fem::{self, robin_identity_check, SolveOptions};
use robin_pcap::geometry::{self, validate_pair};
use robin_pcap::mesh::build_annular_mesh;
use robin_pcap::{radial, Error, ProblemParams};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct Params(ProblemParams);

#[pymethods]
impl Params {
    #[new]
    fn new(n: u32, p: f64, beta: f64) -> PyResult<Self> {
        ProblemParams::new(n, p, beta).map(Params).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    /// `β^(1/(p-1))`.
    #[getter]
    fn beta_root(&self) -> f64 {
        self.0.beta_root()
    }

    /// Volume of the unit ball.
    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }

    fn __repr__(&self) -> String {
        format!("Params(n={}, p={}, beta={})", self.0.n(), self.0.p(), self.0.beta())
    }
}

#[pyfunction]
fn ball_energy(params: PyRef<'_, Params>, radius: f64) -> PyResult<f64> {
    radial::ball_energy(&params.0, radius).map_err(py_err)
}

#[pyfunction]
fn u_star(params: PyRef<'_, Params>, radius: f64, r: f64) -> PyResult<f64> {
    radial::u_star(&params.0, radius, r).map_err(py_err)
}

#[pyfunction]
fn gradient_ratio(params: PyRef<'_, Params>, radius: f64, r: f64) -> PyResult<f64> {
    radial::gradient_ratio(&params.0, radius, r).map_err(py_err)
}

#[pyfunction]
fn critical_radius(params: PyRef<'_, Params>) -> PyResult<f64> {
    radial::critical_radius(&params.0).map_err(py_err)
}

#[pyfunction]
fn lemma5_predicate(params: PyRef<'_, Params>, radius: f64) -> PyResult<(bool, bool)> {
    radial::lemma5_predicate(&params.0, radius).map_err(py_err)
}

/// `(energy, radius)` of the best ball pair under the volume cap.
#[pyfunction]
fn ball_lower_bound(params: PyRef<'_, Params>, volume_cap: f64) -> PyResult<(f64, f64)> {
    radial::ball_lower_bound(&params.0, volume_cap)
        .map(|b| (b.energy, b.radius))
        .map_err(py_err)
}

#[pyfunction]
fn regime_classify<'py>(py: Python<'py>, params: PyRef<'_, Params>) -> PyResult<Bound<'py, PyDict>> {
    let r = radial::regime_classify(&params.0).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("regime", r.regime.name())?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("beta1", r.beta1)?;
    d.set_item("beta2", r.beta2)?;
    d.set_item("critical_radius", r.critical_radius)?;
    d.set_item("limit_at_infinity", r.limit_at_infinity)?;
    Ok(d)
}

#[pyclass(name = "StarShape", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct StarShape(geometry::StarShape);

#[pymethods]
impl StarShape {
    #[new]
    #[pyo3(signature = (center, a0, cos = Vec::new(), sin = Vec::new()))]
    fn new(center: (f64, f64), a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> PyResult<Self> {
        geometry::StarShape::new([center.0, center.1], a0, cos, sin)
            .map(StarShape)
            .map_err(py_err)
    }

    fn radius(&self, theta: f64) -> f64 {
        self.0.radius(theta)
    }

    fn area(&self) -> f64 {
        self.0.area()
    }

    fn perimeter(&self) -> f64 {
        self.0.perimeter()
    }
}

/// Solve the planar problem on `(compact, domain)`; returns a dict with the
/// energy split, the Robin identity gap and solver statistics.
#[pyfunction]
#[pyo3(signature = (compact, domain, p, beta, n_theta = 256, n_radial = 32))]
fn solve_pair<'py>(
    py: Python<'py>,
    compact: PyRef<'_, StarShape>,
    domain: PyRef<'_, StarShape>,
    p: f64,
    beta: f64,
    n_theta: usize,
    n_radial: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let params = ProblemParams::new(2, p, beta).map_err(py_err)?;
    let pair = validate_pair(compact.0.clone(), domain.0.clone()).map_err(py_err)?;
    let d = PyDict::new(py);
    if pair.is_degenerate() {
        let e = fem::coincident_pair_energy(&pair, &params).map_err(py_err)?;
        d.set_item("energy", e)?;
        d.set_item("converged", true)?;
        return Ok(d);
    }
    let solution = py
        .detach(|| {
            let mesh = build_annular_mesh(&pair, n_theta, n_radial)?;
            fem::solve(&mesh, &params, &SolveOptions::default())
        })
        .map_err(py_err)?;
    d.set_item("energy", solution.energy_total)?;
    d.set_item("gradient_part", solution.energy_gradient_part)?;
    d.set_item("boundary_part", solution.energy_boundary_part)?;
    d.set_item("robin_gap", robin_identity_check(&solution).relative_gap())?;
    d.set_item("iterations", solution.iterations)?;
    d.set_item("converged", solution.converged)?;
    Ok(d)
}

/// Seeded planar campaign; returns the CSV report.
#[pyfunction]
#[pyo3(signature = (p, beta, volume_cap, count, seed = 0, amplitude = 0.15, n_theta = 256, n_radial = 32))]
#[allow(clippy::too_many_arguments)]
fn verify(
    py: Python<'_>,
    p: f64,
    beta: f64,
    volume_cap: f64,
    count: usize,
    seed: u64,
    amplitude: f64,
    n_theta: usize,
    n_radial: usize,
) -> PyResult<String> {
    let params = ProblemParams::new(2, p, beta).map_err(py_err)?;
    let mut settings = CampaignSettings::new(params, volume_cap, count, seed, amplitude);
    settings.n_theta = n_theta;
    settings.n_radial = n_radial;
    py.detach(|| cmd_verify(&settings)).map(|r| r.to_csv()).map_err(py_err)
}

#[pymodule]
pub fn robin_pcap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_class::<StarShape>()?;
    m.add_function(wrap_pyfunction!(ball_energy, m)?)?;
    m.add_function(wrap_pyfunction!(u_star, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(critical_radius, m)?)?;
    m.add_function(wrap_pyfunction!(lemma5_predicate, m)?)?;
    m.add_function(wrap_pyfunction!(ball_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(regime_classify, m)?)?;
    m.add_function(wrap_pyfunction!(solve_pair, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
