//! Python bindings for the adaptive H(curl) solver.
//!
//! Meshes, coefficients and discrete fields are wrapped as classes; the
//! solver, the estimators, the adaptive loop and the structural checks are
//! exposed as methods and module functions. Arrays cross the boundary as
//! nested lists.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hcurl_afem::amr::{self, AmrOptions, BenchmarkProblem};
use hcurl_afem::analysis::{self, MonotonicityReport};
use hcurl_afem::assembly::{energy_norm, Source, SolverOptions};
use hcurl_afem::elements::{CoefficientField, FeFunction, Space};
use hcurl_afem::estimators::{self, EstimatorKind, IndicatorField};
use hcurl_afem::mesh::{self as hmesh, build_patches, TetMesh};
use hcurl_afem::{Error, Point3};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn estimator_kind(name: &str) -> PyResult<EstimatorKind> {
    EstimatorKind::parse(name).ok_or_else(|| {
        let names: Vec<_> = EstimatorKind::ALL.iter().map(|k| k.name()).collect();
        PyValueError::new_err(format!("unknown estimator '{name}' (expected one of {})", names.join(", ")))
    })
}

/// Conforming tetrahedral mesh with one subdomain tag per element.
#[pyclass(name = "Mesh", module = "hcurl_afem_py", skip_from_py_object)]
#[derive(Clone)]
struct PyMesh {
    inner: TetMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(vertices: Vec<[f64; 3]>, tets: Vec<[usize; 4]>, tags: Vec<usize>) -> PyResult<Self> {
        let vertices = vertices.into_iter().map(Point3::from).collect();
        let inner = TetMesh::new(vertices, tets, tags).map_err(|e| to_py(e.into()))?;
        Ok(Self { inner })
    }

    /// Structured mesh of the box `[lo, hi]` with `n` cells per direction,
    /// six tetrahedra per cell, all tagged 0.
    #[staticmethod]
    fn cube(lo: [f64; 3], hi: [f64; 3], n: [usize; 3]) -> PyResult<Self> {
        let inner = hmesh::box_mesh(lo.into(), hi.into(), n, |_| 0).map_err(|e| to_py(e.into()))?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: hmesh::read_mesh(path).map_err(to_py)?,
        })
    }

    fn write(&self, path: &str) -> PyResult<()> {
        hmesh::write_mesh(path, &self.inner).map_err(to_py)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_tets(&self) -> usize {
        self.inner.num_tets()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn num_faces(&self) -> usize {
        self.inner.num_faces()
    }

    #[getter]
    fn vertices(&self) -> Vec<[f64; 3]> {
        self.inner.vertices().iter().map(|v| [v.x, v.y, v.z]).collect()
    }

    #[getter]
    fn tets(&self) -> Vec<[usize; 4]> {
        self.inner.tets().to_vec()
    }

    #[getter]
    fn tags(&self) -> Vec<usize> {
        self.inner.tags().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<[usize; 2]> {
        self.inner.edges().to_vec()
    }

    /// Longest edge of every element.
    fn h(&self) -> Vec<f64> {
        (0..self.inner.num_tets()).map(|k| self.inner.h(k)).collect()
    }

    fn volume(&self) -> f64 {
        self.inner.total_volume()
    }

    /// Longest-edge bisection of the marked elements plus conforming closure.
    fn bisect(&self, marked: Vec<usize>) -> PyResult<Self> {
        let inner = hmesh::bisect(&self.inner, &marked).map_err(|e| to_py(e.into()))?;
        Ok(Self { inner })
    }

    fn uniform_refine(&self) -> PyResult<Self> {
        let inner = hmesh::uniform_refine(&self.inner).map_err(|e| to_py(e.into()))?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(vertices={}, tets={}, edges={}, subdomains={})",
            self.inner.num_vertices(),
            self.inner.num_tets(),
            self.inner.num_edges(),
            self.inner.num_subdomains()
        )
    }
}

/// Piecewise constant `μ` and `β`, indexed by subdomain tag.
#[pyclass(name = "Coefficients", module = "hcurl_afem_py", skip_from_py_object)]
#[derive(Clone)]
struct PyCoefficients {
    inner: CoefficientField,
}

#[pymethods]
impl PyCoefficients {
    #[new]
    fn new(mu: Vec<f64>, beta: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoefficientField::new(mu, beta).map_err(to_py)?,
        })
    }

    #[getter]
    fn mu(&self) -> Vec<f64> {
        (0..self.inner.num_subdomains()).map(|t| self.inner.mu(t)).collect()
    }

    #[getter]
    fn beta(&self) -> Vec<f64> {
        (0..self.inner.num_subdomains()).map(|t| self.inner.beta(t)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Coefficients(mu={:?}, beta={:?})", self.mu(), self.beta())
    }
}

/// Element-wise estimator contributions.
#[pyclass(name = "Indicators", module = "hcurl_afem_py", frozen)]
struct PyIndicators {
    inner: IndicatorField,
}

#[pymethods]
impl PyIndicators {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }

    /// Global estimator `(Σ η_K²)^{1/2}`.
    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta()
    }

    #[getter]
    fn eta_k(&self) -> Vec<f64> {
        self.inner.eta_k.clone()
    }

    #[getter]
    fn eta_perp(&self) -> Vec<f64> {
        self.inner.eta_perp.clone()
    }

    #[getter]
    fn eta_0(&self) -> Vec<f64> {
        self.inner.eta_0.clone()
    }

    #[getter]
    fn eta_r(&self) -> Vec<f64> {
        self.inner.eta_r.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Indicators(kind='{}', elements={}, eta={:.6e})", self.kind(), self.inner.len(), self.inner.eta())
    }
}

/// Discrete ND₀ solution on a fixed mesh.
#[pyclass(name = "Solution", module = "hcurl_afem_py", frozen)]
struct PySolution {
    mesh: TetMesh,
    problem: BenchmarkProblem,
    u_h: FeFunction,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn ndof(&self) -> usize {
        self.u_h.values().len()
    }

    /// Edge degrees of freedom, one per global edge.
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.u_h.values().to_vec()
    }

    #[getter]
    fn mesh(&self) -> PyMesh {
        PyMesh {
            inner: self.mesh.clone(),
        }
    }

    /// Field value at the barycentric point `lam` of element `k`.
    fn eval(&self, k: usize, lam: [f64; 4]) -> PyResult<[f64; 3]> {
        if k >= self.mesh.num_tets() {
            return Err(PyValueError::new_err(format!("element {k} out of range")));
        }
        let v = self.u_h.eval(&self.mesh, k, &lam);
        Ok([v.x, v.y, v.z])
    }

    /// Element-wise curl (constant on each element).
    fn curl(&self) -> Vec<[f64; 3]> {
        (0..self.mesh.num_tets())
            .map(|k| {
                let c = self.u_h.curl(&self.mesh, k);
                [c.x, c.y, c.z]
            })
            .collect()
    }

    fn energy_norm(&self) -> f64 {
        energy_norm(&self.mesh, &self.problem.coeff, &self.u_h)
    }

    /// Evaluate one of the a posteriori estimators.
    #[pyo3(signature = (kind = "recovery"))]
    fn estimate(&self, py: Python<'_>, kind: &str) -> PyResult<PyIndicators> {
        let kind = estimator_kind(kind)?;
        let p = &self.problem;
        let inner = py
            .detach(|| {
                let patches = build_patches(&self.mesh, &p.coeff);
                estimators::estimate(kind, &self.mesh, &p.coeff, &patches, &self.u_h, &p.source)
            })
            .map_err(to_py)?;
        Ok(PyIndicators { inner })
    }
}

/// One of the built-in benchmark problems.
#[pyclass(name = "Benchmark", module = "hcurl_afem_py", frozen)]
struct PyBenchmark {
    inner: BenchmarkProblem,
}

#[pymethods]
impl PyBenchmark {
    #[new]
    #[pyo3(signature = (name, mesh = None))]
    fn new(name: &str, mesh: Option<PyRef<'_, PyMesh>>) -> PyResult<Self> {
        let mut inner = amr::benchmark(name).map_err(to_py)?;
        if let Some(m) = mesh {
            inner = inner.with_mesh(m.inner.clone()).map_err(to_py)?;
        }
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name
    }

    #[getter]
    fn mesh(&self) -> PyMesh {
        PyMesh {
            inner: self.inner.mesh.clone(),
        }
    }

    #[getter]
    fn coefficients(&self) -> PyCoefficients {
        PyCoefficients {
            inner: self.inner.coeff.clone(),
        }
    }

    #[getter]
    fn has_exact_solution(&self) -> bool {
        self.inner.exact.is_some()
    }

    /// Solve on `mesh`, or on the benchmark's initial mesh.
    #[pyo3(signature = (mesh = None))]
    fn solve(&self, py: Python<'_>, mesh: Option<PyRef<'_, PyMesh>>) -> PyResult<PySolution> {
        let mesh = mesh.map_or_else(|| self.inner.mesh.clone(), |m| m.inner.clone());
        let (_, u_h) = py
            .detach(|| amr::solve_on(&self.inner, &mesh, &SolverOptions::default()))
            .map_err(to_py)?;
        Ok(PySolution {
            mesh,
            problem: self.inner.clone(),
            u_h,
        })
    }

    fn __repr__(&self) -> String {
        format!("Benchmark('{}', tets={})", self.inner.name, self.inner.mesh.num_tets())
    }
}

/// Dörfler marking: indices of the smallest set carrying a `theta` fraction
/// of `Σ η_K²`.
#[pyfunction]
fn dorfler_mark(eta: Vec<f64>, theta: f64, h: Vec<f64>) -> PyResult<Vec<usize>> {
    amr::dorfler_mark(&eta, theta, &h).map_err(to_py)
}

/// Adaptive loop on a benchmark. Returns a dict with the per-level records
/// (list of dicts), `converged`, and the fitted rates `r_eta` / `r_err`.
#[pyfunction]
#[pyo3(signature = (benchmark, estimator = "recovery", theta = 0.2, max_dof = 200_000, max_levels = 100, tol = None))]
fn amr_loop<'py>(
    py: Python<'py>,
    benchmark: &PyBenchmark,
    estimator: &str,
    theta: f64,
    max_dof: usize,
    max_levels: usize,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = estimator_kind(estimator)?;
    let opts = AmrOptions {
        theta,
        max_dof,
        max_levels,
        stop: tol.map(|t| benchmark.inner.stop.with_tol(t)),
        ..AmrOptions::default()
    };
    let history = py.detach(|| amr::amr_loop(&benchmark.inner, kind, &opts)).map_err(to_py)?;
    let levels = history
        .levels
        .iter()
        .map(|l| {
            let d = PyDict::new(py);
            d.set_item("level", l.level)?;
            d.set_item("ndof", l.ndof)?;
            d.set_item("elements", l.elements)?;
            d.set_item("eta", l.eta)?;
            d.set_item("eta_perp", l.eta_perp)?;
            d.set_item("eta_0", l.eta_0)?;
            d.set_item("eta_r", l.eta_r)?;
            d.set_item("error", l.error)?;
            d.set_item("rel_error", l.rel_error)?;
            d.set_item("eff_index", l.eff_index)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("problem", &history.problem)?;
    out.set_item("estimator", history.estimator.name())?;
    out.set_item("converged", history.converged)?;
    out.set_item("levels", levels)?;
    let (r_eta, r_err) = history.rates().map_or((None, None), |(a, b)| (Some(a), b));
    out.set_item("r_eta", r_eta)?;
    out.set_item("r_err", r_err)?;
    Ok(out)
}

fn violations(report: &MonotonicityReport) -> Vec<(usize, bool, String)> {
    report
        .violations()
        .map(|c| {
            let reason = c.violation.as_ref().map_or(String::new(), |v| v.to_string());
            (c.entity, c.boundary, reason)
        })
        .collect()
}

/// Quasi-monotonicity of `μ⁻¹` over edge patches (`kind="edge"`) or of `β`
/// over vertex patches (`kind="vertex"`). Returns `(ok, violations)` with one
/// `(entity, on_boundary, reason)` tuple per failing patch.
#[pyfunction]
#[pyo3(signature = (mesh, coefficients, kind = "edge"))]
fn check_quasimonotone(
    mesh: &PyMesh,
    coefficients: &PyCoefficients,
    kind: &str,
) -> PyResult<(bool, Vec<(usize, bool, String)>)> {
    let (m, c) = (&mesh.inner, &coefficients.inner);
    c.validate(m).map_err(to_py)?;
    let patches = build_patches(m, c);
    let report = match kind {
        "edge" => analysis::check_quasimonotone_edge(m, c, &patches),
        "vertex" => analysis::check_quasimonotone_vertex(m, c, &patches),
        _ => return Err(PyValueError::new_err(format!("kind must be 'edge' or 'vertex', got '{kind}'"))),
    };
    Ok((report.quasi_monotone, violations(&report)))
}

/// Recovery estimator of an ND₀ field given by its edge values, with `f = 0`.
#[pyfunction]
fn recovery_indicators(mesh: &PyMesh, coefficients: &PyCoefficients, values: Vec<f64>) -> PyResult<PyIndicators> {
    let (m, c) = (&mesh.inner, &coefficients.inner);
    c.validate(m).map_err(to_py)?;
    let u_h = FeFunction::new(Space::Nd0, m, values).map_err(to_py)?;
    let patches = build_patches(m, c);
    let inner = estimators::eta_recovery(m, c, &patches, &u_h, &Source::zero()).map_err(to_py)?;
    Ok(PyIndicators { inner })
}

/// The norm identity on the built-in field suite: `(name, lhs, rhs, defect)`.
/// The interface planes of the suite lie at multiples of 1/6, so `cells`
/// must be a multiple of 6.
#[pyfunction]
#[pyo3(signature = (cells = 6, order = 12))]
fn identity_suite(py: Python<'_>, cells: usize, order: usize) -> PyResult<Vec<(String, f64, f64, f64)>> {
    py.detach(|| {
        analysis::identity_suite()
            .iter()
            .map(|case| {
                let r = case.run(cells, order)?;
                Ok((case.name.to_string(), r.lhs, r.rhs, r.defect))
            })
            .collect::<hcurl_afem::Result<Vec<_>>>()
    })
    .map_err(to_py)
}

#[pyfunction]
fn benchmark_names() -> Vec<&'static str> {
    amr::BENCHMARK_NAMES.to_vec()
}

#[pyfunction]
fn estimator_names() -> Vec<&'static str> {
    EstimatorKind::ALL.iter().map(|k| k.name()).collect()
}

/// Adaptive edge elements for H(curl) interface problems.
#[pymodule]
pub mod hcurl_afem_py {
    #[pymodule_export]
    use super::{
        amr_loop, benchmark_names, check_quasimonotone, dorfler_mark, estimator_names, identity_suite,
        recovery_indicators, PyBenchmark, PyCoefficients, PyIndicators, PyMesh, PySolution,
    };
}
