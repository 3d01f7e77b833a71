//! Python bindings: von Mises sampling, the Pfaffian system, and fits by
//! HGD, CHGD or direct Newton.

use hgd_core::bench::TrialRecord;
use hgd_core::{
    fit_vm, gradient, hessian, propagate, run_benchmark, sufficient_stats, vm_initial_state,
    vm_objective_oracle, vm_pfaffian_system, AngleData, BenchSpec, Error, IntegratorConfig, Method,
    Minimum, OptimizerConfig, PenaltyConfig, StateVector, SufficientStats, VmConstraint, VmParams,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::SingularPath { .. }
        | Error::SingularHessian { .. }
        | Error::LineSearchFailed { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn stats_of(angles: Vec<f64>) -> PyResult<SufficientStats> {
    let data = AngleData::new(angles).map_err(to_py_err)?;
    sufficient_stats(&data).map_err(to_py_err)
}

fn parse_methods(names: &[String]) -> PyResult<Vec<Method>> {
    names
        .iter()
        .map(|s| s.parse::<Method>().map_err(to_py_err))
        .collect()
}

fn parse_constraints(specs: &[String]) -> PyResult<Vec<VmConstraint>> {
    specs
        .iter()
        .map(|s| s.parse::<VmConstraint>().map_err(to_py_err))
        .collect()
}

/// `(c_bar, s_bar, n)` of a list of angles in radians.
#[pyfunction(name = "sufficient_stats")]
fn py_sufficient_stats(angles: Vec<f64>) -> PyResult<(f64, f64, usize)> {
    let s = stats_of(angles)?;
    Ok((s.c_bar, s.s_bar, s.n))
}

/// Seeded von Mises sample of `n` angles in `[0, 2π)`.
#[pyfunction(name = "vm_sample")]
fn py_vm_sample(kappa: f64, mu: f64, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    let data = hgd_core::vm_sample(kappa, mu, n, seed).map_err(to_py_err)?;
    Ok(data.angles().to_vec())
}

/// The likelihood objective `L(θ)` by quadrature.
#[pyfunction]
fn vm_objective(theta: (f64, f64), c_bar: f64, s_bar: f64) -> PyResult<f64> {
    let stats = SufficientStats::new(c_bar, s_bar, 1).map_err(to_py_err)?;
    Ok(vm_objective_oracle(
        VmParams::natural(theta.0, theta.1),
        &stats,
    ))
}

/// The von Mises likelihood as a Pfaffian system for fixed data.
#[pyclass(name = "VonMises", frozen)]
struct PyVonMises {
    stats: SufficientStats,
}

impl PyVonMises {
    fn state(&self, theta: (f64, f64), values: (f64, f64)) -> StateVector {
        StateVector::new(vec![theta.0, theta.1], vec![values.0, values.1])
    }
}

#[pymethods]
impl PyVonMises {
    #[new]
    #[pyo3(signature = (c_bar, s_bar, n = 1))]
    fn new(c_bar: f64, s_bar: f64, n: usize) -> PyResult<Self> {
        let stats = SufficientStats::new(c_bar, s_bar, n).map_err(to_py_err)?;
        Ok(Self { stats })
    }

    #[staticmethod]
    fn from_angles(angles: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            stats: stats_of(angles)?,
        })
    }

    #[getter]
    fn c_bar(&self) -> f64 {
        self.stats.c_bar
    }

    #[getter]
    fn s_bar(&self) -> f64 {
        self.stats.s_bar
    }

    #[getter]
    fn n(&self) -> usize {
        self.stats.n
    }

    /// State vector `F(θ)` by direct quadrature.
    fn initial_state(&self, theta: (f64, f64)) -> PyResult<(f64, f64)> {
        let s = vm_initial_state(VmParams::natural(theta.0, theta.1), &self.stats)
            .map_err(to_py_err)?;
        Ok((s.values[0], s.values[1]))
    }

    /// Carries `values = F(start)` to `target` along a straight segment.
    #[pyo3(signature = (start, values, target, substeps_per_unit = None))]
    fn propagate(
        &self,
        start: (f64, f64),
        values: (f64, f64),
        target: (f64, f64),
        substeps_per_unit: Option<usize>,
    ) -> PyResult<(f64, f64)> {
        let mut cfg = IntegratorConfig::default();
        if let Some(s) = substeps_per_unit {
            cfg.substeps_per_unit = s;
        }
        let sys = vm_pfaffian_system(self.stats);
        let end = propagate(
            &sys,
            &self.state(start, values),
            &[target.0, target.1],
            &cfg,
        )
        .map_err(to_py_err)?;
        Ok((end.values[0], end.values[1]))
    }

    fn gradient(&self, theta: (f64, f64), values: (f64, f64)) -> PyResult<(f64, f64)> {
        let g = gradient(&vm_pfaffian_system(self.stats), &self.state(theta, values))
            .map_err(to_py_err)?;
        Ok((g[0], g[1]))
    }

    fn hessian(&self, theta: (f64, f64), values: (f64, f64)) -> PyResult<Vec<Vec<f64>>> {
        let h = hessian(&vm_pfaffian_system(self.stats), &self.state(theta, values))
            .map_err(to_py_err)?;
        Ok((0..2)
            .map(|i| (0..2).map(|j| h[(i, j)]).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "VonMises(c_bar={}, s_bar={}, n={})",
            self.stats.c_bar, self.stats.s_bar, self.stats.n
        )
    }
}

fn minimum_dict<'py>(py: Python<'py>, method: Method, m: &Minimum) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let point = (m.point()[0], m.point()[1]);
    let (kappa, mu) = VmParams::natural(point.0, point.1).to_polar();
    d.set_item("method", method.as_str())?;
    d.set_item("estimate", point)?;
    d.set_item("kappa", kappa)?;
    d.set_item("mu", mu)?;
    d.set_item("status", m.status.as_str())?;
    d.set_item("converged", m.status.is_converged())?;
    d.set_item("iterations", m.iterations)?;
    d.set_item("objective", m.state.objective())?;
    let trace: Vec<(usize, f64, f64, f64, f64, f64)> = m
        .trace
        .records
        .iter()
        .map(|r| {
            (
                r.k,
                r.point[0],
                r.point[1],
                r.objective,
                r.grad_norm,
                r.alpha,
            )
        })
        .collect();
    d.set_item("trace", trace)?;
    Ok(d)
}

/// Fits the von Mises model to `angles`.
///
/// Returns a dict with the estimate, its polar form, the final status and
/// the trace as `(k, theta1, theta2, L, grad_norm, alpha)` tuples.
#[pyfunction]
#[pyo3(signature = (
    angles,
    method = "hgd",
    x0 = (-2.0, 0.1),
    constraints = Vec::new(),
    max_iters = None,
    grad_tol = None,
    rho = None,
    xi = None,
    shrink = None,
))]
#[allow(clippy::too_many_arguments)]
fn fit<'py>(
    py: Python<'py>,
    angles: Vec<f64>,
    method: &str,
    x0: (f64, f64),
    constraints: Vec<String>,
    max_iters: Option<usize>,
    grad_tol: Option<f64>,
    rho: Option<f64>,
    xi: Option<f64>,
    shrink: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let method: Method = method.parse().map_err(to_py_err)?;
    let stats = stats_of(angles)?;
    let constraints = parse_constraints(&constraints)?;
    let mut cfg = OptimizerConfig::default();
    cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
    cfg.grad_tol = grad_tol.unwrap_or(cfg.grad_tol);
    let mut pcfg = PenaltyConfig::default();
    pcfg.rho = rho.unwrap_or(pcfg.rho);
    pcfg.xi = xi.unwrap_or(pcfg.xi);
    pcfg.shrink = shrink.unwrap_or(pcfg.shrink);
    let m = py
        .detach(|| fit_vm(method, &stats, [x0.0, x0.1], &constraints, &cfg, &pcfg))
        .map_err(to_py_err)?;
    minimum_dict(py, method, &m)
}

fn trial_dict<'py>(py: Python<'py>, t: &TrialRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("trial", t.trial)?;
    d.set_item("seed", t.seed)?;
    d.set_item("method", t.method.as_str())?;
    d.set_item("seconds", t.seconds)?;
    d.set_item("estimate", t.estimate.map(|e| (e[0], e[1])))?;
    d.set_item("iterations", t.iterations)?;
    d.set_item("status", t.status.map(|s| s.as_str()))?;
    d.set_item("error", t.error.clone())?;
    Ok(d)
}

/// Paired benchmark; returns `{"summary": {method: {...}}, "trials": [...]}`.
#[pyfunction]
#[pyo3(signature = (
    trials = 500,
    methods = vec!["hgd".to_string(), "chgd".to_string(), "newton".to_string()],
    kappa = None,
    mu = None,
    n = 100,
    seed = 0,
    constraints = Vec::new(),
))]
#[allow(clippy::too_many_arguments)]
fn benchmark<'py>(
    py: Python<'py>,
    trials: usize,
    methods: Vec<String>,
    kappa: Option<f64>,
    mu: Option<f64>,
    n: usize,
    seed: u64,
    constraints: Vec<String>,
) -> PyResult<Bound<'py, PyDict>> {
    let defaults = BenchSpec::default();
    let constraints = parse_constraints(&constraints)?;
    let spec = BenchSpec {
        trials,
        methods: parse_methods(&methods)?,
        kappa: kappa.unwrap_or(defaults.kappa),
        mu: mu.unwrap_or(defaults.mu),
        n,
        seed,
        constraints: if constraints.is_empty() {
            defaults.constraints.clone()
        } else {
            constraints
        },
        ..defaults
    };
    let report = py.detach(|| run_benchmark(&spec)).map_err(to_py_err)?;

    let summary = PyDict::new(py);
    for s in &report.summaries {
        let d = PyDict::new(py);
        d.set_item("mean_seconds", s.mean_seconds)?;
        d.set_item("mean_estimate", (s.mean_estimate[0], s.mean_estimate[1]))?;
        d.set_item("succeeded", s.succeeded)?;
        d.set_item("failures", s.failures)?;
        summary.set_item(s.method.as_str(), d)?;
    }
    let rows = report
        .trials
        .iter()
        .map(|t| trial_dict(py, t))
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("summary", summary)?;
    out.set_item("trials", rows)?;
    Ok(out)
}

#[pymodule]
fn hgd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(py_sufficient_stats, m)?)?;
    m.add_function(wrap_pyfunction!(py_vm_sample, m)?)?;
    m.add_function(wrap_pyfunction!(vm_objective, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    m.add_class::<PyVonMises>()?;
    Ok(())
}
