//! Python bindings: indices, bounds, solvers, the single-arm oracle and the simulator.

use caaoi::analysis::{self, SingleArmMdp};
use caaoi::policies::{self, RandomizedParams};
use caaoi::sim::{self, PolicyKind, PolicySpec};
use caaoi::{bounds, Channel, Csi, MetricKind, SensorSpec, SystemSpec};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: caaoi::Error) -> PyErr {
    match e {
        caaoi::Error::NonConvergence { .. }
        | caaoi::Error::DegenerateEquation { .. }
        | caaoi::Error::MonotonicityViolation { .. }
        | caaoi::Error::NotThreshold { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn csi(name: &str) -> PyResult<Csi> {
    match name {
        "known" => Ok(Csi::Known),
        "unknown" => Ok(Csi::Unknown),
        other => Err(PyValueError::new_err(format!("csi must be 'known' or 'unknown', got {other:?}"))),
    }
}

fn csi_name(c: Csi) -> &'static str {
    match c {
        Csi::Known => "known",
        Csi::Unknown => "unknown",
    }
}

fn metric(name: &str) -> PyResult<MetricKind> {
    name.parse().map_err(err)
}

#[pyclass(frozen, get_all, from_py_object)]
#[derive(Clone)]
struct Sensor {
    weight: f64,
    p: f64,
    csi: String,
}

#[pymethods]
impl Sensor {
    #[new]
    #[pyo3(signature = (weight, p, csi = "unknown"))]
    fn new(weight: f64, p: f64, csi: &str) -> PyResult<Self> {
        self::csi(csi)?;
        Ok(Self {
            weight,
            p,
            csi: csi.to_string(),
        })
    }

    fn __repr__(&self) -> String {
        format!("Sensor(weight={}, p={}, csi='{}')", self.weight, self.p, self.csi)
    }
}

/// A validated sensor set. Weights are normalized to sum to one unless
/// `normalize_weights` is false.
#[pyclass(frozen)]
struct System {
    inner: caaoi::System,
}

#[pymethods]
impl System {
    #[new]
    #[pyo3(signature = (sensors, normalize_weights = true))]
    fn new(sensors: Vec<Sensor>, normalize_weights: bool) -> PyResult<Self> {
        let specs = sensors
            .iter()
            .map(|s| Ok(SensorSpec::new(s.weight, s.p, csi(&s.csi)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = SystemSpec::new(specs, normalize_weights).validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    #[getter]
    fn csi(&self) -> Vec<&'static str> {
        self.inner.csi().iter().map(|&c| csi_name(c)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn lower_bound(&self) -> LowerBound {
        let b = bounds::lower_bound_partial(&self.inner);
        LowerBound {
            value: b.value,
            no_csi: b.no_csi,
            csi: b.csi,
        }
    }
}

#[pyclass(frozen, get_all, name = "Bound")]
struct LowerBound {
    value: f64,
    no_csi: f64,
    csi: f64,
}

#[pyclass(frozen, get_all)]
struct RandomizedSolution {
    deltas: Vec<f64>,
    alphas: Vec<f64>,
    lambda_star: f64,
}

impl From<RandomizedParams> for RandomizedSolution {
    fn from(p: RandomizedParams) -> Self {
        Self {
            deltas: p.deltas,
            alphas: p.alphas,
            lambda_star: p.lambda_star,
        }
    }
}

#[pyclass(frozen, get_all)]
struct RunReport {
    avg_weighted_age: f64,
    std_error: f64,
    throughput: f64,
    resource_fractions: Vec<f64>,
    seeds_used: Vec<u64>,
    replicate_costs: Vec<f64>,
}

/// Discounted solution of one arm; thresholds are `None` where the arm never plays.
#[pyclass(frozen, get_all)]
struct ArmSolution {
    threshold_on: Option<u64>,
    threshold_off: Option<u64>,
    values_on: Vec<f64>,
    iterations: usize,
    residual: f64,
    monotone: bool,
}

#[pyfunction]
fn whittle_index_no_csi(x: u64, p: f64, w: f64) -> f64 {
    policies::whittle_index_no_csi(x, p, w)
}

#[pyfunction]
#[pyo3(signature = (x, on, w))]
fn whittle_index_csi(x: u64, on: bool, w: f64) -> f64 {
    policies::whittle_index_csi(x, Channel::from_on(on), w)
}

#[pyfunction]
fn numeric_whittle(csi: &str, x: u64, w: f64, p: f64) -> PyResult<f64> {
    analysis::numeric_whittle(self::csi(csi)?, x, w, p).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (csi, x, w, p, metric = "ca_aoi"))]
fn kernel_whittle(csi: &str, x: u64, w: f64, p: f64, metric: &str) -> PyResult<f64> {
    analysis::kernel_whittle(self::csi(csi)?, self::metric(metric)?, w, p, x).map_err(err)
}

#[pyfunction]
fn threshold_avg_cost(csi: &str, threshold: u64, charge: f64, w: f64, p: f64) -> PyResult<f64> {
    Ok(analysis::threshold_avg_cost(self::csi(csi)?, threshold, charge, w, p))
}

#[pyfunction]
fn expected_age_no_csi(p: f64, delta: f64, t: u64) -> PyResult<f64> {
    analysis::expected_age_no_csi(p, delta, t).map_err(err)
}

#[pyfunction]
fn expected_age_csi(p: f64, alpha: f64, t: u64) -> PyResult<f64> {
    analysis::expected_age_csi(p, alpha, t).map_err(err)
}

#[pyfunction]
fn lower_bound_no_csi(weights: Vec<f64>, probs: Vec<f64>) -> PyResult<f64> {
    bounds::lower_bound_no_csi(&weights, &probs).map_err(err)
}

#[pyfunction]
fn lower_bound_csi(weights: Vec<f64>, probs: Vec<f64>) -> PyResult<f64> {
    bounds::lower_bound_csi(&weights, &probs).map_err(err)
}

#[pyfunction]
fn solve_randomized_no_csi(weights: Vec<f64>) -> PyResult<Vec<f64>> {
    policies::solve_randomized_no_csi(&weights).map_err(err)
}

#[pyfunction]
fn solve_randomized_csi(weights: Vec<f64>, probs: Vec<f64>) -> PyResult<Vec<f64>> {
    policies::solve_randomized_csi(&weights, &probs).map_err(err)
}

#[pyfunction]
fn solve_randomized_partial(
    weights_minus: Vec<f64>,
    weights_plus: Vec<f64>,
    probs_plus: Vec<f64>,
) -> PyResult<RandomizedSolution> {
    policies::solve_randomized_partial(&weights_minus, &weights_plus, &probs_plus)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (csi, p, w, charge, max_age = 500, metric = "ca_aoi", discount = 0.999, tol = 1e-10))]
#[allow(clippy::too_many_arguments)]
fn value_iterate(
    py: Python<'_>,
    csi: &str,
    p: f64,
    w: f64,
    charge: f64,
    max_age: u64,
    metric: &str,
    discount: f64,
    tol: f64,
) -> PyResult<ArmSolution> {
    let mdp = SingleArmMdp::new(self::csi(csi)?, p, w, charge, max_age, self::metric(metric)?).map_err(err)?;
    let vf = py
        .detach(|| analysis::value_iterate(&mdp, discount, tol))
        .map_err(err)?;
    Ok(ArmSolution {
        threshold_on: vf.threshold(Channel::On).map_err(err)?,
        threshold_off: vf.threshold(Channel::Off).map_err(err)?,
        values_on: (0..=vf.max_age()).map(|x| vf.value(x, Channel::On)).collect(),
        iterations: vf.iterations,
        residual: vf.residual,
        monotone: vf.first_decrease().is_none(),
    })
}

/// Simulates `policy` on `system`, scoring `metric`. `target` picks the age
/// the Whittle policy is tuned for; it defaults to `metric`.
#[pyfunction]
#[pyo3(signature = (system, policy = "whittle", metric = "ca_aoi", target = None, horizon = 1_000_000, seed = 0, replications = 10))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    system: &System,
    policy: &str,
    metric: &str,
    target: Option<&str>,
    horizon: u64,
    seed: u64,
    replications: u32,
) -> PyResult<RunReport> {
    let kind: PolicyKind = policy.parse().map_err(err)?;
    let mut spec = PolicySpec::new(kind);
    if let Some(t) = target {
        spec = spec.targeting(self::metric(t)?);
    }
    let metric = self::metric(metric)?;
    let r = py
        .detach(|| sim::run_system(&system.inner, &spec, metric, horizon, seed, replications))
        .map_err(err)?;
    Ok(RunReport {
        avg_weighted_age: r.avg_weighted_age,
        std_error: r.std_error,
        throughput: r.throughput,
        resource_fractions: r.resource_fractions,
        seeds_used: r.seeds_used,
        replicate_costs: r.replicate_costs,
    })
}

#[pymodule]
#[pyo3(name = "caaoi")]
fn caaoi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Sensor>()?;
    m.add_class::<System>()?;
    m.add_class::<LowerBound>()?;
    m.add_class::<RandomizedSolution>()?;
    m.add_class::<RunReport>()?;
    m.add_class::<ArmSolution>()?;
    m.add_function(wrap_pyfunction!(whittle_index_no_csi, m)?)?;
    m.add_function(wrap_pyfunction!(whittle_index_csi, m)?)?;
    m.add_function(wrap_pyfunction!(numeric_whittle, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_whittle, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_avg_cost, m)?)?;
    m.add_function(wrap_pyfunction!(expected_age_no_csi, m)?)?;
    m.add_function(wrap_pyfunction!(expected_age_csi, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_no_csi, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_csi, m)?)?;
    m.add_function(wrap_pyfunction!(solve_randomized_no_csi, m)?)?;
    m.add_function(wrap_pyfunction!(solve_randomized_csi, m)?)?;
    m.add_function(wrap_pyfunction!(solve_randomized_partial, m)?)?;
    m.add_function(wrap_pyfunction!(value_iterate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
