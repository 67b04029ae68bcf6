//! Python bindings: precision formats, emulated dot products and the DOA
//! experiment harness.

use fpmusic::bench::{ru_music_costs, run_paired_trial, run_sweep, SweepConfig};
use fpmusic::doa::{steering_real, ArrayConfig, Method};
use fpmusic::kernels::{parse_scheme_list, CostLedger, OpCounts, Scheme};
use fpmusic::PrecisionFormat;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(fpmusic_py, FpmusicError, PyValueError);

fn err(e: fpmusic::Error) -> PyErr {
    FpmusicError::new_err(e.to_string())
}

fn counts_dict<'py>(py: Python<'py>, c: &OpCounts) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("weighted_adds", c.adds_f64())?;
    d.set_item("weighted_muls", c.muls_f64())?;
    d.set_item("overhead", c.overhead_f64())?;
    Ok(d)
}

/// A binary floating-point format, e.g. `fp16`, `bf16` or `11:-14:15:1`.
#[pyclass(name = "PrecisionFormat", frozen)]
struct PyFormat(PrecisionFormat);

#[pymethods]
impl PyFormat {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        descriptor.parse().map(Self).map_err(err)
    }

    /// Round to nearest, ties to even.
    fn round(&self, x: f64) -> PyResult<f64> {
        self.0.round(x).map_err(err)
    }

    fn add(&self, a: f64, b: f64) -> PyResult<f64> {
        self.0.add(a, b).map_err(err)
    }

    fn mul(&self, a: f64, b: f64) -> PyResult<f64> {
        self.0.mul(a, b).map_err(err)
    }

    #[getter]
    fn name(&self) -> &str {
        self.0.name()
    }

    #[getter]
    fn unit_roundoff(&self) -> f64 {
        self.0.unit_roundoff()
    }

    #[getter]
    fn max_finite(&self) -> f64 {
        self.0.max_finite()
    }

    fn __repr__(&self) -> String {
        format!("PrecisionFormat('{}')", self.0)
    }
}

/// Precision scheme of an inner product: `fp64`, `uniform:fp16`,
/// `mp:fp16:fp64:B=2` or `ap:fp64,fp32,fp16:gamma=2^-16`.
#[pyclass(name = "Scheme", frozen)]
struct PyScheme(Scheme);

#[pymethods]
impl PyScheme {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        descriptor.parse().map(Self).map_err(err)
    }

    fn dot(&self, b: Vec<f64>, c: Vec<f64>) -> PyResult<f64> {
        self.0.dot(&b, &c, &mut CostLedger::new()).map_err(err)
    }

    /// `(value, costs)` where costs holds the weighted counts of this call.
    fn dot_with_costs<'py>(&self, py: Python<'py>, b: Vec<f64>, c: Vec<f64>) -> PyResult<(f64, Bound<'py, PyDict>)> {
        let mut ledger = CostLedger::new();
        let y = self.0.dot(&b, &c, &mut ledger).map_err(err)?;
        Ok((y, counts_dict(py, &ledger.totals())?))
    }

    #[getter]
    fn is_adaptive(&self) -> bool {
        self.0.is_adaptive()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scheme('{}')", self.0)
    }
}

fn config(
    sensors: usize,
    sources: usize,
    snapshots: usize,
    rank: usize,
    grid_points: usize,
    schemes: &str,
    methods: &str,
) -> PyResult<SweepConfig> {
    let methods = methods
        .split(',')
        .map(|s| s.trim().parse::<Method>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    Ok(SweepConfig {
        sensors,
        sources,
        snapshots,
        rank,
        grid_points,
        schemes: parse_scheme_list(schemes).map_err(err)?,
        methods,
        ..SweepConfig::default()
    })
}

/// One seeded trial. Returns the true angles and, per method and scheme,
/// the estimates and weighted costs.
#[pyfunction]
#[pyo3(signature = (
    snr_db = 20.0, seed = 7, trial = 0, schemes = "fp64,ap:fp64,fp32,fp16:gamma=2^-16",
    methods = "music,u_music,ru_music", sensors = 20, sources = 5, snapshots = 40, rank = 10,
    grid_points = 1500,
))]
#[allow(clippy::too_many_arguments)]
fn estimate<'py>(
    py: Python<'py>,
    snr_db: f64,
    seed: u64,
    trial: usize,
    schemes: &str,
    methods: &str,
    sensors: usize,
    sources: usize,
    snapshots: usize,
    rank: usize,
    grid_points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = config(sensors, sources, snapshots, rank, grid_points, schemes, methods)?;
    cfg.snr_db = vec![snr_db];
    cfg.master_seed = seed;
    let paired = py.detach(|| run_paired_trial(&cfg, 0, trial)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("true_doas", paired.true_doas)?;
    let variants = pyo3::types::PyList::empty(py);
    for (method, scheme, est, ledger) in &paired.variants {
        let d = counts_dict(py, &ledger.totals())?;
        d.set_item("method", method.to_string())?;
        d.set_item("scheme", scheme.to_string())?;
        match est {
            Ok(e) => d.set_item("doas", e.doas.clone())?,
            Err(e) => d.set_item("error", e.to_string())?,
        }
        variants.append(d)?;
    }
    out.set_item("variants", variants)?;
    Ok(out)
}

/// Monte-Carlo sweep; one dict per (SNR, method, scheme) row.
#[pyfunction]
#[pyo3(signature = (
    snr_db, trials = 200, seed = 42, schemes = "fp64,uniform:fp16,mp:fp16:fp64:B=2,ap:fp64,fp32,fp16:gamma=2^-16",
    methods = "music,u_music,ru_music", sensors = 20, sources = 5, snapshots = 40, rank = 10,
    grid_points = 1500,
))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    snr_db: Vec<f64>,
    trials: usize,
    seed: u64,
    schemes: &str,
    methods: &str,
    sensors: usize,
    sources: usize,
    snapshots: usize,
    rank: usize,
    grid_points: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = config(sensors, sources, snapshots, rank, grid_points, schemes, methods)?;
    cfg.snr_db = snr_db;
    cfg.trials = trials;
    cfg.master_seed = seed;
    let result = py.detach(|| run_sweep(&cfg)).map_err(err)?;
    result
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("snr_db", r.snr_db)?;
            d.set_item("method", r.method.to_string())?;
            d.set_item("scheme", &r.scheme)?;
            d.set_item("rmse_deg", r.rmse_deg)?;
            d.set_item("failures", r.failures)?;
            d.set_item("weighted_adds", r.weighted_adds)?;
            d.set_item("weighted_muls", r.weighted_muls)?;
            d.set_item("overhead", r.overhead)?;
            Ok(d)
        })
        .collect()
}

/// Closed-form weighted costs of one RU-MUSIC run; `None` for adaptive
/// schemes.
#[pyfunction]
#[pyo3(signature = (scheme, m = 20, n = 5, k = 10, f = 1500))]
fn costs<'py>(py: Python<'py>, scheme: &str, m: usize, n: usize, k: usize, f: usize) -> PyResult<Option<Bound<'py, PyDict>>> {
    let scheme: Scheme = scheme.parse().map_err(err)?;
    match ru_music_costs(m, n, k, f, &scheme).map_err(err)? {
        Some(c) => Ok(Some(counts_dict(py, &c)?)),
        None => Ok(None),
    }
}

/// Real-valued steering vector of an even-sized array.
#[pyfunction]
fn real_steering(theta_deg: f64, sensors: usize) -> PyResult<Vec<f64>> {
    let cfg = ArrayConfig::new(sensors).map_err(err)?;
    steering_real(theta_deg, &cfg).map_err(err)
}

#[pymodule]
fn fpmusic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FpmusicError", m.py().get_type::<FpmusicError>())?;
    m.add_class::<PyFormat>()?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(costs, m)?)?;
    m.add_function(wrap_pyfunction!(real_steering, m)?)?;
    Ok(())
}
