use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use roguewave_core as rw;
use roguewave_core::rng::substream;

fn py_err(e: rw::Error) -> PyErr {
    match e {
        rw::Error::InvalidArgument(_) | rw::Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "PhaseDistribution", frozen)]
struct PyPhaseDistribution {
    inner: rw::PhaseDistribution,
}

#[pymethods]
impl PyPhaseDistribution {
    #[staticmethod]
    fn continuous() -> Self {
        PyPhaseDistribution {
            inner: rw::PhaseDistribution::ContinuousUniform,
        }
    }

    #[staticmethod]
    fn discrete(q: u32) -> PyResult<Self> {
        Ok(PyPhaseDistribution {
            inner: rw::PhaseDistribution::discrete(q).map_err(py_err)?,
        })
    }

    #[getter]
    fn q(&self) -> Option<u32> {
        match self.inner {
            rw::PhaseDistribution::DiscreteQ { q } => Some(q),
            rw::PhaseDistribution::ContinuousUniform => None,
        }
    }

    fn levels(&self) -> Option<Vec<f64>> {
        self.inner.levels()
    }

    fn warning(&self) -> Option<String> {
        self.inner.warning()
    }

    /// (mean, variance) of the source law.
    fn theoretical_moments(&self) -> (f64, f64) {
        rw::theoretical_moments(&self.inner)
    }

    /// (E[cos φ], E[sin φ]).
    fn fourier_coeffs(&self) -> (f64, f64) {
        rw::fourier_coeffs(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "RunningMoments")]
#[derive(Default)]
struct PyRunningMoments {
    inner: rw::RunningMoments,
}

#[pymethods]
impl PyRunningMoments {
    #[new]
    fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, x: f64) -> PyResult<()> {
        self.inner.push(x).map_err(py_err)
    }

    fn extend(&mut self, xs: Vec<f64>) -> PyResult<()> {
        xs.into_iter().try_for_each(|x| self.inner.push(x)).map_err(py_err)
    }

    fn merge(&self, other: PyRef<'_, PyRunningMoments>) -> PyRunningMoments {
        PyRunningMoments {
            inner: rw::merge_moments(&self.inner, &other.inner),
        }
    }

    #[getter]
    fn count(&self) -> u64 {
        self.inner.count
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }

    #[getter]
    fn max(&self) -> f64 {
        self.inner.max
    }

    #[getter]
    fn min(&self) -> f64 {
        self.inner.min
    }

    fn variance(&self) -> Option<f64> {
        self.inner.variance()
    }

    fn std_dev(&self) -> Option<f64> {
        self.inner.std_dev()
    }

    /// (eta, eta_base) for this ensemble.
    #[pyo3(signature = (baseline_sigma=None))]
    fn rogue_level(&self, baseline_sigma: Option<f64>) -> PyResult<(f64, Option<f64>)> {
        let m = rw::rogue_level(f64::NAN, &self.inner, baseline_sigma).map_err(py_err)?;
        Ok((m.eta, m.eta_base))
    }
}

#[pyclass(name = "ExperimentConfig")]
struct PyExperimentConfig {
    inner: rw::ExperimentConfig,
}

#[pymethods]
impl PyExperimentConfig {
    #[new]
    #[pyo3(signature = (
        n_waves=1024, n_runs=10_000, n_beta=300, rho_list=None, q=None,
        shuffle=true, e0=1.0, seed=42, bin_width=0.25, bin_max=64.0
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_waves: usize,
        n_runs: usize,
        n_beta: usize,
        rho_list: Option<Vec<f64>>,
        q: Option<u32>,
        shuffle: bool,
        e0: f64,
        seed: u64,
        bin_width: f64,
        bin_max: f64,
    ) -> PyResult<Self> {
        let inner = rw::ExperimentConfig {
            n_waves,
            n_runs,
            n_beta,
            rho_list: rho_list.unwrap_or_else(|| rw::ExperimentConfig::default().rho_list),
            dist: q.map_or(rw::PhaseDistribution::ContinuousUniform, |q| {
                rw::PhaseDistribution::DiscreteQ { q }
            }),
            shuffle,
            e0,
            master_seed: seed,
            histogram: rw::HistogramSpec {
                width: bin_width,
                max: bin_max,
            },
        };
        inner.validate().map_err(py_err)?;
        Ok(PyExperimentConfig { inner })
    }

    #[getter]
    fn n_waves(&self) -> usize {
        self.inner.n_waves
    }

    #[getter]
    fn n_runs(&self) -> usize {
        self.inner.n_runs
    }

    #[getter]
    fn n_beta(&self) -> usize {
        self.inner.n_beta
    }

    #[getter]
    fn rho_list(&self) -> Vec<f64> {
        self.inner.rho_list.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.master_seed
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "SweepResult", frozen)]
struct PySweepResult {
    inner: rw::SweepResult,
}

impl PySweepResult {
    fn entry(&self, i: usize) -> PyResult<&rw::RhoResult> {
        self.inner
            .per_rho
            .get(i)
            .ok_or_else(|| PyIndexError::new_err(format!("no rho entry {i}")))
    }
}

#[pymethods]
impl PySweepResult {
    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.inner.betas.clone()
    }

    #[getter]
    fn rhos(&self) -> Vec<f64> {
        self.inner.per_rho.iter().map(|r| r.rho).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.per_rho.len()
    }

    fn mean_curve(&self, i: usize) -> PyResult<Vec<f64>> {
        Ok(self.entry(i)?.mean_curve.clone())
    }

    fn std_error(&self, i: usize) -> PyResult<Vec<f64>> {
        Ok(self.entry(i)?.std_error.clone())
    }

    /// (edges, counts, density) of the pooled normalized histogram.
    fn histogram(&self, i: usize) -> PyResult<(Vec<f64>, Vec<u64>, Vec<f64>)> {
        let h = &self.entry(i)?.histogram;
        Ok((h.edges.clone(), h.counts.clone(), h.density()))
    }

    fn metrics<'py>(&self, py: Python<'py>, i: usize) -> PyResult<Bound<'py, PyDict>> {
        let m = &self.entry(i)?.metrics;
        let d = PyDict::new(py);
        d.set_item("rho", m.rho)?;
        d.set_item("eta", m.eta)?;
        d.set_item("eta_base", m.eta_base)?;
        d.set_item("i_max", m.i_max)?;
        d.set_item("mean", m.mean)?;
        d.set_item("sigma", m.sigma)?;
        Ok(d)
    }
}

#[pyfunction]
fn mixing_angle(rho: f64) -> PyResult<f64> {
    rw::mixing_angle(rho).map_err(py_err)
}

#[pyfunction]
fn correlate_pair(phi_a: f64, phi_b: f64, rho: f64) -> PyResult<(f64, f64)> {
    let spec = rw::CorrelationSpec::new(rho).map_err(py_err)?;
    Ok(rw::correlate_pair(phi_a, phi_b, &spec))
}

/// Correlated phase vector drawn from substream `(seed, stream)`.
#[pyfunction]
#[pyo3(signature = (dist, rho, n, shuffle=true, seed=0, stream=0))]
fn make_correlated_phases(
    dist: PyRef<'_, PyPhaseDistribution>,
    rho: f64,
    n: usize,
    shuffle: bool,
    seed: u64,
    stream: usize,
) -> PyResult<Vec<f64>> {
    let mut rng = substream(seed, stream, 0);
    rw::make_correlated_phases(&dist.inner, rho, n, shuffle, &mut rng)
        .map(|v| v.values)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (beta, e0=1.0))]
fn envelope(beta: f64, e0: f64) -> f64 {
    rw::envelope(beta, e0)
}

/// (re, im, intensity) of the phasor sum.
#[pyfunction]
#[pyo3(signature = (phases, beta, e0=1.0))]
fn field_intensity(phases: Vec<f64>, beta: f64, e0: f64) -> PyResult<(f64, f64, f64)> {
    let p = rw::FieldParams::new(beta, phases.len(), e0).map_err(py_err)?;
    let s = rw::field_intensity(&phases, &p).map_err(py_err)?;
    Ok((s.re, s.im, s.intensity))
}

#[pyfunction]
#[pyo3(signature = (phases, beta, e0=1.0))]
fn intensity_expanded(phases: Vec<f64>, beta: f64, e0: f64) -> PyResult<f64> {
    let p = rw::FieldParams::new(beta, phases.len(), e0).map_err(py_err)?;
    rw::intensity_expanded(&phases, &p).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (beta, n, a=0.0, b=0.0, e0=1.0))]
fn expected_intensity(beta: f64, n: usize, a: f64, b: f64, e0: f64) -> f64 {
    rw::expected_intensity(beta, n, a, b, e0)
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    rw::pearson(&x, &y).map_err(py_err)
}

#[pyfunction]
fn beta_grid(n_beta: usize) -> PyResult<Vec<f64>> {
    rw::beta_grid(n_beta).map(|g| g.values).map_err(py_err)
}

#[pyfunction]
fn run_realization(
    config: PyRef<'_, PyExperimentConfig>,
    rho_index: usize,
    realization: usize,
) -> PyResult<Vec<f64>> {
    rw::run_realization(&config.inner, rho_index, realization).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (config, workers=None))]
fn run_sweep(
    py: Python<'_>,
    config: PyRef<'_, PyExperimentConfig>,
    workers: Option<usize>,
) -> PyResult<PySweepResult> {
    let cfg = config.inner.clone();
    let opts = rw::SweepOptions {
        keep_samples: false,
        workers,
    };
    let inner = py
        .detach(|| rw::run_sweep_with(&cfg, &opts))
        .map_err(py_err)?;
    Ok(PySweepResult { inner })
}

#[pymodule]
fn roguewave(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", rw::VERSION)?;
    m.add_class::<PyPhaseDistribution>()?;
    m.add_class::<PyRunningMoments>()?;
    m.add_class::<PyExperimentConfig>()?;
    m.add_class::<PySweepResult>()?;
    m.add_function(wrap_pyfunction!(mixing_angle, m)?)?;
    m.add_function(wrap_pyfunction!(correlate_pair, m)?)?;
    m.add_function(wrap_pyfunction!(make_correlated_phases, m)?)?;
    m.add_function(wrap_pyfunction!(envelope, m)?)?;
    m.add_function(wrap_pyfunction!(field_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(intensity_expanded, m)?)?;
    m.add_function(wrap_pyfunction!(expected_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(beta_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_realization, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
