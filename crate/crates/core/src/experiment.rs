//! Seeded ensembles over `(ρ, β)` and their reductions.
//!
//! One realization draws a single correlated phase vector and evaluates the
//! intensity at every point of the `β` grid with it. Realization `r` of the
//! `i`-th entry of `rho_list` always uses substream
//! `(master_seed, i, r)`, so a sweep is reproducible bit-for-bit regardless
//! of how many worker threads evaluate it.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{envelope, GridEvaluator, LANES};
use crate::phases::{fill_correlated_phases, CorrelationSpec, PhaseDistribution, PhaseVector};
use crate::rng::substream;
use crate::stats::{rogue_level, Histogram, HistogramSpec, RogueMetrics, RunningMoments};

/// `n_beta` equally spaced points on `[0, 2π]`, both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGrid {
    pub values: Vec<f64>,
}

impl BetaGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        TAU / (self.values.len() - 1) as f64
    }
}

pub fn beta_grid(n_beta: usize) -> Result<BetaGrid> {
    if n_beta < 2 {
        return Err(Error::arg(format!("n_beta must be at least 2, got {n_beta}")));
    }
    let last = (n_beta - 1) as f64;
    let mut values: Vec<f64> = (0..n_beta).map(|k| TAU * k as f64 / last).collect();
    values[n_beta - 1] = TAU;
    Ok(BetaGrid { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_waves: usize,
    pub n_runs: usize,
    pub n_beta: usize,
    pub rho_list: Vec<f64>,
    pub dist: PhaseDistribution,
    pub shuffle: bool,
    pub e0: f64,
    pub master_seed: u64,
    pub histogram: HistogramSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_waves: 1024,
            n_runs: 10_000,
            n_beta: 300,
            rho_list: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            dist: PhaseDistribution::ContinuousUniform,
            shuffle: true,
            e0: 1.0,
            master_seed: 42,
            histogram: HistogramSpec::default(),
        }
    }
}

impl ExperimentConfig {
    /// Checks every field; returns non-fatal warnings (even `q`).
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n_waves == 0 {
            return Err(Error::arg("n_waves must be at least 1"));
        }
        if self.n_runs == 0 {
            return Err(Error::arg("n_runs must be at least 1"));
        }
        if self.n_runs > u32::MAX as usize {
            return Err(Error::arg("n_runs exceeds the substream index range"));
        }
        if self.n_beta < 2 {
            return Err(Error::arg(format!("n_beta must be at least 2, got {}", self.n_beta)));
        }
        if self.rho_list.is_empty() {
            return Err(Error::arg("rho_list is empty"));
        }
        for &rho in &self.rho_list {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::arg(format!("rho {rho} outside [0, 1]")));
            }
            if rho != 0.0 && !self.n_waves.is_multiple_of(2) {
                return Err(Error::arg(format!(
                    "n_waves = {} must be even for correlated phases (rho = {rho})",
                    self.n_waves
                )));
            }
        }
        if !(self.e0 > 0.0 && self.e0.is_finite()) {
            return Err(Error::arg(format!("e0 must be positive, got {}", self.e0)));
        }
        self.dist.validate()?;
        self.histogram.validate()?;
        Ok(self.dist.warning().into_iter().collect())
    }

    fn rho_at(&self, rho_index: usize) -> Result<f64> {
        self.rho_list.get(rho_index).copied().ok_or_else(|| {
            Error::arg(format!(
                "rho index {rho_index} out of range for {} values",
                self.rho_list.len()
            ))
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Keep the raw pooled intensities (realization-major) of every `ρ`.
    pub keep_samples: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoResult {
    pub rho: f64,
    /// Pooled `I/Ī` over every `(realization, β)` sample.
    pub histogram: Histogram,
    pub metrics: RogueMetrics,
    pub pooled: RunningMoments,
    /// `⟨I⟩(β)` and its standard error, one entry per grid point.
    pub mean_curve: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Raw intensities indexed `realization * n_beta + k`, if requested.
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub betas: Vec<f64>,
    pub per_rho: Vec<RhoResult>,
    pub version: &'static str,
}

impl SweepResult {
    pub fn rho(&self, rho: f64) -> Option<&RhoResult> {
        self.per_rho.iter().find(|r| r.rho == rho)
    }
}

/// The correlated phase vector of one realization.
pub fn realization_phases(
    config: &ExperimentConfig,
    rho_index: usize,
    realization: usize,
) -> Result<PhaseVector> {
    let rho = config.rho_at(rho_index)?;
    let spec = CorrelationSpec::new(rho)?;
    let mut values = vec![0.0; config.n_waves];
    let mut rng = substream(config.master_seed, rho_index, realization);
    fill_correlated_phases(&config.dist, &spec, config.shuffle, &mut rng, &mut values)?;
    Ok(PhaseVector {
        values,
        rho_used: rho,
        shuffled: config.shuffle,
    })
}

/// Intensities over the config's `β` grid for an explicit phase vector.
pub fn evaluate_phases(config: &ExperimentConfig, phases: &[f64]) -> Result<Vec<f64>> {
    let grid = beta_grid(config.n_beta)?;
    let ev = GridEvaluator::new(&grid.values, config.n_waves, config.e0)?;
    let mut out = vec![0.0; grid.len()];
    ev.evaluate(phases, &mut out)?;
    Ok(out)
}

/// One realization evaluated over the whole grid.
pub fn run_realization(
    config: &ExperimentConfig,
    rho_index: usize,
    realization: usize,
) -> Result<Vec<f64>> {
    config.validate()?;
    let phases = realization_phases(config, rho_index, realization)?;
    evaluate_phases(config, &phases.values)
}

fn fill_ensemble(
    config: &ExperimentConfig,
    evaluator: &GridEvaluator,
    rho_index: usize,
    buffer: &mut [f64],
) -> Result<()> {
    let n_beta = evaluator.betas().len();
    let spec = CorrelationSpec::new(config.rho_at(rho_index)?)?;
    buffer
        .par_chunks_mut(LANES * n_beta)
        .enumerate()
        .try_for_each(|(batch, chunk)| -> Result<()> {
            let first = batch * LANES;
            let lanes = chunk.len() / n_beta;
            let mut phases = vec![vec![0.0; config.n_waves]; lanes];
            for (k, p) in phases.iter_mut().enumerate() {
                let mut rng = substream(config.master_seed, rho_index, first + k);
                fill_correlated_phases(&config.dist, &spec, config.shuffle, &mut rng, p)?;
            }
            let refs: Vec<&[f64]> = phases.iter().map(Vec::as_slice).collect();
            let mut outs: Vec<&mut [f64]> = chunk.chunks_mut(n_beta).collect();
            evaluator.evaluate_batch(&refs, &mut outs)
        })
}

fn reduce_ensemble(
    rho: f64,
    samples: &[f64],
    n_beta: usize,
    spec: &HistogramSpec,
) -> Result<(RhoResult, RunningMoments)> {
    let mut per_beta = vec![RunningMoments::new(); n_beta];
    let mut pooled = RunningMoments::new();
    for row in samples.chunks_exact(n_beta) {
        for (m, &x) in per_beta.iter_mut().zip(row) {
            m.push(x)?;
            pooled.push(x)?;
        }
    }
    if pooled.mean.is_nan() || pooled.mean <= 0.0 {
        return Err(Error::Degenerate(format!(
            "pooled mean intensity {} is not positive",
            pooled.mean
        )));
    }
    let mut histogram = Histogram::new(spec)?;
    for &x in samples {
        histogram.add(x / pooled.mean);
    }
    let mean_curve = per_beta.iter().map(|m| m.mean).collect();
    let std_error = per_beta
        .iter()
        .map(|m| m.std_error().unwrap_or(f64::NAN))
        .collect();
    let metrics = rogue_level(rho, &pooled, None)?;
    Ok((
        RhoResult {
            rho,
            histogram,
            metrics,
            pooled,
            mean_curve,
            std_error,
            samples: None,
        },
        pooled,
    ))
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with(config, &SweepOptions::default())
}

pub fn run_sweep_with(config: &ExperimentConfig, options: &SweepOptions) -> Result<SweepResult> {
    match options.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
            pool.install(|| sweep_inner(config, options))
        }
        None => sweep_inner(config, options),
    }
}

fn sweep_inner(config: &ExperimentConfig, options: &SweepOptions) -> Result<SweepResult> {
    config.validate()?;
    let grid = beta_grid(config.n_beta)?;
    let evaluator = GridEvaluator::new(&grid.values, config.n_waves, config.e0)?;
    let total = config
        .n_runs
        .checked_mul(config.n_beta)
        .ok_or_else(|| Error::Resource("sample count overflows".into()))?;

    let mut per_rho = Vec::with_capacity(config.rho_list.len());
    for (rho_index, &rho) in config.rho_list.iter().enumerate() {
        let mut buffer: Vec<f64> = Vec::new();
        buffer
            .try_reserve_exact(total)
            .map_err(|e| Error::Resource(format!("{total} intensity samples: {e}")))?;
        buffer.resize(total, 0.0);
        fill_ensemble(config, &evaluator, rho_index, &mut buffer)?;
        let (mut result, _) = reduce_ensemble(rho, &buffer, config.n_beta, &config.histogram)?;
        if options.keep_samples {
            result.samples = Some(buffer);
        }
        per_rho.push(result);
    }

    if let Some(base) = per_rho.iter().find(|r| r.rho == 0.0).map(|r| r.metrics.sigma) {
        for r in &mut per_rho {
            r.metrics = rogue_level(r.rho, &r.pooled, Some(base))?;
        }
    }

    Ok(SweepResult {
        config: config.clone(),
        betas: grid.values,
        per_rho,
        version: crate::VERSION,
    })
}

/// Repeat the sweep at each `β` partition size with everything else fixed.
pub fn nbeta_study(
    config: &ExperimentConfig,
    n_beta_list: &[usize],
    options: &SweepOptions,
) -> Result<Vec<SweepResult>> {
    if n_beta_list.is_empty() {
        return Err(Error::arg("empty n_beta list"));
    }
    if let Some(bad) = n_beta_list.iter().find(|&&n| n < 2) {
        return Err(Error::arg(format!("n_beta must be at least 2, got {bad}")));
    }
    n_beta_list
        .iter()
        .map(|&n_beta| {
            let cfg = ExperimentConfig {
                n_beta,
                ..config.clone()
            };
            run_sweep_with(&cfg, options)
        })
        .collect()
}

/// Spread of `⟨I⟩(β) / (N A_β²)` over grid points where `A_β² ≥ 0.01 E₀²`.
/// With independent phases the ratio is flat at 1; pair structure and
/// coherent peaks show up as oscillation around it.
pub fn detrended_oscillation(mean_curve: &[f64], betas: &[f64], n_waves: usize, e0: f64) -> f64 {
    let ratios: Vec<f64> = mean_curve
        .iter()
        .zip(betas)
        .filter_map(|(&m, &b)| {
            let a2 = envelope(b, e0).powi(2);
            (a2 >= 0.01 * e0 * e0).then(|| m / (n_waves as f64 * a2))
        })
        .collect();
    RunningMoments::from_slice(&ratios)
        .ok()
        .and_then(|m| m.std_dev())
        .unwrap_or(0.0)
}
