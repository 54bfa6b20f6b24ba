//! Phase sources and the pairwise correlation transform.
//!
//! Two i.i.d. phases `x, y` with zero mean and variance `σ²` are mixed as
//!
//! ```text
//! φ₁ = sin θ · x + cos θ · y
//! φ₂ = cos θ · x + sin θ · y,      θ = ½ asin ρ
//! ```
//!
//! which keeps the mean and variance of the source law and gives the pair a
//! Pearson correlation of exactly `ρ`. Outputs are not wrapped back into
//! `[-π, π]`; they only ever enter through `cos`/`sin`.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law of the independent source phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PhaseDistribution {
    /// Uniform on `[-π, π]`.
    #[default]
    ContinuousUniform,
    /// `q` equiprobable levels `φ_k = (2k/(q-1) - 1)·π`, `k = 0..q`.
    DiscreteQ { q: u32 },
}

impl PhaseDistribution {
    pub fn discrete(q: u32) -> Result<Self> {
        let dist = PhaseDistribution::DiscreteQ { q };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PhaseDistribution::ContinuousUniform => Ok(()),
            PhaseDistribution::DiscreteQ { q } if q >= 2 => Ok(()),
            PhaseDistribution::DiscreteQ { q } => Err(Error::arg(format!(
                "discrete phase law needs q >= 2 states, got {q}"
            ))),
        }
    }

    /// Even `q` is legal but the level set then lacks `φ = 0`.
    pub fn warning(&self) -> Option<String> {
        match *self {
            PhaseDistribution::DiscreteQ { q } if q >= 2 && q % 2 == 0 => Some(format!(
                "q = {q} is even: the discrete levels do not include phase 0"
            )),
            _ => None,
        }
    }

    /// The `k`-th discrete level for a `q`-state law.
    pub fn level(k: u32, q: u32) -> f64 {
        (2.0 * k as f64 / (q - 1) as f64 - 1.0) * PI
    }

    /// All levels of a discrete law, `None` for the continuous one.
    pub fn levels(&self) -> Option<Vec<f64>> {
        match *self {
            PhaseDistribution::ContinuousUniform => None,
            PhaseDistribution::DiscreteQ { q } => Some((0..q).map(|k| Self::level(k, q)).collect()),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PhaseDistribution::ContinuousUniform => rng.random_range(-PI..=PI),
            PhaseDistribution::DiscreteQ { q } => Self::level(rng.random_range(0..q), q),
        }
    }
}

/// Target correlation together with its mixing coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpec {
    pub rho: f64,
    pub theta: f64,
    sin_theta: f64,
    cos_theta: f64,
}

impl CorrelationSpec {
    pub fn new(rho: f64) -> Result<Self> {
        let theta = mixing_angle(rho)?;
        // Half-angle forms from cos 2θ = √(1-ρ²) ≥ 0. They make sin θ and
        // cos θ bit-identical at |ρ| = 1, so ρ = 1 pairs come out equal.
        let cos_2theta = (1.0 - rho * rho).max(0.0).sqrt();
        let cos_theta = ((1.0 + cos_2theta) / 2.0).sqrt();
        let sin_theta = ((1.0 - cos_2theta) / 2.0).sqrt().copysign(rho);
        Ok(CorrelationSpec {
            rho,
            theta,
            sin_theta,
            cos_theta,
        })
    }

    pub fn sin_theta(&self) -> f64 {
        self.sin_theta
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    /// Mean of either correlated output for a source law with mean
    /// `source_mean`: `(sin θ + cos θ)·⟨φ⟩`, which is
    /// `[(1-√(1-ρ²))^½ + (1+√(1-ρ²))^½]/√2 · ⟨φ⟩`. Zero for both laws here.
    pub fn correlated_mean(&self, source_mean: f64) -> f64 {
        (self.sin_theta + self.cos_theta) * source_mean
    }
}

/// A realization of `N` phases in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    pub values: Vec<f64>,
    pub rho_used: f64,
    pub shuffled: bool,
}

impl PhaseVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl AsRef<[f64]> for PhaseVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// `θ = ½ asin ρ`.
pub fn mixing_angle(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(Error::Domain(format!("correlation must lie in [-1, 1], got {rho}")));
    }
    Ok(0.5 * rho.asin())
}

#[inline]
pub fn correlate_pair(phi_a: f64, phi_b: f64, spec: &CorrelationSpec) -> (f64, f64) {
    let (s, c) = (spec.sin_theta, spec.cos_theta);
    (s * phi_a + c * phi_b, c * phi_a + s * phi_b)
}

pub fn sample_iid<R: Rng + ?Sized>(
    dist: &PhaseDistribution,
    n: usize,
    rng: &mut R,
) -> Result<PhaseVector> {
    if n == 0 {
        return Err(Error::arg("need at least one phase"));
    }
    dist.validate()?;
    let values = (0..n).map(|_| dist.sample(rng)).collect();
    Ok(PhaseVector {
        values,
        rho_used: 0.0,
        shuffled: false,
    })
}

/// Draw `out.len()` source phases, mix consecutive pairs `(2m, 2m+1)` and
/// optionally shuffle, all from `rng`. This is the allocation-free path used
/// by the ensemble runner.
pub fn fill_correlated_phases<R: Rng + ?Sized>(
    dist: &PhaseDistribution,
    spec: &CorrelationSpec,
    shuffle: bool,
    rng: &mut R,
    out: &mut [f64],
) -> Result<()> {
    if out.is_empty() {
        return Err(Error::arg("need at least one phase"));
    }
    if spec.rho != 0.0 && !out.len().is_multiple_of(2) {
        return Err(Error::arg(format!(
            "correlated phases are generated in pairs; n = {} is odd",
            out.len()
        )));
    }
    for v in out.iter_mut() {
        *v = dist.sample(rng);
    }
    for pair in out.chunks_exact_mut(2) {
        let (p, q) = correlate_pair(pair[0], pair[1], spec);
        pair[0] = p;
        pair[1] = q;
    }
    if shuffle {
        out.shuffle(rng);
    }
    Ok(())
}

pub fn make_correlated_phases<R: Rng + ?Sized>(
    dist: &PhaseDistribution,
    rho: f64,
    n: usize,
    shuffle: bool,
    rng: &mut R,
) -> Result<PhaseVector> {
    dist.validate()?;
    let spec = CorrelationSpec::new(rho)?;
    let mut values = vec![0.0; n];
    fill_correlated_phases(dist, &spec, shuffle, rng, &mut values)?;
    Ok(PhaseVector {
        values,
        rho_used: rho,
        shuffled: shuffle,
    })
}

/// `(mean, variance)` of the source law.
pub fn theoretical_moments(dist: &PhaseDistribution) -> (f64, f64) {
    let base = PI * PI / 3.0;
    match *dist {
        PhaseDistribution::ContinuousUniform => (0.0, base),
        PhaseDistribution::DiscreteQ { q } => {
            let q = q as f64;
            (0.0, base * (q + 1.0) / (q - 1.0))
        }
    }
}

/// `(E[cos φ], E[sin φ])` under the source law.
pub fn fourier_coeffs(dist: &PhaseDistribution) -> (f64, f64) {
    match *dist {
        PhaseDistribution::ContinuousUniform => (0.0, 0.0),
        PhaseDistribution::DiscreteQ { q } => {
            // Levels are symmetric about 0, so the sine average vanishes.
            let a = (0..q).map(|k| PhaseDistribution::level(k, q).cos()).sum::<f64>() / q as f64;
            (a, 0.0)
        }
    }
}
