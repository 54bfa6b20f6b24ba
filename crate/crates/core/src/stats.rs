//! Ensemble reductions: mergeable moments, fixed-edge histograms on the
//! normalized intensity axis, correlation coefficients, KS distances and
//! the rogue-wave level `η = (I_max - Ī)/σ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Welford accumulator with min/max. Mergeable with [`merge_moments`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningMoments {
    pub count: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
    pub max: f64,
    pub min: f64,
}

impl Default for RunningMoments {
    fn default() -> Self {
        RunningMoments {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
        }
    }
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(xs: &[f64]) -> Result<Self> {
        let mut m = Self::new();
        for &x in xs {
            m.push(x)?;
        }
        Ok(m)
    }

    #[inline]
    pub fn push(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.max = self.max.max(x);
        self.min = self.min.min(x);
        Ok(())
    }

    pub fn merge(&self, other: &RunningMoments) -> RunningMoments {
        merge_moments(self, other)
    }

    /// Sample variance (divisor `count - 1`); `None` below two samples.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.m2 / (self.count - 1) as f64).max(0.0))
    }

    pub fn std_dev(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }

    pub fn std_error(&self) -> Option<f64> {
        self.std_dev().map(|s| s / (self.count as f64).sqrt())
    }
}

pub fn update_moments(mut state: RunningMoments, x: f64) -> Result<RunningMoments> {
    state.push(x)?;
    Ok(state)
}

/// Moments of the concatenated sample (Chan et al. pairwise update).
pub fn merge_moments(a: &RunningMoments, b: &RunningMoments) -> RunningMoments {
    if b.count == 0 {
        return *a;
    }
    if a.count == 0 {
        return *b;
    }
    let (na, nb) = (a.count as f64, b.count as f64);
    let n = na + nb;
    let delta = b.mean - a.mean;
    RunningMoments {
        count: a.count + b.count,
        mean: a.mean + delta * (nb / n),
        m2: a.m2 + b.m2 + delta * delta * (na * nb / n),
        max: a.max.max(b.max),
        min: a.min.min(b.min),
    }
}

/// Fixed-width bins on `[0, max)` of the normalized axis `u = I/⟨I⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub width: f64,
    pub max: f64,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec {
            width: 0.25,
            max: 64.0,
        }
    }
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite() && self.max.is_finite()) {
            return Err(Error::arg(format!("bad bin width {}", self.width)));
        }
        if self.max < self.width {
            return Err(Error::arg(format!(
                "histogram range {} shorter than one bin of width {}",
                self.max, self.width
            )));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        (self.max / self.width).round() as usize
    }
}

impl std::str::FromStr for HistogramSpec {
    type Err = Error;

    /// `WIDTH:MAX`, e.g. `0.25:64`.
    fn from_str(s: &str) -> Result<Self> {
        let (w, m) = s
            .split_once(':')
            .ok_or_else(|| Error::arg(format!("bin spec '{s}' is not WIDTH:MAX")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::arg(format!("bin spec '{s}': '{t}' is not a number")))
        };
        let spec = HistogramSpec {
            width: parse(w)?,
            max: parse(m)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub underflow: u64,
    pub overflow: u64,
    width: f64,
}

impl Histogram {
    pub fn new(spec: &HistogramSpec) -> Result<Self> {
        spec.validate()?;
        let bins = spec.n_bins();
        Ok(Histogram {
            edges: (0..=bins).map(|i| i as f64 * spec.width).collect(),
            counts: vec![0; bins],
            total: 0,
            underflow: 0,
            overflow: 0,
            width: spec.width,
        })
    }

    pub fn bin_width(&self) -> f64 {
        self.width
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().expect("at least one bin")
    }

    #[inline]
    pub fn add(&mut self, u: f64) {
        self.total += 1;
        if u < 0.0 {
            self.underflow += 1;
        } else if u >= self.upper() {
            self.overflow += 1;
        } else {
            let k = ((u / self.width) as usize).min(self.counts.len() - 1);
            self.counts[k] += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::arg("cannot merge histograms with different edges"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        Ok(())
    }

    /// `counts / (total · width)`; all zeros for an empty histogram.
    pub fn density(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let norm = self.total as f64 * self.width;
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// Fraction of samples with `u ≥ edges[k]` (overflow included).
    pub fn survival_at_edge(&self, k: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let above: u64 = self.counts[k.min(self.counts.len())..].iter().sum::<u64>() + self.overflow;
        above as f64 / self.total as f64
    }

    /// Empirical CDF at every edge, `P(u < edges[k])`.
    pub fn cdf_at_edges(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        let mut acc = self.underflow;
        let mut out = Vec::with_capacity(self.edges.len());
        out.push(acc as f64 / t);
        for &c in &self.counts {
            acc += c;
            out.push(acc as f64 / t);
        }
        out
    }
}

/// Histogram of `samples / normalization`.
pub fn build_histogram<I>(samples: I, normalization: f64, spec: &HistogramSpec) -> Result<Histogram>
where
    I: IntoIterator<Item = f64>,
{
    if !(normalization > 0.0 && normalization.is_finite()) {
        return Err(Error::arg(format!(
            "normalization must be positive, got {normalization}"
        )));
    }
    let mut h = Histogram::new(spec)?;
    for x in samples {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        h.add(x / normalization);
    }
    Ok(h)
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::arg(format!("length mismatch {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Degenerate("pearson needs at least two pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::Degenerate("zero variance in pearson input".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties get their average rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::arg(format!("length mismatch {} vs {}", x.len(), y.len())));
    }
    pearson(&ranks(x), &ranks(y))
}

/// Fraction of samples strictly above `u`.
pub fn empirical_survival(samples: &[f64], u: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|&&x| x > u).count() as f64 / samples.len() as f64
}

/// One-sample Kolmogorov–Smirnov distance `sup |F_n - F|`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Degenerate("empty sample".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Largest gap between two empirical CDFs sampled at shared bin edges.
pub fn ks_histograms(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.edges != b.edges {
        return Err(Error::arg("histograms have different edges"));
    }
    Ok(a.cdf_at_edges()
        .iter()
        .zip(b.cdf_at_edges())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Rogue-wave level of one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RogueMetrics {
    pub rho: f64,
    /// `(I_max - Ī)/σ` with the ensemble's own `σ`.
    pub eta: f64,
    /// Same numerator over the uncorrelated (`ρ = 0`) ensemble's `σ`.
    pub eta_base: Option<f64>,
    pub i_max: f64,
    pub mean: f64,
    pub sigma: f64,
}

pub fn rogue_level(
    rho: f64,
    moments: &RunningMoments,
    baseline_sigma: Option<f64>,
) -> Result<RogueMetrics> {
    let sigma = moments
        .std_dev()
        .ok_or_else(|| Error::Degenerate("rogue level needs at least two samples".into()))?;
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::Degenerate("zero spread in intensity ensemble".into()));
    }
    let excess = moments.max - moments.mean;
    let eta_base = match baseline_sigma {
        Some(s) if s > 0.0 && s.is_finite() => Some(excess / s),
        Some(s) => return Err(Error::Degenerate(format!("baseline sigma {s} is not positive"))),
        None => None,
    };
    Ok(RogueMetrics {
        rho,
        eta: excess / sigma,
        eta_base,
        i_max: moments.max,
        mean: moments.mean,
        sigma,
    })
}
