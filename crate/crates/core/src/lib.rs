//! Monte Carlo simulation of the far-field intensity produced by `N`
//! superposed waves whose random phases are pairwise correlated.
//!
//! The crate is split along the pipeline:
//!
//! * [`phases`] draws i.i.d. phases (continuous uniform on `[-π, π]` or the
//!   `Q`-state discrete family) and mixes them into `ρ`-correlated pairs.
//! * [`field`] evaluates the phasor sum `A_β Σ_j exp(i(βj + φ_j))`, its
//!   intensity, and the closed-form mean intensity for independent phases.
//! * [`stats`] holds mergeable moments, histograms, Pearson/Spearman and
//!   KS helpers, and the rogue-wave level `η`.
//! * [`experiment`] runs seeded ensembles over a `β` grid and reduces them.

pub mod error;
pub mod experiment;
pub mod field;
pub mod phases;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use experiment::{
    beta_grid, nbeta_study, run_realization, run_sweep, run_sweep_with, BetaGrid,
    ExperimentConfig, RhoResult, SweepOptions, SweepResult,
};
pub use field::{
    envelope, expected_intensity, field_intensity, intensity_expanded, FieldParams, FieldSample,
    GridEvaluator,
};
pub use phases::{
    correlate_pair, fourier_coeffs, make_correlated_phases, mixing_angle, sample_iid,
    theoretical_moments, CorrelationSpec, PhaseDistribution, PhaseVector,
};
pub use stats::{
    build_histogram, merge_moments, pearson, rogue_level, update_moments, Histogram,
    HistogramSpec, RogueMetrics, RunningMoments,
};

/// Crate version recorded in sweep provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
