use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use roguewave_core::{ExperimentConfig, HistogramSpec, PhaseDistribution};

use crate::error::{CliError, Result};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "ROGUEWAVE_OUT";
const DEFAULT_OUT: &str = "roguewave-out";

#[derive(Debug, Parser)]
#[command(name = "roguewave", version, about = "Rogue-wave statistics of correlated random phasor sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a ρ sweep and write PDFs, ⟨I⟩(β) curves and the η table.
    Sweep(RunArgs),
    /// Repeat the sweep for several β partitions and overlay the PDFs.
    Nbeta(NbetaArgs),
    /// Run the analytic self-checks and print a JSON report.
    Validate,
}

#[derive(Debug, Args, Clone, Default)]
pub struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Correlation value to sweep (repeatable).
    #[arg(long = "rho", value_name = "RHO")]
    pub rho: Vec<f64>,

    /// Discrete phase law with Q equiprobable states.
    #[arg(long, value_name = "Q", conflicts_with = "continuous")]
    pub q: Option<u32>,

    /// Continuous uniform phases on [-π, π].
    #[arg(long)]
    pub continuous: bool,

    #[arg(long)]
    pub n_waves: Option<usize>,

    #[arg(long)]
    pub n_runs: Option<usize>,

    #[arg(long)]
    pub n_beta: Option<usize>,

    /// Shuffle each pair-generated phase vector (default).
    #[arg(long, overrides_with = "no_shuffle")]
    pub shuffle: bool,

    #[arg(long, overrides_with = "shuffle")]
    pub no_shuffle: bool,

    #[arg(long)]
    pub e0: Option<f64>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory (default: $ROGUEWAVE_OUT or ./roguewave-out).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Histogram bins on the normalized axis as WIDTH:MAX.
    #[arg(long, value_name = "WIDTH:MAX")]
    pub bins: Option<String>,

    /// Worker threads for the ensemble kernels.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct NbetaArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// β partition sizes to compare.
    #[arg(long, value_delimiter = ',', default_value = "100,200,300,400")]
    pub n_beta_list: Vec<usize>,
}

impl RunArgs {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
        })
    }
}

pub fn load_config_file(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
}

/// Defaults, then the config file, then flags; the result is validated.
pub fn parse_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config_file(path)?,
        None => ExperimentConfig::default(),
    };
    if !args.rho.is_empty() {
        cfg.rho_list = args.rho.clone();
    }
    if let Some(q) = args.q {
        cfg.dist = PhaseDistribution::DiscreteQ { q };
    }
    if args.continuous {
        cfg.dist = PhaseDistribution::ContinuousUniform;
    }
    if let Some(n) = args.n_waves {
        cfg.n_waves = n;
    }
    if let Some(n) = args.n_runs {
        cfg.n_runs = n;
    }
    if let Some(n) = args.n_beta {
        cfg.n_beta = n;
    }
    if args.shuffle {
        cfg.shuffle = true;
    }
    if args.no_shuffle {
        cfg.shuffle = false;
    }
    if let Some(e0) = args.e0 {
        cfg.e0 = e0;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(bins) = &args.bins {
        cfg.histogram = bins
            .parse::<HistogramSpec>()
            .map_err(|e| CliError::Usage(format!("--bins: {e}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}
