//! Command-line frontend: config parsing, sweep/nbeta/validate commands and
//! the CSV/JSON output bundle.

pub mod args;
pub mod bundle;
pub mod error;
pub mod validate;

use roguewave_core::{nbeta_study, run_sweep_with, ExperimentConfig, SweepOptions};

pub use args::{parse_config, Cli, Command, NbetaArgs, RunArgs};
pub use bundle::{write_nbeta_bundle, write_sweep_bundle, OutputBundle};
pub use error::{CliError, Result};
pub use validate::{run_checks, ValidationReport};

fn options(args: &RunArgs) -> SweepOptions {
    SweepOptions {
        keep_samples: false,
        workers: args.threads,
    }
}

fn warn(cfg: &ExperimentConfig) {
    for w in cfg.validate().unwrap_or_default() {
        eprintln!("warning: {w}");
    }
}

pub fn cmd_sweep(args: &RunArgs, invocation: &[String]) -> Result<OutputBundle> {
    let cfg = parse_config(args)?;
    warn(&cfg);
    let result = run_sweep_with(&cfg, &options(args))?;
    write_sweep_bundle(&args.out_dir(), &result, invocation)
}

pub fn cmd_nbeta(args: &NbetaArgs, invocation: &[String]) -> Result<OutputBundle> {
    let cfg = parse_config(&args.run)?;
    warn(&cfg);
    let results = nbeta_study(&cfg, &args.n_beta_list, &options(&args.run))?;
    write_nbeta_bundle(&args.run.out_dir(), &results, invocation)
}

/// Runs every self-check; the caller decides how to report failures.
pub fn cmd_validate() -> ValidationReport {
    run_checks()
}
