use std::process::ExitCode;

use clap::Parser;
use roguewave_cli::{cmd_nbeta, cmd_sweep, cmd_validate, Cli, CliError, Command};

fn run(cli: Cli, invocation: &[String]) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => {
            let bundle = cmd_sweep(&args, invocation)?;
            println!("wrote {} files to {}", bundle.files.len(), bundle.dir.display());
        }
        Command::Nbeta(args) => {
            let bundle = cmd_nbeta(&args, invocation)?;
            println!("wrote {} files to {}", bundle.files.len(), bundle.dir.display());
        }
        Command::Validate => {
            let report = cmd_validate();
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Data(e.to_string()))?;
            println!("{text}");
            if !report.passed {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
                return Err(CliError::ValidationFailed(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let invocation: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli, &invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("roguewave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
