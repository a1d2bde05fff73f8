//! Verification suites and deterministic reports for the `instanton-core`
//! toolkit.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use report::{Check, Criterion, Report, SuiteRecord, Table};
pub use suites::{run_suite, run_suites};

/// Subcommand name to the suites it runs; `all` defers to the config.
pub fn suites_for(command: &str, cfg: &RunConfig) -> Option<Vec<&'static str>> {
    Some(match command {
        "verify-calabi" => vec!["calabi"],
        "verify-semiflat" => vec!["semiflat"],
        "verify-rotation" => vec!["rotation"],
        "slag-check" => vec!["slag"],
        "monodromy" => vec!["monodromy"],
        "lattice" => vec!["lattice"],
        "torelli" => vec!["torelli"],
        "all" => cfg.suites.enabled(),
        _ => return None,
    })
}

/// Validates the configuration, then runs the command's suites.
pub fn run(command: &str, cfg: &RunConfig) -> CliResult<Report> {
    cfg.validate()?;
    let names = suites_for(command, cfg).ok_or_else(|| CliError::Config(format!("unknown command {command:?}")))?;
    if names.is_empty() {
        return Err(CliError::Config("no suites enabled".into()));
    }
    Ok(Report::new(command, cfg, run_suites(&names, cfg)))
}
