//! Command-line front end for `hslab-core`: configuration, the commands,
//! JSON and CSV output, parallel drivers and the acceptance checks.
//!
//! Output is deterministic: parallel jobs are merged in job order and no
//! timings or host details are written to the report.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod jobs;
pub mod report;

use std::io::Write;

pub use config::{Command, Format, MinimizeKind, RunConfig};
pub use error::{AppError, AppResult};
pub use report::{Provenance, Record, Report, Table};

/// Execute the command and build its report.
pub fn build_report(config: &RunConfig) -> AppResult<Report> {
    let pool = jobs::pool(jobs::thread_cap()?)?;
    let results = pool.install(|| commands::execute(config))?;
    Ok(Report::new(config, results))
}

fn emit(config: &RunConfig, report: &Report) -> AppResult<()> {
    let text = format::render(report, config.format)?;
    match &config.out_path {
        Some(path) => std::fs::write(path, text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe downstream (`| head`) is not a failure
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    Ok(())
}

/// Run and write the report. Exit code 0 if every check passed, 1 on a
/// failed check or a numerical failure, 2 on invalid configuration.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = build_report(config).and_then(|report| {
        emit(config, &report)?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            for r in report.results.iter().filter(|r| r.failed()) {
                eprintln!("failed: {} {}", r.name, r.note.as_deref().unwrap_or(""));
            }
            i32::from(!report.passed)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
