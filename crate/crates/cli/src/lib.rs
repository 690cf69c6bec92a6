//! Library behind the `perron` binary: configuration, experiment dispatch,
//! reports and artifact writing. Every run is a pure function of its
//! resolved [`RunConfig`]; the worker count only changes wall-clock time.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;
use std::time::Instant;

use thiserror::Error;

pub use config::{CommandId, GeneratorConfig, Outputs, RunConfig};
pub use experiments::{Artifacts, Outcome};
pub use report::{CheckRow, Report, Timing};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// 2 for invalid input, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

/// Result of [`run`]: the report plus what the command rendered.
#[derive(Debug)]
pub struct Run {
    pub report: Report,
    pub headline: Vec<String>,
    pub artifacts: Artifacts,
}

/// Resolves `config`, runs it on a pool of `workers` threads (all cores
/// when `None`) and assembles the report.
pub fn run(config: RunConfig, workers: Option<usize>) -> Result<Run, CliError> {
    let config = config.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let threads = pool.current_num_threads();
    let start = Instant::now();
    let outcome = pool.install(|| experiments::execute(&config))?;
    let timing = Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3, workers: threads };
    let report = Report::new(config, outcome.checks, outcome.data, timing);
    Ok(Run { report, headline: outcome.headline, artifacts: outcome.artifacts })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes every artifact that has a configured path.
pub fn write_outputs(run: &Run) -> Result<(), CliError> {
    let Some(out) = &run.report.config.outputs else {
        return Ok(());
    };
    if let Some(p) = &out.report {
        write(p, run.report.to_json().as_bytes())?;
    }
    if let Some(p) = &out.csv {
        write(p, run.report.checks_csv().as_bytes())?;
    }
    let a = &run.artifacts;
    for (path, body) in [
        (&out.sample, a.sample_csv.as_ref().map(|s| s.as_bytes())),
        (&out.svg, a.svg.as_ref().map(|s| s.as_bytes())),
        (&out.pgm, a.pgm.as_deref()),
    ] {
        if let Some(p) = path {
            let body = body.ok_or_else(|| {
                CliError::Config(format!("this command produces no artifact for {}", p.display()))
            })?;
            write(p, body)?;
        }
    }
    Ok(())
}
