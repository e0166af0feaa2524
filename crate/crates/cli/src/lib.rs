//! Command-line runner for the fermistab sweeps.
//!
//! `fermistab run <experiment>` resolves a [`RunConfig`] from an optional
//! TOML file and flag overrides, runs the experiment on a dedicated thread
//! pool, and writes `<experiment>.csv` and `<experiment>.summary.json` into
//! the output directory.

pub mod config;
pub mod output;
pub mod runs;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{ConfigError, Experiment, Panel, RunConfig};
pub use output::{Status, Summary};

/// Exit code for an invalid configuration.
pub const EXIT_CONFIG: i32 = 1;

#[derive(Debug)]
pub enum Failure {
    /// Nothing was run.
    Config(String),
    /// Writing artifacts failed.
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => Status::NumericalFailure.exit_code(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Io(m) => write!(f, "could not write results: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

/// Numerical failures outrank failed assertions.
fn status_of(outcome: &runs::Outcome) -> Status {
    if !outcome.failures.is_empty() {
        Status::NumericalFailure
    } else if outcome.assertions.iter().any(|a| !a.passed) {
        Status::AssertionFailure
    } else {
        Status::Ok
    }
}

/// Runs a resolved configuration and writes its artifacts. Numerical and
/// assertion failures are reported through [`Summary::status`]; the files
/// are written either way.
pub fn execute(experiment: Experiment, cfg: RunConfig) -> Result<Summary, Failure> {
    let start = Instant::now();
    let threads = cfg.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    log::info!(
        "running {experiment} on {} threads",
        pool.current_num_threads()
    );
    let outcome = match pool.install(|| runs::run(experiment, &cfg)) {
        Ok(o) => o,
        Err(runs::RunError::Config(m)) => return Err(Failure::Config(m)),
        Err(runs::RunError::Numerical(m)) => {
            let mut o = runs::Outcome::default();
            o.failures.push(fermistab::experiments::RecordFailure {
                key: experiment.to_string(),
                message: m,
            });
            o
        }
    };
    let dir = cfg
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUTPUT_DIR));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let csv_path = output::csv_path(&dir, experiment.name());
    outcome
        .table
        .write(&csv_path)
        .map_err(|e| Failure::Io(format!("{}: {e}", csv_path.display())))?;
    let status = status_of(&outcome);
    let summary = Summary {
        schema_version: output::SCHEMA_VERSION,
        experiment: experiment.to_string(),
        status,
        config: cfg,
        records_file: csv_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        record_count: outcome.record_count,
        fits: outcome.fits,
        results: outcome.results,
        assertions: outcome.assertions,
        failures: outcome.failures,
        notes: outcome.notes,
        timings: output::Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            phases: outcome.phases,
        },
    };
    let summary_path = output::summary_path(&dir, experiment.name());
    output::write_summary(&summary_path, &summary)
        .map_err(|e| Failure::Io(format!("{}: {e}", summary_path.display())))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fermistab::experiments::RecordFailure;
    use output::Assertion;

    #[test]
    fn numerical_failures_outrank_assertions() {
        let mut o = runs::Outcome::default();
        assert_eq!(status_of(&o), Status::Ok);
        o.assertions.push(Assertion::new("a", false, ""));
        assert_eq!(status_of(&o).exit_code(), 2);
        o.failures.push(RecordFailure {
            key: "k".into(),
            message: "m".into(),
        });
        assert_eq!(status_of(&o).exit_code(), 3);
    }
}
