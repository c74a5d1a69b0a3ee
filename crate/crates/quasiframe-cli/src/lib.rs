//! Command-line front end for the quasiframe library: seeded,
//! reproducible experiments with CSV or JSON tables.
//!
//! Every experiment is a thin composition of library operations. The
//! data payload (stdout or `--out` file) is byte-identical across reruns
//! of the same configuration; timing goes to stderr. Errors are JSON
//! records on stderr with exit code 1 for usage or I/O problems and 2
//! for invariant violations.

pub mod config;
pub mod experiments;
pub mod output;

use std::io::Write;
use std::time::Instant;

use clap::Parser;

use config::{Config, Opts};

/// Failures surfaced to the user as structured records on stderr.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or input values. Exit code 1.
    Usage(String),
    /// Filesystem failure. Exit code 1.
    Io(String),
    /// A library invariant or tolerance was violated. Exit code 2.
    Invariant(String),
}

impl CliError {
    /// Stable error category for machine consumption.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Invariant(_) => "invariant",
        }
    }

    /// Human-readable detail.
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Invariant(m) => m,
        }
    }

    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }

    /// The machine-readable record written to stderr.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.message(),
        })
        .to_string()
    }
}

impl From<quasiframe::Error> for CliError {
    fn from(e: quasiframe::Error) -> CliError {
        use quasiframe::Error as E;
        let message = e.to_string();
        match e {
            E::NonPhysicalState { .. }
            | E::NonUnitDirection { .. }
            | E::ZeroVector
            | E::NotNormalized { .. }
            | E::BitCountOutOfRange { .. }
            | E::InvalidMixture { .. }
            | E::InvalidScale { .. }
            | E::IndexOutOfRange { .. } => CliError::Usage(message),
            _ => CliError::Invariant(message),
        }
    }
}

/// Parse arguments (binary name excluded), run the experiment, write the
/// payload. Returns the process exit code.
pub fn run_from_args<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    match run(args) {
        Ok(()) => 0,
        Err(error) => {
            eprintln!("{}", error.record());
            error.exit_code()
        }
    }
}

fn run<I>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = String>,
{
    let opts = match Opts::try_parse_from(args) {
        Ok(opts) => opts,
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let config = Config::resolve(opts)?;

    let started = Instant::now();
    let table = experiments::dispatch(&config)?;
    let payload = table.render(config.format);
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    match &config.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    // Timing goes to stderr so the data payload stays byte-identical
    // across reruns of the same configuration.
    eprintln!(
        "{} finished in {elapsed_ms:.3} ms (seed {})",
        config.experiment.name(),
        config.seed
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let usage: CliError = quasiframe::Error::NonPhysicalState { norm: 2.0 }.into();
        assert_eq!(usage.exit_code(), 1);
        assert_eq!(usage.kind(), "usage");
        let invariant: CliError = quasiframe::Error::NegativeEntries {
            min_entry: -0.5,
            context: "probe".to_string(),
        }
        .into();
        assert_eq!(invariant.exit_code(), 2);
        assert_eq!(invariant.kind(), "invariant");
        let record: serde_json::Value = serde_json::from_str(&invariant.record()).unwrap();
        assert_eq!(record["error"], "invariant");
        assert!(record["message"].as_str().unwrap().contains("probe"));
    }

    #[test]
    fn run_reports_missing_inputs_as_usage() {
        let code = run_from_args(["measure".to_string()]);
        assert_eq!(code, 1);
    }
}
