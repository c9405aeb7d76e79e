//! Batch front end: reads a [`RunConfig`], runs one command and writes its
//! artifacts together with `summary.json` into the output directory.

mod commands;
pub mod config;
pub mod plot;
pub mod summary;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{Command, RunConfig};
pub use plot::{emit_plot_data, PlotData};
pub use summary::{Check, CheckStatus, RunStatus, Summary, SCHEMA_VERSION};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("nothing to write for {0}")]
    EmptyResult(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn compute(e: impl std::fmt::Display) -> Self {
        Self::Compute(e.to_string())
    }
}

/// An output file, relative to the output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub summary: Summary,
    pub output_dir: PathBuf,
    /// Everything written, summary included.
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code()
    }
}

/// Runs the configured command. All files are written at the end by this
/// function alone. The summary is written even when the run itself fails;
/// only a failure to write it is returned as an error.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let hash = config.hash();
    let command = config.run.command.map(Command::name).unwrap_or("none");
    let result = config
        .validate()
        .and_then(|_| config.command())
        .and_then(|cmd| commands::execute(cmd, config, &hash));
    let (summary, artifacts) = match result {
        Ok((checks, artifacts)) => (Summary::from_checks(command, &hash, checks), artifacts),
        Err(e) => (Summary::from_error(command, &hash, e.to_string()), Vec::new()),
    };
    let dir = config.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut files = Vec::new();
    for a in artifacts.iter().chain(std::iter::once(&Artifact {
        name: SUMMARY_FILE.into(),
        contents: summary.to_json(),
    })) {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.contents).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
    }
    Ok(RunOutcome {
        summary,
        output_dir: dir,
        files,
    })
}
