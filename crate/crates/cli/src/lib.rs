//! Job-file front end for the `hermitian-perturb` algorithms.
//!
//! A job names a command from the registry in [`commands`] and carries its
//! parameters. [`run_job`] dispatches it and returns a [`Document`] together
//! with the process exit code.

pub mod commands;
pub mod job;
pub mod output;

use std::path::PathBuf;

use serde::Serialize;

pub use commands::{Command, Outcome};
pub use job::JobSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] hermitian_perturb::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
/// Results are present but a consistency stop (or a failed verification
/// trial) happened before the horizon.
pub const EXIT_STOPPED: i32 = 2;

/// Settings that come from the command line rather than the job file.
#[derive(Debug, Clone, Default)]
pub struct Context {
    /// Side files are written here; none are written without it.
    pub out_dir: Option<PathBuf>,
}

/// The output of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub command: String,
    pub input: JobSpec,
    pub exit_code: i32,
    pub stop_index: Option<usize>,
    pub stopped_early: bool,
    /// Largest consistency residual reported by the run.
    pub residual: f64,
    pub csv_files: Vec<String>,
    pub result: serde_json::Value,
    #[serde(skip)]
    pub table: String,
}

impl Document {
    pub fn to_json(&self) -> String {
        output::to_json(self)
    }
}

pub fn run_job(spec: &JobSpec, ctx: &Context) -> Result<Document, CliError> {
    spec.validate()?;
    let cmd = commands::find(&spec.command).expect("validated command");
    let out = cmd.run(spec)?;
    let mut csv_files = Vec::new();
    if let Some(dir) = &ctx.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        for (name, body) in &out.side_files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            csv_files.push(path.display().to_string());
        }
    }
    let exit_code = if out.stopped_early || out.failures > 0 { EXIT_STOPPED } else { EXIT_OK };
    Ok(Document {
        command: spec.command.clone(),
        input: spec.clone(),
        exit_code,
        stop_index: out.stop_index,
        stopped_early: out.stopped_early,
        residual: out.residual,
        csv_files,
        result: out.result,
        table: out.table,
    })
}
