//! `hvkg` command-line front end.

mod commands;
mod config;

pub use commands::{answer_all, answer_question, load_inputs, run, AnswerRecord, Loaded, EXPERIMENTS};
pub use config::{Cli, Command, FileConfig, HdcFlags, Inputs, LlmFlags, LlmSource, RetrievalFlags, ValidateFlags};

use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Transport(String),
    #[error("{} threshold(s) failed:\n{}", .0.len(), .0.join("\n"))]
    Threshold(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Threshold(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Transport(_) => 3,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn invalid(e: impl std::fmt::Display) -> CliError {
        CliError::Validation(e.to_string())
    }
}
