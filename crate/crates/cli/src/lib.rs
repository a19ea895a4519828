//! Library side of the `knightcount` binary: argument definitions, command
//! execution, run reports and the reference table.

pub mod args;
pub mod commands;
pub mod reference;
pub mod report;

use std::io;

use knightcount::{CheckpointError, Error};
use thiserror::Error;

pub use commands::{run, verification_failures};

/// A failed command, classified by exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Checkpoint(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Checkpoint(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl From<CheckpointError> for Failure {
    fn from(e: CheckpointError) -> Self {
        match e {
            CheckpointError::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Checkpoint(e.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Checkpoint(c) => c.into(),
            Error::Merge(_) => Failure::Checkpoint(e.to_string()),
            Error::Consistency(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
