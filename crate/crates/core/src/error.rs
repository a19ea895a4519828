use thiserror::Error;

use crate::checkpoint::CheckpointError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid board {rows}x{cols}: both dimensions must be at least 1")]
    InvalidBoard { rows: usize, cols: usize },
    #[error("unsupported board size: {squares} squares (at most {max} supported)")]
    UnsupportedSize { squares: usize, max: usize },
    #[error("board {rows}x{cols} is degenerate: counting needs at least two squares")]
    DegenerateBoard { rows: usize, cols: usize },
    #[error("square index {index} out of range for a board of {squares} squares")]
    InvalidSquare { index: usize, squares: usize },
    #[error("transform {kind} is not a symmetry of a {rows}x{cols} board")]
    InvalidTransform {
        kind: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("invalid tour: {0}")]
    InvalidTour(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error(
        "a {squares}-square board is too large for a direct count (limit {limit}); \
         split it into work units and run them through a checkpoint"
    )]
    NeedsPartitioning { squares: usize, limit: usize },
    #[error(
        "split depth {depth} invalid for a board of {squares} squares (need 1 <= depth < squares)"
    )]
    InvalidDepth { depth: usize, squares: usize },
    #[error("cannot merge unit results: {0}")]
    Merge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
