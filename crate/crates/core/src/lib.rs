//! Counting and estimating knight's tours on rectangular boards.
//!
//! * [`board`]: geometry, square indexing and the knight-move graph.
//! * [`symmetry`]: board symmetries, tour orbits and canonical numberings.
//! * [`enumerate`]: exact backtracking counts split into resumable work units.
//! * [`checkpoint`]: the on-disk record of a partially completed run.
//! * [`estimate`]: degree-biased importance sampling with confidence intervals.
//! * [`decimal`]: serde adapters writing big integers as decimal strings.
//!
//! Work is spread over a rayon pool when the `parallel` feature (on by
//! default) is enabled, and runs sequentially otherwise; results are
//! identical either way.

pub mod board;
pub mod checkpoint;
pub mod decimal;
pub mod enumerate;
mod error;
pub mod estimate;
pub mod parallel;
pub mod symmetry;

pub use board::{
    build_adjacency, knight_moves_from, AdjacencyTable, BoardSpec, OccupancyMask, Square,
};
pub use checkpoint::{Checkpoint, CheckpointError};
pub use enumerate::{
    count_closed_diagrams, count_geometric_classes, count_open_diagrams, count_open_numberings,
    count_tours, count_unit, merge_results, split_work, Pruning, SearchMode, SearchOptions,
    TourCounts, UnitResult, WorkUnit,
};
pub use error::{Error, Result};
pub use estimate::{EstimateReport, SamplePolicy, Target};
pub use parallel::Executor;
pub use symmetry::{OpenCounts, Tour, Transform, TransformGroup, TransformKind};
