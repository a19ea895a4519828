//! The JSON document every command prints.
//!
//! Everything outside `runtime` is a pure function of the command line, so
//! two runs that differ only in job count or speed produce reports whose
//! [`RunReport::without_runtime`] forms are byte-identical.

use knightcount::{BoardSpec, EstimateReport, TourCounts};
use serde::{Deserialize, Serialize};

use crate::reference::Quantity;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub command: String,
    pub board: Option<BoardSpec>,
    /// The effective settings of the command, after defaults.
    pub options: serde_json::Value,
    pub results: Option<Results>,
    pub work: Work,
    pub generator: Option<String>,
    pub runtime: Option<Runtime>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Results {
    Counts(TourCounts),
    Estimate(EstimateReport),
    Verify(Vec<Check>),
    Split { unit_count: u64, checkpoint: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Work {
    /// Search nodes, as a decimal string.
    pub nodes_expanded: Option<String>,
    pub samples: Option<u64>,
    pub units_total: Option<u64>,
    pub units_completed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub jobs: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Match,
    Mismatch,
    ReferenceOnly,
    InsideInterval,
    OutsideInterval,
}

impl CheckStatus {
    pub fn is_failure(self) -> bool {
        matches!(self, CheckStatus::Mismatch | CheckStatus::OutsideInterval)
    }
}

/// One reference entry and what this run made of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub board: BoardSpec,
    pub quantity: Quantity,
    pub expected: String,
    /// Exact count, or `low..high` for an interval check.
    pub computed: Option<String>,
    pub status: CheckStatus,
}

impl RunReport {
    pub fn new(command: &str, board: Option<BoardSpec>, options: serde_json::Value) -> Self {
        RunReport {
            format_version: REPORT_VERSION,
            command: command.into(),
            board,
            options,
            results: None,
            work: Work::default(),
            generator: None,
            runtime: None,
        }
    }

    pub fn without_runtime(&self) -> RunReport {
        RunReport {
            runtime: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }
}
