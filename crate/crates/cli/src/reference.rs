//! Known counts that `verify` checks against.
//!
//! Published 8x8 values are compiled in. Small-board values live in
//! `data/reference.json`, which the test suite regenerates from the
//! brute-force oracle and refuses to let drift.

use std::collections::BTreeSet;
use std::fmt;

use knightcount::BoardSpec;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub const TABLE_VERSION: u32 = 1;

/// Small-board entries shipped with the binary.
pub const GENERATED: &str = include_str!("../data/reference.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantity {
    /// Directed open numberings.
    N,
    /// Open tour diagrams.
    T,
    /// Geometrically distinct open tours.
    G,
    /// Open diagrams fixed by a non-identity symmetry.
    S,
    /// Closed tour diagrams.
    D,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub board: BoardSpec,
    pub quantity: Quantity,
    #[serde(with = "knightcount::decimal")]
    pub value: BigUint,
    pub note: String,
    /// Whether `verify --level quick` recomputes this entry exactly.
    pub desk_runnable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub format_version: u32,
    pub entries: Vec<Entry>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("reference table does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("reference table version {0} is not supported (expected {TABLE_VERSION})")]
    Version(u32),
    #[error("reference table lists {board} {quantity} twice")]
    Duplicate {
        board: BoardSpec,
        quantity: Quantity,
    },
}

fn published(rows: usize, cols: usize, quantity: Quantity, value: &str) -> Entry {
    Entry {
        board: BoardSpec::new(rows, cols).expect("valid board"),
        quantity,
        value: value.parse().expect("decimal literal"),
        note: "published 8x8 count; beyond desk-scale enumeration".into(),
        desk_runnable: false,
    }
}

/// Published counts for the standard board.
pub fn published_entries() -> Vec<Entry> {
    vec![
        published(8, 8, Quantity::D, "13267364410532"),
        published(8, 8, Quantity::T, "9795914085489952"),
        published(8, 8, Quantity::G, "1224489260686244"),
        published(8, 8, Quantity::N, "19591828170979904"),
    ]
}

impl ReferenceTable {
    pub fn new(entries: Vec<Entry>) -> Result<Self, TableError> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert((e.board, e.quantity)) {
                return Err(TableError::Duplicate {
                    board: e.board,
                    quantity: e.quantity,
                });
            }
        }
        Ok(ReferenceTable {
            format_version: TABLE_VERSION,
            entries,
        })
    }

    /// Parses a table document without adding published entries.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let table: ReferenceTable = serde_json::from_str(text)?;
        if table.format_version != TABLE_VERSION {
            return Err(TableError::Version(table.format_version));
        }
        ReferenceTable::new(table.entries)
    }

    /// Published entries followed by the entries of `generated`.
    pub fn with_published(generated: &str) -> Result<Self, TableError> {
        let mut entries = published_entries();
        entries.extend(ReferenceTable::parse(generated)?.entries);
        ReferenceTable::new(entries)
    }

    /// The table compiled into the binary.
    pub fn builtin() -> Self {
        ReferenceTable::with_published(GENERATED).expect("shipped reference table is valid")
    }

    pub fn get(&self, board: BoardSpec, quantity: Quantity) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|e| e.board == board && e.quantity == quantity)
    }

    /// Boards in first-appearance order.
    pub fn boards(&self) -> Vec<BoardSpec> {
        let mut out: Vec<BoardSpec> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.board) {
                out.push(e.board);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }
}
