//! Resumable run state.
//!
//! A checkpoint file is a stream of newline-terminated records. Each record
//! line is followed by an integrity line `~ <record length> <checksum>`,
//! where the checksum is the first 8 bytes of the SHA-256 of the record line
//! (newline included) in lowercase hex. The first record is the header:
//!
//! ```text
//! H {"magic":"knightcount-checkpoint","format_version":1,"rows":5,...}
//! ~ 231 5c0e4be2a1f3d990
//! U {"unit_id":0,"numberings":"304",...}
//! ~ 170 0b9d6a1c44e7f2a3
//! ```
//!
//! Every later record is one completed [`UnitResult`], appended as soon as
//! the unit finishes. Counts are decimal strings. Pending units are the ids
//! in `0..unit_count` with no record.

use std::fs::{File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::board::BoardSpec;
use crate::enumerate::{
    merge_results, split_work, Enumerator, SearchOptions, TourCounts, UnitResult,
};
use crate::error::Result;
use crate::parallel::Executor;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "knightcount-checkpoint";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u32 },
    #[error("checkpoint truncated: incomplete record at byte offset {offset}")]
    Truncated { offset: u64 },
    #[error("corrupt checkpoint record at byte offset {offset}: {reason}")]
    Corrupt { offset: u64, reason: String },
    #[error("checkpoint is for a {found} board, not {expected}")]
    BoardMismatch {
        expected: BoardSpec,
        found: BoardSpec,
    },
    #[error("checkpoint was written with different search options: {0}")]
    ConfigMismatch(String),
    #[error("checkpoint {} already exists", .0.display())]
    AlreadyExists(PathBuf),
    #[error("checkpoint I/O: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    magic: String,
    format_version: u32,
    rows: usize,
    cols: usize,
    depth: usize,
    options: SearchOptions,
    options_hash: String,
    unit_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub board: BoardSpec,
    pub options: SearchOptions,
    pub unit_count: u64,
    /// In completion order.
    pub completed: Vec<UnitResult>,
    /// Ascending.
    pub pending: Vec<u64>,
}

/// Stable fingerprint of a set of search options.
pub fn options_hash(options: &SearchOptions) -> String {
    let json = serde_json::to_string(options).expect("options serialize");
    digest_hex(json.as_bytes())
}

fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn record(tag: char, payload: &str) -> String {
    let line = format!("{tag} {payload}\n");
    let check = format!("~ {} {}\n", line.len(), digest_hex(line.as_bytes()));
    line + &check
}

impl Checkpoint {
    /// A fresh checkpoint with every unit pending.
    pub fn new(board: &BoardSpec, options: SearchOptions) -> Result<Self> {
        board.require_countable()?;
        let unit_count = split_work(board, options.split_depth)?.len() as u64;
        Ok(Checkpoint {
            board: *board,
            options,
            unit_count,
            completed: Vec::new(),
            pending: (0..unit_count).collect(),
        })
    }

    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }

    /// Refuses to continue a run under a different board or configuration.
    pub fn ensure_matches(
        &self,
        board: &BoardSpec,
        options: &SearchOptions,
    ) -> Result<(), CheckpointError> {
        if &self.board != board {
            return Err(CheckpointError::BoardMismatch {
                expected: *board,
                found: self.board,
            });
        }
        if &self.options != options {
            return Err(CheckpointError::ConfigMismatch(format!(
                "checkpoint has {} ({}), run requested {} ({})",
                serde_json::to_string(&self.options).unwrap(),
                options_hash(&self.options),
                serde_json::to_string(options).unwrap(),
                options_hash(options),
            )));
        }
        Ok(())
    }

    fn complete(&mut self, r: UnitResult) {
        if let Ok(i) = self.pending.binary_search(&r.unit_id) {
            self.pending.remove(i);
        }
        self.completed.push(r);
    }

    /// Merged counts once every unit is done.
    pub fn totals(&self) -> Result<TourCounts> {
        merge_results(
            &self.board,
            &self.options,
            self.unit_count as usize,
            &self.completed,
        )
    }

    fn header(&self) -> Header {
        Header {
            magic: MAGIC.into(),
            format_version: FORMAT_VERSION,
            rows: self.board.rows(),
            cols: self.board.cols(),
            depth: self.options.split_depth,
            options: self.options,
            options_hash: options_hash(&self.options),
            unit_count: self.unit_count,
        }
    }
}

pub fn checkpoint_write<W: Write>(cp: &Checkpoint, mut out: W) -> Result<(), CheckpointError> {
    let mut buf = record(
        'H',
        &serde_json::to_string(&cp.header()).expect("header serializes"),
    );
    for r in &cp.completed {
        buf += &record('U', &serde_json::to_string(r).expect("result serializes"));
    }
    out.write_all(buf.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn checkpoint_read<R: Read>(mut input: R) -> Result<Checkpoint, CheckpointError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    parse(&bytes)
}

fn parse(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
    let corrupt = |offset: usize, reason: String| CheckpointError::Corrupt {
        offset: offset as u64,
        reason,
    };
    let line_end = |from: usize| {
        bytes[from..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| from + i + 1)
    };

    let mut pos = 0;
    let mut header: Option<Header> = None;
    let mut cp: Option<Checkpoint> = None;
    let mut seen: Vec<bool> = Vec::new();
    while pos < bytes.len() {
        let truncated = CheckpointError::Truncated { offset: pos as u64 };
        let rec_end = line_end(pos).ok_or(truncated)?;
        let check_end =
            line_end(rec_end).ok_or(CheckpointError::Truncated { offset: pos as u64 })?;
        let rec = &bytes[pos..rec_end];
        let check = std::str::from_utf8(&bytes[rec_end..check_end - 1])
            .map_err(|_| corrupt(rec_end, "integrity line is not UTF-8".into()))?;
        let expected = format!("~ {} {}", rec.len(), digest_hex(rec));
        if check != expected {
            return Err(corrupt(
                pos,
                format!("integrity check failed (found {check:?}, computed {expected:?})"),
            ));
        }
        let text = std::str::from_utf8(rec)
            .map_err(|_| corrupt(pos, "record is not UTF-8".into()))?
            .trim_end_matches('\n');
        let (tag, payload) = text
            .split_once(' ')
            .ok_or_else(|| corrupt(pos, "record has no tag".into()))?;
        match (tag, &header) {
            ("H", None) => {
                let value: serde_json::Value = serde_json::from_str(payload)
                    .map_err(|e| corrupt(pos, format!("header: {e}")))?;
                if value.get("magic").and_then(|m| m.as_str()) != Some(MAGIC) {
                    return Err(corrupt(pos, "not a knightcount checkpoint".into()));
                }
                let version = value
                    .get("format_version")
                    .and_then(|v| v.as_u64())
                    .unwrap_or(0);
                if version != FORMAT_VERSION as u64 {
                    return Err(CheckpointError::VersionMismatch {
                        found: version,
                        expected: FORMAT_VERSION,
                    });
                }
                let h: Header = serde_json::from_value(value)
                    .map_err(|e| corrupt(pos, format!("header: {e}")))?;
                if h.depth != h.options.split_depth {
                    return Err(corrupt(pos, "header depth disagrees with options".into()));
                }
                if h.options_hash != options_hash(&h.options) {
                    return Err(corrupt(pos, "options hash does not match options".into()));
                }
                let board =
                    BoardSpec::new(h.rows, h.cols).map_err(|e| corrupt(pos, e.to_string()))?;
                seen = vec![false; h.unit_count as usize];
                cp = Some(Checkpoint {
                    board,
                    options: h.options,
                    unit_count: h.unit_count,
                    completed: Vec::new(),
                    pending: Vec::new(),
                });
                header = Some(h);
            }
            ("U", Some(_)) => {
                let r: UnitResult = serde_json::from_str(payload)
                    .map_err(|e| corrupt(pos, format!("unit result: {e}")))?;
                let slot = seen
                    .get_mut(r.unit_id as usize)
                    .ok_or_else(|| corrupt(pos, format!("unit id {} out of range", r.unit_id)))?;
                if std::mem::replace(slot, true) {
                    return Err(corrupt(pos, format!("unit {} recorded twice", r.unit_id)));
                }
                cp.as_mut().unwrap().completed.push(r);
            }
            ("H", Some(_)) => return Err(corrupt(pos, "second header".into())),
            (_, None) => return Err(corrupt(pos, "first record is not a header".into())),
            (t, _) => return Err(corrupt(pos, format!("unknown record tag {t:?}"))),
        }
        pos = check_end;
    }
    let mut cp = cp.ok_or(CheckpointError::Truncated { offset: 0 })?;
    cp.pending = seen
        .iter()
        .enumerate()
        .filter(|(_, done)| !**done)
        .map(|(i, _)| i as u64)
        .collect();
    Ok(cp)
}

pub fn read_file(path: &Path) -> Result<Checkpoint, CheckpointError> {
    checkpoint_read(File::open(path)?)
}

/// Creates a new checkpoint file; refuses to overwrite an existing one.
pub fn create_file(path: &Path, cp: &Checkpoint) -> Result<(), CheckpointError> {
    let file = OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(path)
        .map_err(|e| match e.kind() {
            io::ErrorKind::AlreadyExists => CheckpointError::AlreadyExists(path.to_path_buf()),
            _ => e.into(),
        })?;
    checkpoint_write(cp, file)
}

/// Appends completed unit results to an existing checkpoint file. The single
/// writer for a run; workers hand results to it through [`Executor::stream`].
pub struct CheckpointWriter {
    file: File,
}

impl CheckpointWriter {
    pub fn append_to(path: &Path) -> Result<Self, CheckpointError> {
        Ok(CheckpointWriter {
            file: OpenOptions::new().append(true).open(path)?,
        })
    }

    pub fn record(&mut self, r: &UnitResult) -> Result<(), CheckpointError> {
        let rec = record('U', &serde_json::to_string(r).expect("result serializes"));
        self.file.write_all(rec.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

/// Counts pending units of the checkpoint at `path`, appending each result
/// as it completes. `max_units` stops after that many units (an orderly
/// interruption at a unit boundary). Returns the updated checkpoint.
pub fn run_checkpoint(
    path: &Path,
    exec: &Executor,
    max_units: Option<usize>,
) -> Result<Checkpoint> {
    let mut cp = read_file(path)?;
    let enumerator = Enumerator::new(&cp.board, cp.options)?;
    let units = split_work(&cp.board, cp.options.split_depth)?;
    if units.len() as u64 != cp.unit_count {
        return Err(CheckpointError::ConfigMismatch(format!(
            "checkpoint lists {} units, board and depth give {}",
            cp.unit_count,
            units.len()
        ))
        .into());
    }
    let todo: Vec<_> = cp
        .pending
        .iter()
        .take(max_units.unwrap_or(usize::MAX))
        .map(|&id| units[id as usize].clone())
        .collect();
    let mut writer = CheckpointWriter::append_to(path)?;
    exec.stream(
        &todo,
        |u| enumerator.count_unit(u),
        |r| -> Result<()> {
            let r = r?;
            writer.record(&r)?;
            cp.complete(r);
            Ok(())
        },
    )?;
    Ok(cp)
}
