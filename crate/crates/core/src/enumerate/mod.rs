//! Exact enumeration of open and closed knight's tours.
//!
//! The search space is partitioned into [`WorkUnit`]s, one per simple path
//! of a fixed length (the split depth). Units are counted independently and
//! their [`UnitResult`]s summed, so a run can be spread over workers and
//! checkpointed at unit boundaries.
//!
//! Pruning rules only cut branches with no completion, so every rule can be
//! switched off without changing any count:
//!
//! * `isolated_square`: a free square with no free neighbour that is not the
//!   last remaining square can never be visited and left.
//! * `anchor_exit` (closed search only): the anchor square must keep a free
//!   neighbour to return through until the final move.
//! * `dead_end_pair`: a free square not adjacent to the current square with
//!   exactly one free neighbour must end the path, so two of them are fatal.

mod search;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::board::{AdjacencyTable, BoardSpec, Square};
use crate::error::{Error, Result};
use crate::parallel::Executor;
use crate::symmetry::{counts_from_enumeration, OpenCounts, Tour, TransformGroup};

use search::{Search, Tally};

/// Largest board counted directly; bigger boards must be split into units
/// and run through a checkpoint.
pub const DIRECT_LIMIT: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pruning {
    pub isolated_square: bool,
    pub anchor_exit: bool,
    pub dead_end_pair: bool,
}

impl Pruning {
    pub const ALL: Pruning = Pruning {
        isolated_square: true,
        anchor_exit: true,
        dead_end_pair: true,
    };

    pub const NONE: Pruning = Pruning {
        isolated_square: false,
        anchor_exit: false,
        dead_end_pair: false,
    };
}

impl Default for Pruning {
    fn default() -> Self {
        Pruning::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every Hamiltonian path; closed cycles are tallied on the side.
    Open,
    /// Hamiltonian cycles only, searched from the anchor square.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub pruning: Pruning,
    pub split_depth: usize,
    /// Count only one start square per symmetry class and scale by class
    /// size. Only [`count_open_numberings`] honours this.
    pub symmetry_reduce_starts: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mode: SearchMode::Open,
            pruning: Pruning::ALL,
            split_depth: 3,
            symmetry_reduce_starts: false,
        }
    }
}

impl SearchOptions {
    pub fn open() -> Self {
        SearchOptions::default()
    }

    pub fn closed() -> Self {
        SearchOptions {
            mode: SearchMode::Closed,
            ..SearchOptions::default()
        }
    }

    pub fn with_pruning(self, pruning: Pruning) -> Self {
        SearchOptions { pruning, ..self }
    }

    pub fn with_split_depth(self, split_depth: usize) -> Self {
        SearchOptions {
            split_depth,
            ..self
        }
    }

    /// Split depth clamped to what the board allows.
    fn effective_depth(&self, board: &BoardSpec) -> usize {
        self.split_depth.clamp(1, board.squares() - 1)
    }
}

/// One slice of the search space: every tour extending `prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkUnit {
    pub id: u64,
    pub prefix: Tour,
}

impl WorkUnit {
    pub fn board(&self) -> &BoardSpec {
        self.prefix.board()
    }

    pub fn start(&self) -> Square {
        self.prefix.path()[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitResult {
    pub unit_id: u64,
    #[serde(with = "crate::decimal")]
    pub numberings: BigUint,
    #[serde(with = "crate::decimal")]
    pub canonical_numberings: BigUint,
    #[serde(with = "crate::decimal")]
    pub symmetric_classes: BigUint,
    #[serde(with = "crate::decimal")]
    pub symmetric_diagrams: BigUint,
    #[serde(with = "crate::decimal")]
    pub closed_directed: BigUint,
    #[serde(with = "crate::decimal")]
    pub nodes_expanded: BigUint,
}

impl UnitResult {
    fn from_tally(unit_id: u64, t: Tally) -> Self {
        UnitResult {
            unit_id,
            numberings: t.numberings.into(),
            canonical_numberings: t.canonical.into(),
            symmetric_classes: t.symmetric_classes.into(),
            symmetric_diagrams: t.symmetric_diagrams.into(),
            closed_directed: t.closed_directed.into(),
            nodes_expanded: t.nodes.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedCounts {
    /// Directed cycles through the anchor square.
    #[serde(with = "crate::decimal")]
    pub directed_cycles: BigUint,
    /// Undirected cycles (closed tour diagrams).
    #[serde(with = "crate::decimal")]
    pub diagrams: BigUint,
}

/// Exact tallies for one board. `open` is absent for closed-only searches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TourCounts {
    pub open: Option<OpenCounts>,
    pub closed: ClosedCounts,
}

/// Simple knight paths of `depth` squares, in lexicographic order of their
/// square sequences, numbered from 0.
pub fn split_work(board: &BoardSpec, depth: usize) -> Result<Vec<WorkUnit>> {
    if depth == 0 || depth >= board.squares() {
        return Err(Error::InvalidDepth {
            depth,
            squares: board.squares(),
        });
    }
    let adj = AdjacencyTable::new(board);
    let mut prefixes = Vec::new();
    let mut path = Vec::with_capacity(depth);
    for start in board.all_squares() {
        path.push(start);
        extend_prefixes(&adj, depth, start.bit(), &mut path, &mut prefixes);
        path.pop();
    }
    Ok(prefixes
        .into_iter()
        .enumerate()
        .map(|(id, p)| WorkUnit {
            id: id as u64,
            prefix: Tour::new(*board, p).expect("prefixes are simple knight paths"),
        })
        .collect())
}

fn extend_prefixes(
    adj: &AdjacencyTable,
    depth: usize,
    visited: u64,
    path: &mut Vec<Square>,
    out: &mut Vec<Vec<Square>>,
) {
    if path.len() == depth {
        out.push(path.clone());
        return;
    }
    let cur = *path.last().unwrap();
    for &next in adj.neighbors(cur) {
        if visited & next.bit() == 0 {
            path.push(next);
            extend_prefixes(adj, depth, visited | next.bit(), path, out);
            path.pop();
        }
    }
}

/// Board-level state shared by every unit of a run.
#[derive(Debug, Clone)]
pub struct Enumerator {
    board: BoardSpec,
    adjacency: AdjacencyTable,
    group: TransformGroup,
    options: SearchOptions,
}

impl Enumerator {
    pub fn new(board: &BoardSpec, options: SearchOptions) -> Result<Self> {
        board.require_countable()?;
        Ok(Enumerator {
            board: *board,
            adjacency: AdjacencyTable::new(board),
            group: TransformGroup::new(board),
            options,
        })
    }

    pub fn board(&self) -> &BoardSpec {
        &self.board
    }

    pub fn options(&self) -> &SearchOptions {
        &self.options
    }

    pub fn group(&self) -> &TransformGroup {
        &self.group
    }

    pub fn count_unit(&self, unit: &WorkUnit) -> Result<UnitResult> {
        if unit.board() != &self.board {
            return Err(Error::InvalidParameter(format!(
                "unit {} belongs to a {} board, not {}",
                unit.id,
                unit.board(),
                self.board
            )));
        }
        Ok(self.count_prefix(unit))
    }

    fn count_prefix(&self, unit: &WorkUnit) -> UnitResult {
        let prefix: Vec<u8> = unit.prefix.path().iter().map(|s| s.index() as u8).collect();
        let group = (!self.options.symmetry_reduce_starts).then_some(&self.group);
        let mut search = Search::new(
            self.adjacency.masks(),
            group,
            self.options.pruning,
            self.options.mode,
        );
        search.run(&prefix, self.board.full_mask());
        UnitResult::from_tally(unit.id, search.tally)
    }

    fn units(&self) -> Result<Vec<WorkUnit>> {
        if self.board.squares() > DIRECT_LIMIT {
            return Err(Error::NeedsPartitioning {
                squares: self.board.squares(),
                limit: DIRECT_LIMIT,
            });
        }
        split_work(&self.board, self.options.effective_depth(&self.board))
    }

    fn run_units(&self, units: &[WorkUnit], exec: &Executor) -> Vec<UnitResult> {
        exec.map(units, |u| self.count_prefix(u))
    }

    /// Runs the whole board and merges; the main entry point for exact counts.
    pub fn count(&self, exec: &Executor) -> Result<(TourCounts, BigUint)> {
        let units = self.units()?;
        let results = self.run_units(&units, exec);
        let nodes = total_nodes(&results);
        Ok((
            merge_results(&self.board, &self.options, units.len(), &results)?,
            nodes,
        ))
    }

    pub fn count_open_numberings(&self, exec: &Executor) -> Result<OpenNumberings> {
        let units = self.units()?;
        let squares = self.board.squares();
        let mut per_start = vec![BigUint::zero(); squares];
        if self.options.symmetry_reduce_starts {
            let rep = start_representatives(&self.group);
            let chosen: Vec<WorkUnit> = units
                .into_iter()
                .filter(|u| rep[u.start().index()] == u.start().index())
                .collect();
            for (u, r) in chosen.iter().zip(self.run_units(&chosen, exec)) {
                per_start[u.start().index()] += r.numberings;
            }
            for s in 0..squares {
                if rep[s] != s {
                    per_start[s] = per_start[rep[s]].clone();
                }
            }
        } else {
            for (u, r) in units.iter().zip(self.run_units(&units, exec)) {
                per_start[u.start().index()] += r.numberings;
            }
        }
        let total = per_start.iter().sum();
        Ok(OpenNumberings { total, per_start })
    }
}

/// For every square, the smallest square in its symmetry orbit.
fn start_representatives(group: &TransformGroup) -> Vec<usize> {
    group
        .board()
        .all_squares()
        .map(|s| {
            group
                .elements()
                .iter()
                .map(|t| t.apply(s).index())
                .min()
                .unwrap()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenNumberings {
    pub total: BigUint,
    /// Numberings starting at each square, indexed by square.
    pub per_start: Vec<BigUint>,
}

pub fn count_unit(unit: &WorkUnit, options: SearchOptions) -> Result<UnitResult> {
    Enumerator::new(unit.board(), options)?.count_unit(unit)
}

pub fn count_open_numberings(board: &BoardSpec, options: SearchOptions) -> Result<OpenNumberings> {
    let options = SearchOptions {
        mode: SearchMode::Open,
        ..options
    };
    Enumerator::new(board, options)?.count_open_numberings(&Executor::default())
}

pub fn count_open_diagrams(board: &BoardSpec, options: SearchOptions) -> Result<BigUint> {
    let n = count_open_numberings(board, options)?.total;
    let two = BigUint::from(2u32);
    if !(&n % &two).is_zero() {
        return Err(Error::Consistency(format!("odd numbering count {n}")));
    }
    Ok(n / two)
}

/// Returns `(classes, symmetric_diagrams)`.
pub fn count_geometric_classes(
    board: &BoardSpec,
    options: SearchOptions,
) -> Result<(BigUint, BigUint)> {
    let options = SearchOptions {
        mode: SearchMode::Open,
        symmetry_reduce_starts: false,
        ..options
    };
    let (counts, _) = Enumerator::new(board, options)?.count(&Executor::default())?;
    let open = counts.open.expect("open search yields open counts");
    Ok((open.geometric_classes, open.symmetric_diagrams))
}

pub fn count_closed_diagrams(board: &BoardSpec, options: SearchOptions) -> Result<BigUint> {
    let options = SearchOptions {
        mode: SearchMode::Closed,
        ..options
    };
    let (counts, _) = Enumerator::new(board, options)?.count(&Executor::default())?;
    Ok(counts.closed.diagrams)
}

/// Full [`TourCounts`] for a board in one pass.
pub fn count_tours(
    board: &BoardSpec,
    options: SearchOptions,
    exec: &Executor,
) -> Result<TourCounts> {
    let options = SearchOptions {
        symmetry_reduce_starts: false,
        ..options
    };
    Ok(Enumerator::new(board, options)?.count(exec)?.0)
}

pub fn total_nodes(results: &[UnitResult]) -> BigUint {
    results.iter().map(|r| &r.nodes_expanded).sum()
}

/// Sums unit results (exactly one per unit id in `0..unit_count`) and
/// derives the board's [`TourCounts`].
pub fn merge_results(
    board: &BoardSpec,
    options: &SearchOptions,
    unit_count: usize,
    results: &[UnitResult],
) -> Result<TourCounts> {
    let mut seen = vec![false; unit_count];
    for r in results {
        let slot = seen.get_mut(r.unit_id as usize).ok_or_else(|| {
            Error::Merge(format!(
                "unit id {} out of range 0..{unit_count}",
                r.unit_id
            ))
        })?;
        if std::mem::replace(slot, true) {
            return Err(Error::Merge(format!(
                "duplicate result for unit {}",
                r.unit_id
            )));
        }
        if r.canonical_numberings > r.numberings {
            return Err(Error::Merge(format!(
                "unit {} reports more canonical numberings than numberings",
                r.unit_id
            )));
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Merge(format!("missing result for unit {missing}")));
    }

    let sum = |f: fn(&UnitResult) -> &BigUint| -> BigUint { results.iter().map(f).sum() };
    let directed_cycles = sum(|r| &r.closed_directed);
    let two = BigUint::from(2u32);
    if !(&directed_cycles % &two).is_zero() {
        return Err(Error::Consistency(format!(
            "odd directed cycle count {directed_cycles}"
        )));
    }
    let closed = ClosedCounts {
        diagrams: &directed_cycles / &two,
        directed_cycles,
    };
    let open = match options.mode {
        SearchMode::Closed => None,
        SearchMode::Open => Some(counts_from_enumeration(
            &sum(|r| &r.numberings),
            &sum(|r| &r.canonical_numberings),
            &sum(|r| &r.symmetric_classes),
            &sum(|r| &r.symmetric_diagrams),
            TransformGroup::new(board).len(),
        )?),
    };
    Ok(TourCounts { open, closed })
}
