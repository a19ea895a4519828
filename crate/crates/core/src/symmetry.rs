//! Board symmetries, tour orbits and canonical representatives.
//!
//! A numbering's orbit is its images under every board symmetry, each taken
//! forwards and reversed. The canonical numbering of an orbit is the
//! lexicographically smallest square-index sequence in it, so a class can be
//! recognised on the fly during enumeration without a global seen-set.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::board::{BoardSpec, Square};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    /// `(row, col) -> (rows-1-row, col)`.
    FlipHorizontal,
    /// `(row, col) -> (row, cols-1-col)`.
    FlipVertical,
    /// `(row, col) -> (col, row)`.
    FlipMainDiagonal,
    /// `(row, col) -> (n-1-col, n-1-row)`.
    FlipAntiDiagonal,
}

impl TransformKind {
    pub const ALL: [TransformKind; 8] = [
        TransformKind::Identity,
        TransformKind::Rot90,
        TransformKind::Rot180,
        TransformKind::Rot270,
        TransformKind::FlipHorizontal,
        TransformKind::FlipVertical,
        TransformKind::FlipMainDiagonal,
        TransformKind::FlipAntiDiagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Identity => "identity",
            TransformKind::Rot90 => "rot90",
            TransformKind::Rot180 => "rot180",
            TransformKind::Rot270 => "rot270",
            TransformKind::FlipHorizontal => "flip-horizontal",
            TransformKind::FlipVertical => "flip-vertical",
            TransformKind::FlipMainDiagonal => "flip-main-diagonal",
            TransformKind::FlipAntiDiagonal => "flip-anti-diagonal",
        }
    }

    /// Whether this kind maps only square boards onto themselves.
    pub fn needs_square_board(self) -> bool {
        matches!(
            self,
            TransformKind::Rot90
                | TransformKind::Rot270
                | TransformKind::FlipMainDiagonal
                | TransformKind::FlipAntiDiagonal
        )
    }

    fn map(self, row: usize, col: usize, rows: usize, cols: usize) -> (usize, usize) {
        let (h, w) = (rows - 1, cols - 1);
        match self {
            TransformKind::Identity => (row, col),
            TransformKind::Rot90 => (col, h - row),
            TransformKind::Rot180 => (h - row, w - col),
            TransformKind::Rot270 => (w - col, row),
            TransformKind::FlipHorizontal => (h - row, col),
            TransformKind::FlipVertical => (row, w - col),
            TransformKind::FlipMainDiagonal => (col, row),
            TransformKind::FlipAntiDiagonal => (w - col, h - row),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A symmetry of a specific board, stored as a square permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transform {
    kind: TransformKind,
    board: BoardSpec,
    mapping: Vec<u8>,
}

impl Transform {
    pub fn new(kind: TransformKind, board: &BoardSpec) -> Result<Self> {
        if kind.needs_square_board() && !board.is_square() {
            return Err(Error::InvalidTransform {
                kind: kind.name(),
                rows: board.rows(),
                cols: board.cols(),
            });
        }
        let mapping = board
            .all_squares()
            .map(|s| {
                let (r, c) = board.coords(s);
                let (r2, c2) = kind.map(r, c, board.rows(), board.cols());
                (r2 * board.cols() + c2) as u8
            })
            .collect();
        Ok(Transform {
            kind,
            board: *board,
            mapping,
        })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn board(&self) -> &BoardSpec {
        &self.board
    }

    pub fn apply(&self, sq: Square) -> Square {
        Square::from_index_unchecked(self.mapping[sq.index()] as usize)
    }

    pub(crate) fn mapping(&self) -> &[u8] {
        &self.mapping
    }
}

/// The symmetry group of a board: the dihedral group of order 8 for square
/// boards, `{identity, rot180, both axis flips}` for proper rectangles.
/// The identity is always first.
#[derive(Debug, Clone)]
pub struct TransformGroup {
    board: BoardSpec,
    elements: Vec<Transform>,
}

pub fn board_transform_group(board: &BoardSpec) -> TransformGroup {
    TransformGroup::new(board)
}

impl TransformGroup {
    pub fn new(board: &BoardSpec) -> Self {
        let elements = TransformKind::ALL
            .iter()
            .filter(|k| board.is_square() || !k.needs_square_board())
            .map(|&k| Transform::new(k, board).expect("kind filtered for board shape"))
            .collect();
        TransformGroup {
            board: *board,
            elements,
        }
    }

    pub fn board(&self) -> &BoardSpec {
        &self.board
    }

    pub fn elements(&self) -> &[Transform] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, kind: TransformKind) -> Option<&Transform> {
        self.elements.iter().find(|t| t.kind == kind)
    }

    /// Every distinct numbering reachable by a symmetry and optional reversal.
    pub fn orbit(&self, tour: &Tour) -> BTreeSet<Tour> {
        let mut out = BTreeSet::new();
        for t in &self.elements {
            let img = tour.mapped(t);
            out.insert(img.reversed());
            out.insert(img);
        }
        out
    }

    pub fn canonical(&self, tour: &Tour) -> Tour {
        self.orbit(tour)
            .into_iter()
            .next()
            .expect("orbit contains the tour itself")
    }

    pub fn is_canonical(&self, tour: &Tour) -> bool {
        let raw: Vec<u8> = tour.path.iter().map(|s| s.index() as u8).collect();
        self.is_canonical_path(&raw)
    }

    /// Streaming canonical test: true iff no image of `path` (under any
    /// symmetry, forwards or reversed) is lexicographically smaller.
    pub(crate) fn is_canonical_path(&self, path: &[u8]) -> bool {
        let n = path.len();
        for (i, t) in self.elements.iter().enumerate() {
            let m = t.mapping();
            if i > 0 && lex_less(path.iter().map(|&s| m[s as usize]), path) {
                return false;
            }
            if lex_less((0..n).map(|k| m[path[n - 1 - k] as usize]), path) {
                return false;
            }
        }
        true
    }

    /// Number of group elements fixing the tour's diagram, where the diagram
    /// is the unordered set of edges the path uses.
    pub fn stabilizer_size(&self, tour: &Tour) -> usize {
        let raw: Vec<u8> = tour.path.iter().map(|s| s.index() as u8).collect();
        self.stabilizer_size_path(&raw)
    }

    pub(crate) fn stabilizer_size_path(&self, path: &[u8]) -> usize {
        let diagram = edge_set(path.iter().copied());
        self.elements
            .iter()
            .filter(|t| {
                let m = t.mapping();
                edge_set(path.iter().map(|&s| m[s as usize])) == diagram
            })
            .count()
    }
}

fn lex_less(candidate: impl Iterator<Item = u8>, path: &[u8]) -> bool {
    for (a, &b) in candidate.zip(path) {
        if a != b {
            return a < b;
        }
    }
    false
}

fn edge_set(path: impl Iterator<Item = u8>) -> Vec<(u8, u8)> {
    let mut prev = None;
    let mut edges = Vec::new();
    for s in path {
        if let Some(p) = prev {
            edges.push(if p < s { (p, s) } else { (s, p) });
        }
        prev = Some(s);
    }
    edges.sort_unstable();
    edges
}

/// An ordered sequence of distinct squares joined by knight moves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tour {
    board: BoardSpec,
    path: Vec<Square>,
}

impl Tour {
    pub fn new(board: BoardSpec, path: Vec<Square>) -> Result<Self> {
        let mut seen = 0u64;
        for &s in &path {
            if s.index() >= board.squares() {
                return Err(Error::InvalidTour(format!(
                    "square {s} is off the {board} board"
                )));
            }
            if seen & s.bit() != 0 {
                return Err(Error::InvalidTour(format!("square {s} visited twice")));
            }
            seen |= s.bit();
        }
        if let Some(w) = path.windows(2).find(|w| !board.is_knight_move(w[0], w[1])) {
            return Err(Error::InvalidTour(format!(
                "{} -> {} is not a knight move",
                w[0], w[1]
            )));
        }
        Ok(Tour { board, path })
    }

    pub fn from_indices(board: BoardSpec, indices: &[usize]) -> Result<Self> {
        let path = indices
            .iter()
            .map(|&i| board.square_at(i))
            .collect::<Result<_>>()?;
        Tour::new(board, path)
    }

    pub fn board(&self) -> &BoardSpec {
        &self.board
    }

    pub fn path(&self) -> &[Square] {
        &self.path
    }

    pub fn indices(&self) -> Vec<usize> {
        self.path.iter().map(|s| s.index()).collect()
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.path.len() == self.board.squares()
    }

    pub fn is_closed(&self) -> bool {
        self.is_full()
            && self.path.len() >= 2
            && self
                .board
                .is_knight_move(self.path[0], self.path[self.path.len() - 1])
    }

    pub fn reversed(&self) -> Tour {
        let mut path = self.path.clone();
        path.reverse();
        Tour {
            board: self.board,
            path,
        }
    }

    fn mapped(&self, t: &Transform) -> Tour {
        Tour {
            board: self.board,
            path: self.path.iter().map(|&s| t.apply(s)).collect(),
        }
    }

    fn require_full_open(&self) -> Result<()> {
        if !self.is_full() || self.path.len() < 2 {
            return Err(Error::InvalidTour(format!(
                "expected a full tour of {} squares, got {}",
                self.board.squares(),
                self.path.len()
            )));
        }
        Ok(())
    }
}

pub fn apply_transform(t: &Transform, tour: &Tour) -> Result<Tour> {
    if t.board() != tour.board() {
        return Err(Error::InvalidTransform {
            kind: t.kind().name(),
            rows: tour.board().rows(),
            cols: tour.board().cols(),
        });
    }
    Ok(tour.mapped(t))
}

pub fn numbering_orbit(tour: &Tour) -> Result<BTreeSet<Tour>> {
    tour.require_full_open()?;
    Ok(TransformGroup::new(tour.board()).orbit(tour))
}

pub fn canonical_numbering(tour: &Tour) -> Result<Tour> {
    tour.require_full_open()?;
    Ok(TransformGroup::new(tour.board()).canonical(tour))
}

pub fn is_canonical(tour: &Tour) -> Result<bool> {
    tour.require_full_open()?;
    Ok(TransformGroup::new(tour.board()).is_canonical(tour))
}

pub fn diagram_stabilizer_size(tour: &Tour) -> Result<usize> {
    tour.require_full_open()?;
    Ok(TransformGroup::new(tour.board()).stabilizer_size(tour))
}

/// Exact open-tour tallies for one board.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenCounts {
    /// Directed numberings.
    #[serde(with = "crate::decimal")]
    pub numberings: BigUint,
    /// Undirected diagrams.
    #[serde(with = "crate::decimal")]
    pub diagrams: BigUint,
    /// Classes of diagrams under the board's symmetries.
    #[serde(with = "crate::decimal")]
    pub geometric_classes: BigUint,
    /// Classes whose diagrams are fixed by some non-identity symmetry.
    #[serde(with = "crate::decimal")]
    pub symmetric_classes: BigUint,
    /// Diagrams fixed by some non-identity symmetry.
    #[serde(with = "crate::decimal")]
    pub symmetric_diagrams: BigUint,
    pub group_size: usize,
    /// Whether `diagrams == group_size * geometric_classes` holds exactly.
    pub division_relation_exact: bool,
}

/// Derives diagram and class counts from raw enumeration tallies and
/// cross-checks them.
///
/// `symmetric_diagrams` must count every diagram with a non-trivial
/// stabilizer (not just one per class); together with the class counts it
/// pins down `diagrams` independently of `numberings`, which is checked.
pub fn counts_from_enumeration(
    numberings: &BigUint,
    canonical_count: &BigUint,
    symmetric_classes: &BigUint,
    symmetric_diagrams: &BigUint,
    group_size: usize,
) -> Result<OpenCounts> {
    let two = BigUint::from(2u32);
    if !(numberings % &two).is_zero() {
        return Err(Error::Consistency(format!(
            "odd numbering count {numberings}: every diagram has exactly two numberings"
        )));
    }
    let diagrams = numberings / &two;
    let g = BigUint::from(group_size);
    if canonical_count > &diagrams || canonical_count * &g < diagrams {
        return Err(Error::Consistency(format!(
            "class count {canonical_count} outside [{diagrams}/{group_size}, {diagrams}]"
        )));
    }
    if symmetric_classes > canonical_count {
        return Err(Error::Consistency(format!(
            "{symmetric_classes} symmetric classes exceed {canonical_count} classes"
        )));
    }
    let asymmetric = canonical_count - symmetric_classes;
    let from_classes = asymmetric * &g + symmetric_diagrams;
    if from_classes != diagrams {
        return Err(Error::Consistency(format!(
            "class sizes sum to {from_classes} diagrams, numberings give {diagrams}"
        )));
    }
    let exact = canonical_count * &g == diagrams;
    if exact != symmetric_diagrams.is_zero() {
        return Err(Error::Consistency(
            "division relation disagrees with symmetric diagram count".into(),
        ));
    }
    Ok(OpenCounts {
        numberings: numberings.clone(),
        diagrams,
        geometric_classes: canonical_count.clone(),
        symmetric_classes: symmetric_classes.clone(),
        symmetric_diagrams: symmetric_diagrams.clone(),
        group_size,
        division_relation_exact: exact,
    })
}
