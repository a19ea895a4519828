//! Board geometry and the knight-move graph.
//!
//! Squares are numbered row-major from the bottom-left corner:
//! `index = row * cols + col`. Every board handled here fits in a single
//! `u64` occupancy word, which keeps the search loops allocation-free.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest board (in squares) the single-word bitboard path supports.
pub const MAX_SQUARES: usize = 64;

const KNIGHT_JUMPS: [(isize, isize); 8] = [
    (-2, -1),
    (-2, 1),
    (-1, -2),
    (-1, 2),
    (1, -2),
    (1, 2),
    (2, -1),
    (2, 1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBoard", into = "RawBoard")]
pub struct BoardSpec {
    rows: usize,
    cols: usize,
}

#[derive(Serialize, Deserialize)]
struct RawBoard {
    rows: usize,
    cols: usize,
}

impl TryFrom<RawBoard> for BoardSpec {
    type Error = Error;

    fn try_from(raw: RawBoard) -> Result<Self> {
        BoardSpec::new(raw.rows, raw.cols)
    }
}

impl From<BoardSpec> for RawBoard {
    fn from(b: BoardSpec) -> Self {
        RawBoard {
            rows: b.rows,
            cols: b.cols,
        }
    }
}

impl BoardSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidBoard { rows, cols });
        }
        match rows.checked_mul(cols) {
            Some(squares) if squares <= MAX_SQUARES => Ok(BoardSpec { rows, cols }),
            Some(squares) => Err(Error::UnsupportedSize {
                squares,
                max: MAX_SQUARES,
            }),
            None => Err(Error::UnsupportedSize {
                squares: usize::MAX,
                max: MAX_SQUARES,
            }),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn squares(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Rejects single-square boards, which every counting and sampling
    /// operation treats as degenerate.
    pub fn require_countable(&self) -> Result<()> {
        if self.squares() < 2 {
            return Err(Error::DegenerateBoard {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn square(&self, row: usize, col: usize) -> Option<Square> {
        (row < self.rows && col < self.cols).then(|| Square((row * self.cols + col) as u8))
    }

    pub fn square_at(&self, index: usize) -> Result<Square> {
        if index < self.squares() {
            Ok(Square(index as u8))
        } else {
            Err(Error::InvalidSquare {
                index,
                squares: self.squares(),
            })
        }
    }

    pub fn coords(&self, sq: Square) -> (usize, usize) {
        (sq.index() / self.cols, sq.index() % self.cols)
    }

    pub fn all_squares(&self) -> impl Iterator<Item = Square> {
        (0..self.squares()).map(|i| Square(i as u8))
    }

    /// Mask with one bit set per square of the board.
    pub fn full_mask(&self) -> u64 {
        if self.squares() == 64 {
            u64::MAX
        } else {
            (1u64 << self.squares()) - 1
        }
    }

    pub fn is_knight_move(&self, a: Square, b: Square) -> bool {
        let (ar, ac) = self.coords(a);
        let (br, bc) = self.coords(b);
        let (dr, dc) = (ar.abs_diff(br), ac.abs_diff(bc));
        (dr == 1 && dc == 2) || (dr == 2 && dc == 1)
    }
}

impl fmt::Display for BoardSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// A square index in `[0, squares)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Square(u8);

impl Square {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn bit(self) -> u64 {
        1u64 << self.0
    }

    pub(crate) fn from_index_unchecked(index: usize) -> Self {
        debug_assert!(index < MAX_SQUARES);
        Square(index as u8)
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Squares one knight move away from `sq`, ascending by index.
pub fn knight_moves_from(sq: Square, board: &BoardSpec) -> Vec<Square> {
    let (row, col) = board.coords(sq);
    let mut moves: Vec<Square> = KNIGHT_JUMPS
        .iter()
        .filter_map(|&(dr, dc)| {
            let r = row.checked_add_signed(dr)?;
            let c = col.checked_add_signed(dc)?;
            board.square(r, c)
        })
        .collect();
    moves.sort_unstable();
    moves
}

/// The knight graph of a board, as both sorted neighbour lists and bitmasks.
#[derive(Debug, Clone)]
pub struct AdjacencyTable {
    board: BoardSpec,
    lists: Vec<Vec<Square>>,
    masks: Vec<u64>,
}

impl AdjacencyTable {
    pub fn new(board: &BoardSpec) -> Self {
        let lists: Vec<Vec<Square>> = board
            .all_squares()
            .map(|sq| knight_moves_from(sq, board))
            .collect();
        let masks = lists
            .iter()
            .map(|l| l.iter().fold(0u64, |m, s| m | s.bit()))
            .collect();
        AdjacencyTable {
            board: *board,
            lists,
            masks,
        }
    }

    pub fn board(&self) -> &BoardSpec {
        &self.board
    }

    pub fn neighbors(&self, sq: Square) -> &[Square] {
        &self.lists[sq.index()]
    }

    pub fn mask(&self, sq: Square) -> u64 {
        self.masks[sq.index()]
    }

    pub(crate) fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn degree(&self, sq: Square) -> usize {
        self.lists[sq.index()].len()
    }

    pub fn contains_edge(&self, a: Square, b: Square) -> bool {
        self.masks[a.index()] & b.bit() != 0
    }

    /// Number of ordered pairs `(a, b)` joined by a knight move.
    pub fn directed_edge_count(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

pub fn build_adjacency(board: &BoardSpec) -> AdjacencyTable {
    AdjacencyTable::new(board)
}

/// Visited-set over the squares of one board.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OccupancyMask(u64);

impl OccupancyMask {
    pub fn empty() -> Self {
        OccupancyMask(0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, sq: Square) -> bool {
        self.0 & sq.bit() != 0
    }

    pub fn insert(&mut self, sq: Square) {
        self.0 |= sq.bit();
    }

    pub fn remove(&mut self, sq: Square) {
        self.0 &= !sq.bit();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Square> {
        BitIter(self.0)
    }
}

/// Iterates the set bits of a word as squares, lowest first.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BitIter(pub(crate) u64);

impl Iterator for BitIter {
    type Item = Square;

    #[inline]
    fn next(&mut self) -> Option<Square> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(Square::from_index_unchecked(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sq(b: &BoardSpec, r: usize, c: usize) -> Square {
        b.square(r, c).unwrap()
    }

    #[test]
    fn make_board_examples() {
        assert_eq!(BoardSpec::new(8, 8).unwrap().squares(), 64);
        assert_eq!(BoardSpec::new(5, 5).unwrap().squares(), 25);
        assert!(matches!(
            BoardSpec::new(0, 8),
            Err(Error::InvalidBoard { .. })
        ));
        assert!(matches!(
            BoardSpec::new(8, 0),
            Err(Error::InvalidBoard { .. })
        ));
        assert!(matches!(
            BoardSpec::new(9, 8),
            Err(Error::UnsupportedSize { squares: 72, .. })
        ));
        assert!(BoardSpec::new(1, 1).unwrap().require_countable().is_err());
        assert!(BoardSpec::new(1, 2).unwrap().require_countable().is_ok());
    }

    #[test]
    fn knight_moves_examples() {
        let b = BoardSpec::new(8, 8).unwrap();
        assert_eq!(
            knight_moves_from(sq(&b, 0, 0), &b),
            vec![sq(&b, 1, 2), sq(&b, 2, 1)]
        );
        assert_eq!(knight_moves_from(sq(&b, 3, 3), &b).len(), 8);
        let small = BoardSpec::new(3, 3).unwrap();
        assert!(knight_moves_from(sq(&small, 1, 1), &small).is_empty());
    }

    #[test]
    fn adjacency_examples() {
        let b = BoardSpec::new(8, 8).unwrap();
        // sum of degrees counted straight from the geometry
        let brute: usize = (0..8isize)
            .flat_map(|r| (0..8isize).map(move |c| (r, c)))
            .map(|(r, c)| {
                KNIGHT_JUMPS
                    .iter()
                    .filter(|(dr, dc)| (0..8).contains(&(r + dr)) && (0..8).contains(&(c + dc)))
                    .count()
            })
            .sum();
        assert_eq!(brute, 336);
        assert_eq!(build_adjacency(&b).directed_edge_count(), 336);

        let small = BoardSpec::new(3, 3).unwrap();
        let adj = build_adjacency(&small);
        assert_eq!(adj.degree(sq(&small, 1, 1)), 0);
        for (r, c) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
            assert_eq!(adj.degree(sq(&small, r, c)), 2);
        }

        let rank = BoardSpec::new(1, 8).unwrap();
        let adj = build_adjacency(&rank);
        assert!(rank.all_squares().all(|s| adj.degree(s) == 0));
    }

    #[test]
    fn occupancy_mask_ops() {
        let b = BoardSpec::new(8, 8).unwrap();
        let mut m = OccupancyMask::empty();
        let corner = sq(&b, 7, 7);
        m.insert(corner);
        m.insert(sq(&b, 0, 0));
        assert!(m.contains(corner));
        assert_eq!(m.len(), 2);
        m.remove(corner);
        assert!(!m.contains(corner));
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![sq(&b, 0, 0)]);
    }

    fn boards() -> impl Strategy<Value = BoardSpec> {
        (1usize..=8, 1usize..=8).prop_map(|(r, c)| BoardSpec::new(r, c).unwrap())
    }

    proptest! {
        #[test]
        fn adjacency_invariants(b in boards()) {
            let adj = build_adjacency(&b);
            for a in b.all_squares() {
                let n = adj.neighbors(a);
                prop_assert!(n.len() <= 8);
                prop_assert!(n.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!n.contains(&a));
                for &x in n {
                    prop_assert!(adj.contains_edge(x, a));
                    let (ar, ac) = b.coords(a);
                    let (xr, xc) = b.coords(x);
                    prop_assert_ne!((ar + ac) % 2, (xr + xc) % 2);
                    prop_assert!(b.is_knight_move(a, x));
                }
            }
        }

        #[test]
        fn index_round_trip(b in boards()) {
            for s in b.all_squares() {
                let (r, c) = b.coords(s);
                prop_assert_eq!(b.square(r, c), Some(s));
            }
        }
    }
}
