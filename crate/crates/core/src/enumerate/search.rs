//! The depth-first backtracker shared by every exact count.

use super::{Pruning, SearchMode};
use crate::symmetry::TransformGroup;

/// Cycles are anchored at the lowest-index square.
pub(crate) const ANCHOR: usize = 0;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Tally {
    pub numberings: u64,
    pub canonical: u64,
    pub symmetric_classes: u64,
    pub symmetric_diagrams: u64,
    pub closed_directed: u64,
    pub nodes: u64,
}

pub(crate) struct Search<'a> {
    adj: &'a [u64],
    group: Option<&'a TransformGroup>,
    pruning: Pruning,
    closed_only: bool,
    path: Vec<u8>,
    pub tally: Tally,
}

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

impl<'a> Search<'a> {
    pub fn new(
        adj: &'a [u64],
        group: Option<&'a TransformGroup>,
        pruning: Pruning,
        mode: SearchMode,
    ) -> Self {
        Search {
            adj,
            group,
            pruning,
            closed_only: mode == SearchMode::Closed,
            path: Vec::with_capacity(adj.len()),
            tally: Tally::default(),
        }
    }

    /// Counts every full path extending `prefix`. The prefix must already
    /// be a valid simple knight path.
    pub fn run(&mut self, prefix: &[u8], full: u64) {
        if self.closed_only && prefix[0] as usize != ANCHOR {
            return;
        }
        let visited = prefix.iter().fold(0u64, |m, &s| m | 1u64 << s);
        self.path.clear();
        self.path.extend_from_slice(prefix);
        let cur = *prefix.last().expect("non-empty prefix") as usize;
        self.descend(cur, full & !visited, true);
    }

    fn descend(&mut self, cur: usize, free: u64, root: bool) {
        self.tally.nodes += 1;
        if free == 0 {
            self.leaf(cur);
            return;
        }
        if self.pruned(cur, free, root) {
            return;
        }
        for next in bits(self.adj[cur] & free) {
            self.path.push(next as u8);
            self.descend(next, free & !(1u64 << next), false);
            self.path.pop();
        }
    }

    #[inline]
    fn pruned(&self, cur: usize, free: u64, root: bool) -> bool {
        let adj = self.adj;
        if self.pruning.isolated_square && free & (free - 1) != 0 {
            // Only the current square's neighbours lost a free neighbour
            // since the parent node was checked.
            let scan = if root { free } else { adj[cur] & free };
            if bits(scan).any(|u| adj[u] & free == 0) {
                return true;
            }
        }
        if self.closed_only && self.pruning.anchor_exit && adj[ANCHOR] & free == 0 {
            return true;
        }
        if self.pruning.dead_end_pair {
            // A free square out of reach of `cur` with one free neighbour
            // can only be entered, never left: it has to be the last square.
            let mut ends = 0;
            for u in bits(free & !adj[cur]) {
                if (adj[u] & free).count_ones() == 1 {
                    ends += 1;
                    if ends > 1 {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn leaf(&mut self, cur: usize) {
        let closes = self.path[0] as usize == ANCHOR && self.adj[cur] & (1u64 << ANCHOR) != 0;
        if closes {
            self.tally.closed_directed += 1;
        }
        if self.closed_only {
            return;
        }
        self.tally.numberings += 1;
        if let Some(group) = self.group {
            if group.is_canonical_path(&self.path) {
                self.tally.canonical += 1;
                let stab = group.stabilizer_size_path(&self.path);
                if stab > 1 {
                    self.tally.symmetric_classes += 1;
                    self.tally.symmetric_diagrams += (group.len() / stab) as u64;
                }
            }
        }
    }
}
