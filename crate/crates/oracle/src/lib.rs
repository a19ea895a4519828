//! Plain brute-force reference counters.
//!
//! Nothing here shares code with `knightcount`: neighbour lists, board
//! symmetries and probability replay are all recomputed from scratch with
//! the most obvious algorithm available, so that agreement between the two
//! is meaningful. None of this is fast.

use std::collections::HashSet;

/// Directed open numberings on the 5x5 board, as produced by
/// [`count_open_numberings`]`(5, 5)`.
pub const OPEN_NUMBERINGS_5X5: u64 = 1_728;

/// Directed open numberings on the 6x6 board, as produced by
/// [`count_open_numberings`]`(6, 6)` (run with `cargo test -p
/// knightcount-oracle --release -- --ignored`; several hours on one core).
pub const OPEN_NUMBERINGS_6X6: u64 = 6_637_920;

/// Directed Hamiltonian cycles through square 0 on the 6x6 board, as produced
/// by [`count_directed_cycles`]`(6, 6)`.
pub const DIRECTED_CYCLES_6X6: u64 = 19_724;

const JUMPS: [(i64, i64); 8] = [
    (1, 2),
    (2, 1),
    (-1, 2),
    (-2, 1),
    (1, -2),
    (2, -1),
    (-1, -2),
    (-2, -1),
];

pub fn neighbors(rows: usize, cols: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); rows * cols];
    for r in 0..rows as i64 {
        for c in 0..cols as i64 {
            for (dr, dc) in JUMPS {
                let (nr, nc) = (r + dr, c + dc);
                if nr >= 0 && nc >= 0 && nr < rows as i64 && nc < cols as i64 {
                    out[(r * cols as i64 + c) as usize].push((nr * cols as i64 + nc) as usize);
                }
            }
        }
    }
    out
}

fn walk<F: FnMut(&[usize])>(
    nbrs: &[Vec<usize>],
    visited: &mut [bool],
    path: &mut Vec<usize>,
    on_full: &mut F,
) {
    if path.len() == visited.len() {
        on_full(path);
        return;
    }
    let cur = *path.last().unwrap();
    for &next in &nbrs[cur] {
        if !visited[next] {
            visited[next] = true;
            path.push(next);
            walk(nbrs, visited, path, on_full);
            path.pop();
            visited[next] = false;
        }
    }
}

fn walk_from<F: FnMut(&[usize])>(rows: usize, cols: usize, start: usize, on_full: &mut F) {
    let nbrs = neighbors(rows, cols);
    let mut visited = vec![false; rows * cols];
    visited[start] = true;
    let mut path = vec![start];
    walk(&nbrs, &mut visited, &mut path, on_full);
}

/// Number of directed Hamiltonian paths starting at `start`.
pub fn count_open_from(rows: usize, cols: usize, start: usize) -> u64 {
    let mut n = 0;
    walk_from(rows, cols, start, &mut |_| n += 1);
    n
}

/// Number of directed Hamiltonian paths on the knight graph.
pub fn count_open_numberings(rows: usize, cols: usize) -> u64 {
    (0..rows * cols)
        .map(|s| count_open_from(rows, cols, s))
        .sum()
}

/// Directed Hamiltonian cycles through square 0 (paths from 0 whose last
/// square is a knight move away from 0).
pub fn count_directed_cycles(rows: usize, cols: usize) -> u64 {
    let nbrs = neighbors(rows, cols);
    let mut n = 0;
    walk_from(rows, cols, 0, &mut |p| {
        if nbrs[*p.last().unwrap()].contains(&0) {
            n += 1;
        }
    });
    n
}

/// Every directed open numbering, in start-square then depth-first order.
pub fn enumerate_numberings(rows: usize, cols: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    for s in 0..rows * cols {
        walk_from(rows, cols, s, &mut |p| all.push(p.to_vec()));
    }
    all
}

/// The board's symmetries as explicit square permutations: eight for square
/// boards, four for proper rectangles.
pub fn symmetries(rows: usize, cols: usize) -> Vec<Vec<usize>> {
    let (h, w) = (rows - 1, cols - 1);
    type Map = Box<dyn Fn(usize, usize) -> (usize, usize)>;
    let mut maps: Vec<Map> = vec![
        Box::new(|r, c| (r, c)),
        Box::new(move |r, c| (h - r, w - c)),
        Box::new(move |r, c| (h - r, c)),
        Box::new(move |r, c| (r, w - c)),
    ];
    if rows == cols {
        maps.push(Box::new(move |r, c| (c, h - r)));
        maps.push(Box::new(move |r, c| (w - c, r)));
        maps.push(Box::new(|r, c| (c, r)));
        maps.push(Box::new(move |r, c| (w - c, h - r)));
    }
    maps.iter()
        .map(|f| {
            (0..rows * cols)
                .map(|i| {
                    let (r, c) = f(i / cols, i % cols);
                    r * cols + c
                })
                .collect()
        })
        .collect()
}

fn edge_set(path: &[usize]) -> Vec<(usize, usize)> {
    let mut e: Vec<_> = path
        .windows(2)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect();
    e.sort_unstable();
    e
}

/// Result of brute-force classification of all open numberings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classes {
    pub numberings: u64,
    pub diagrams: u64,
    pub geometric_classes: u64,
    /// Diagrams fixed by at least one non-identity symmetry.
    pub symmetric_diagrams: u64,
}

/// Deduplicates numberings by inserting whole orbits into a seen-set, and
/// separately counts diagrams (edge sets) with a non-trivial symmetry.
pub fn classify(rows: usize, cols: usize) -> Classes {
    let tours = enumerate_numberings(rows, cols);
    let syms = symmetries(rows, cols);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut classes = 0;
    for t in &tours {
        if seen.contains(t) {
            continue;
        }
        classes += 1;
        for g in &syms {
            let img: Vec<usize> = t.iter().map(|&s| g[s]).collect();
            let mut rev = img.clone();
            rev.reverse();
            seen.insert(img);
            seen.insert(rev);
        }
    }
    let diagrams: HashSet<Vec<(usize, usize)>> = tours.iter().map(|t| edge_set(t)).collect();
    let symmetric = diagrams
        .iter()
        .filter(|d| {
            syms.iter().skip(1).any(|g| {
                let mut img: Vec<_> = d
                    .iter()
                    .map(|&(a, b)| (g[a].min(g[b]), g[a].max(g[b])))
                    .collect();
                img.sort_unstable();
                &img == *d
            })
        })
        .count();
    Classes {
        numberings: tours.len() as u64,
        diagrams: diagrams.len() as u64,
        geometric_classes: classes,
        symmetric_diagrams: symmetric as u64,
    }
}

/// Probability that the degree-biased sampler produces exactly `path`:
/// uniform start, then each move chosen with probability proportional to
/// `(d + epsilon)^(-alpha)` where `d` counts the candidate's unvisited
/// neighbours. Returns 0 if the path is not a legal walk.
pub fn path_probability(rows: usize, cols: usize, path: &[usize], alpha: f64, epsilon: f64) -> f64 {
    let nbrs = neighbors(rows, cols);
    let mut visited = vec![false; rows * cols];
    let mut p = 1.0 / (rows * cols) as f64;
    visited[path[0]] = true;
    for w in path.windows(2) {
        let cands: Vec<usize> = nbrs[w[0]]
            .iter()
            .copied()
            .filter(|&s| !visited[s])
            .collect();
        if !cands.contains(&w[1]) {
            return 0.0;
        }
        let weight = |s: usize| {
            let d = nbrs[s].iter().filter(|&&t| !visited[t]).count() as f64;
            (d + epsilon).powf(-alpha)
        };
        let total: f64 = cands.iter().map(|&s| weight(s)).sum();
        p *= weight(w[1]) / total;
        visited[w[1]] = true;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_boards() {
        assert_eq!(count_open_numberings(3, 3), 0);
        assert_eq!(count_open_numberings(4, 4), 0);
        assert_eq!(count_open_numberings(5, 5), OPEN_NUMBERINGS_5X5);
        assert_eq!(count_directed_cycles(5, 5), 0);
    }

    #[test]
    fn symmetries_are_permutations() {
        for (r, c) in [(5, 5), (3, 4), (4, 6)] {
            for g in symmetries(r, c) {
                let mut s = g.clone();
                s.sort_unstable();
                assert_eq!(s, (0..r * c).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    #[ignore = "several hours on one core"]
    fn six_by_six_open() {
        assert_eq!(count_open_numberings(6, 6), OPEN_NUMBERINGS_6X6);
    }

    #[test]
    #[ignore = "a few minutes in release mode"]
    fn six_by_six_cycles() {
        assert_eq!(count_directed_cycles(6, 6), DIRECTED_CYCLES_6X6);
    }
}
