//! Bipartite matching: maximum cardinality (generic rank) and
//! minimum-weight maximum-cardinality matchings.
//!
//! The generic rank of a {0, ⋆} pattern equals the maximum matching size
//! of its bipartite row/column graph, so these routines carry the rank
//! half of the observability test. Both solvers are deterministic: edges
//! are visited in sorted order and ties fall to the smaller index.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::VecDeque;

use crate::sysmodel::StructuralMatrix;

/// A bipartite graph between `n_left` row vertices and `n_right` column
/// vertices (both 1-based) with non-negative integer edge weights.
///
/// Parallel edges collapse to the cheapest one.
#[derive(Debug, Clone)]
pub struct Bipartite {
    n_left: usize,
    n_right: usize,
    /// `adj[l]` = sorted `(right, weight)` pairs (index 0 unused).
    adj: Vec<Vec<(usize, u64)>>,
}

impl Bipartite {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        Bipartite {
            n_left,
            n_right,
            adj: vec![Vec::new(); n_left + 1],
        }
    }

    /// The row/column graph of a pattern: rows on the left, columns on
    /// the right, one weight-0 edge per ⋆ entry.
    pub fn from_pattern(m: &StructuralMatrix) -> Self {
        let mut g = Bipartite::new(m.rows(), m.cols());
        for (i, j) in m.entries() {
            g.add_edge(i, j, 0);
        }
        g
    }

    /// Adds edge `(left, right)` with the given weight. Re-adding an
    /// existing edge keeps the smaller weight.
    ///
    /// # Panics
    /// Panics when an endpoint is out of range.
    pub fn add_edge(&mut self, left: usize, right: usize, weight: u64) {
        assert!(left >= 1 && left <= self.n_left, "left vertex out of range");
        assert!(right >= 1 && right <= self.n_right, "right vertex out of range");
        let list = &mut self.adj[left];
        match list.binary_search_by_key(&right, |&(r, _)| r) {
            Ok(pos) => list[pos].1 = list[pos].1.min(weight),
            Err(pos) => list.insert(pos, (right, weight)),
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum()
    }

    /// Sorted `(right, weight)` neighbours of a left vertex.
    pub fn neighbors(&self, left: usize) -> &[(usize, u64)] {
        &self.adj[left]
    }
}

/// A matching between the two sides of a [`Bipartite`] graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `left_to_right[l]` = column matched to row `l` (index 0 unused).
    pub left_to_right: Vec<Option<usize>>,
    /// `right_to_left[r]` = row matched to column `r` (index 0 unused).
    pub right_to_left: Vec<Option<usize>>,
    pub size: usize,
    /// Total weight of the matched edges.
    pub weight: u64,
}

impl Matching {
    /// Matched `(left, right)` pairs, ascending by left vertex.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.left_to_right
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect()
    }

    /// Columns left unmatched, ascending.
    pub fn unmatched_right(&self) -> Vec<usize> {
        self.right_to_left
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(r, l)| if l.is_none() { Some(r) } else { None })
            .collect()
    }
}

/// Maximum-cardinality matching (Hopcroft–Karp). Weights are ignored;
/// the reported `weight` is the sum over the matched edges.
pub fn max_matching(g: &Bipartite) -> Matching {
    let (nl, nr) = (g.n_left, g.n_right);
    let mut match_l = vec![0usize; nl + 1]; // 0 = unmatched
    let mut match_r = vec![0usize; nr + 1];
    let mut dist = vec![usize::MAX; nl + 1];

    loop {
        // BFS phase: layer left vertices by alternating distance from the
        // free ones.
        let mut queue = VecDeque::new();
        for l in 1..=nl {
            if match_l[l] == 0 {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut reachable_free_column = false;
        while let Some(l) = queue.pop_front() {
            for &(r, _) in g.neighbors(l) {
                let l2 = match_r[r];
                if l2 == 0 {
                    reachable_free_column = true;
                } else if dist[l2] == usize::MAX {
                    dist[l2] = dist[l] + 1;
                    queue.push_back(l2);
                }
            }
        }
        if !reachable_free_column {
            break;
        }
        // DFS phase: vertex-disjoint shortest augmenting paths.
        for l in 1..=nl {
            if match_l[l] == 0 {
                augment(g, l, &mut match_l, &mut match_r, &mut dist);
            }
        }
    }

    finish(g, &match_l, &match_r)
}

fn augment(
    g: &Bipartite,
    l: usize,
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &(r, _) in g.neighbors(l) {
        let l2 = match_r[r];
        if l2 == 0
            || (dist[l2] == dist[l].wrapping_add(1) && augment(g, l2, match_l, match_r, dist))
        {
            match_l[l] = r;
            match_r[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// Generic rank of a pattern: the maximum matching size of its
/// row/column graph.
pub fn grank(m: &StructuralMatrix) -> usize {
    max_matching(&Bipartite::from_pattern(m)).size
}

/// Among all maximum-cardinality matchings, returns one of minimum total
/// weight (successive shortest augmenting paths with dual potentials).
///
/// Deterministic: rows are sourced in ascending order and distance ties
/// resolve to the smaller column index.
pub fn min_weight_max_matching(g: &Bipartite) -> Matching {
    let (nl, nr) = (g.n_left, g.n_right);
    let mut match_l = vec![0usize; nl + 1];
    let mut match_r = vec![0usize; nr + 1];
    // Dual potentials keeping every reduced cost w - u[l] - v[r]
    // non-negative, with matched edges tight.
    let mut u = vec![0i64; nl + 1];
    let mut v = vec![0i64; nr + 1];

    let mut dist = vec![i64::MAX; nr + 1];
    let mut prev_row = vec![0usize; nr + 1];
    let mut settled = vec![false; nr + 1];

    loop {
        if (1..=nl).all(|l| match_l[l] != 0) {
            break;
        }
        for r in 1..=nr {
            dist[r] = i64::MAX;
            prev_row[r] = 0;
            settled[r] = false;
        }
        let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
        for l in 1..=nl {
            if match_l[l] != 0 {
                continue;
            }
            for &(r, w) in g.neighbors(l) {
                let rc = w as i64 - u[l] - v[r];
                debug_assert!(rc >= 0, "dual feasibility violated");
                if rc < dist[r] {
                    dist[r] = rc;
                    prev_row[r] = l;
                    heap.push(Reverse((rc, r)));
                }
            }
        }

        let mut sink = 0usize;
        while let Some(Reverse((d, r))) = heap.pop() {
            if settled[r] || d > dist[r] {
                continue;
            }
            settled[r] = true;
            if match_r[r] == 0 {
                sink = r;
                break;
            }
            // Continue through the matched row; its distance equals d
            // because the matched edge is tight.
            let l = match_r[r];
            for &(r2, w) in g.neighbors(l) {
                if settled[r2] {
                    continue;
                }
                let rc = w as i64 - u[l] - v[r2];
                debug_assert!(rc >= 0, "dual feasibility violated");
                let nd = d + rc;
                if nd < dist[r2] {
                    dist[r2] = nd;
                    prev_row[r2] = l;
                    heap.push(Reverse((nd, r2)));
                }
            }
        }
        if sink == 0 {
            break; // no augmenting path: matching is maximum
        }

        // Dual update (before flipping the matching): settled vertices
        // move by dist - dist[sink], everything else stays; this keeps
        // feasibility and tightness for the next round.
        let dstar = dist[sink];
        for r in 1..=nr {
            if settled[r] {
                let delta = dist[r] - dstar;
                v[r] += delta;
                if match_r[r] != 0 {
                    u[match_r[r]] -= delta;
                }
            }
        }
        for l in 1..=nl {
            if match_l[l] == 0 {
                u[l] += dstar;
            }
        }

        // Flip the matching along the augmenting path.
        let mut r = sink;
        loop {
            let l = prev_row[r];
            let old = match_l[l];
            match_l[l] = r;
            match_r[r] = l;
            if old == 0 {
                break;
            }
            r = old;
        }
    }

    finish(g, &match_l, &match_r)
}

fn finish(g: &Bipartite, match_l: &[usize], match_r: &[usize]) -> Matching {
    let mut weight = 0u64;
    let mut size = 0usize;
    let mut left_to_right = vec![None; match_l.len()];
    let mut right_to_left = vec![None; match_r.len()];
    for l in 1..match_l.len() {
        let r = match_l[l];
        if r == 0 {
            continue;
        }
        size += 1;
        left_to_right[l] = Some(r);
        right_to_left[r] = Some(l);
        let pos = g.adj[l]
            .binary_search_by_key(&r, |&(c, _)| c)
            .expect("matched edge exists");
        weight += g.adj[l][pos].1;
    }
    Matching {
        left_to_right,
        right_to_left,
        size,
        weight,
    }
}
