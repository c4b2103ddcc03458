//! Directed-graph view of structural patterns: strongly connected
//! components, sink ("target") components, and output reachability.
//!
//! A square pattern `M` induces the digraph with an edge `j -> i` for
//! every ⋆ entry `(i, j)`: column indexes the source vertex, row the
//! destination. Vertices are 1-based, matching the pattern coordinates.

use std::collections::BTreeSet;

use crate::sysmodel::{AugmentedSystem, StructuralMatrix};

/// A digraph over vertices `1..=n` with sorted adjacency lists.
#[derive(Debug, Clone)]
pub struct Digraph {
    n: usize,
    /// `succ[v]` = sorted successors of `v` (index 0 unused).
    succ: Vec<Vec<usize>>,
    /// `pred[v]` = sorted predecessors of `v` (index 0 unused).
    pred: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds the digraph of a square pattern: edge `j -> i` per ⋆ entry
    /// `(i, j)`. Self-loops are kept.
    ///
    /// # Panics
    /// Panics if the pattern is not square.
    pub fn from_pattern(m: &StructuralMatrix) -> Self {
        assert_eq!(m.rows(), m.cols(), "digraph of a non-square pattern");
        let n = m.rows();
        let mut succ = vec![Vec::new(); n + 1];
        let mut pred = vec![Vec::new(); n + 1];
        for (i, j) in m.entries() {
            succ[j].push(i);
            pred[i].push(j);
        }
        // Entries iterate row-major, so predecessor lists arrive sorted;
        // successor lists need sorting.
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        Digraph { n, succ, pred }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Sorted successors of `v`.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    /// Sorted predecessors of `v`.
    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    /// All edges `(source, destination)` in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 1..=self.n {
            for &w in &self.succ[v] {
                out.push((v, w));
            }
        }
        out
    }
}

/// The union digraph of an augmented system.
pub fn build_union_digraph(aug: &AugmentedSystem) -> Digraph {
    Digraph::from_pattern(&aug.union)
}

/// Strongly connected components of a digraph, with the component DAG.
///
/// Components are numbered `1..=num_components` in ascending order of
/// their smallest member, which makes every derived quantity
/// deterministic.
#[derive(Debug, Clone)]
pub struct SccDecomposition {
    /// `component_of[v]` = component id of vertex `v` (index 0 unused).
    pub component_of: Vec<usize>,
    /// `members[c - 1]` = sorted vertices of component `c`.
    pub members: Vec<Vec<usize>>,
    /// `condensation[c - 1]` = sorted ids of components reachable from
    /// `c` by a single edge (intra-component edges excluded).
    pub condensation: Vec<Vec<usize>>,
}

impl SccDecomposition {
    pub fn num_components(&self) -> usize {
        self.members.len()
    }

    /// Sorted members of component `c`.
    pub fn members_of(&self, c: usize) -> &[usize] {
        &self.members[c - 1]
    }

    /// True when component `c` has no edge leaving it ("target"
    /// component: a sink of the condensation DAG).
    pub fn is_target(&self, c: usize) -> bool {
        self.condensation[c - 1].is_empty()
    }
}

/// Tarjan's algorithm, implemented iteratively so deep graphs cannot
/// overflow the call stack, followed by canonical renumbering.
pub fn scc_decompose(g: &Digraph) -> SccDecomposition {
    let n = g.num_vertices();
    // Tarjan bookkeeping; 0 in `index` means "unvisited".
    let mut index = vec![0usize; n + 1];
    let mut low = vec![0usize; n + 1];
    let mut on_stack = vec![false; n + 1];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 1usize;
    let mut raw_component = vec![0usize; n + 1]; // discovery-order ids
    let mut raw_count = 0usize;

    // Explicit DFS frames: (vertex, position in its successor list).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 1..=n {
        if index[root] != 0 {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, pos)) = frames.last_mut() {
            if let Some(&w) = g.successors(v).get(pos) {
                frames.last_mut().expect("frame exists").1 += 1;
                if index[w] == 0 {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if low[v] == index[v] {
                    raw_count += 1;
                    loop {
                        let w = stack.pop().expect("tarjan stack non-empty");
                        on_stack[w] = false;
                        raw_component[w] = raw_count;
                        if w == v {
                            break;
                        }
                    }
                }
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }

    // Renumber components by ascending smallest member.
    let mut min_member = vec![usize::MAX; raw_count + 1];
    for v in 1..=n {
        let c = raw_component[v];
        min_member[c] = min_member[c].min(v);
    }
    let mut order: Vec<usize> = (1..=raw_count).collect();
    order.sort_unstable_by_key(|&c| min_member[c]);
    let mut renumber = vec![0usize; raw_count + 1];
    for (new_id0, &old) in order.iter().enumerate() {
        renumber[old] = new_id0 + 1;
    }

    let mut component_of = vec![0usize; n + 1];
    let mut members = vec![Vec::new(); raw_count];
    for v in 1..=n {
        let c = renumber[raw_component[v]];
        component_of[v] = c;
        members[c - 1].push(v);
    }
    // Vertices are visited ascending, so each member list is sorted.

    let mut condensation: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); raw_count];
    for (v, w) in g.edges() {
        let (cv, cw) = (component_of[v], component_of[w]);
        if cv != cw {
            condensation[cv - 1].insert(cw);
        }
    }
    let condensation = condensation
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();

    SccDecomposition {
        component_of,
        members,
        condensation,
    }
}

/// Ids of the target (sink) components, ascending.
pub fn target_sccs(scc: &SccDecomposition) -> Vec<usize> {
    (1..=scc.num_components())
        .filter(|&c| scc.is_target(c))
        .collect()
}

/// Vertices from which no measured vertex can be reached, ascending;
/// empty means every vertex accesses an output. Computed by a reverse
/// breadth-first search from the measured set.
pub fn vertices_missing_output_access(g: &Digraph, measured: &BTreeSet<usize>) -> Vec<usize> {
    let n = g.num_vertices();
    let mut reached = vec![false; n + 1];
    let mut queue: Vec<usize> = Vec::new();
    for &v in measured {
        assert!(v >= 1 && v <= n, "measured vertex {v} outside 1..={n}");
        if !reached[v] {
            reached[v] = true;
            queue.push(v);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &u in g.predecessors(v) {
            if !reached[u] {
                reached[u] = true;
                queue.push(u);
            }
        }
    }
    (1..=n).filter(|&v| !reached[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::{augment, Mode, StructuralMatrix, SwitchedSystem};

    fn chain_fixture() -> SwitchedSystem {
        let a1 = StructuralMatrix::from_entries(5, 5, [(3, 1), (2, 2), (4, 3)]).unwrap();
        let a2 = StructuralMatrix::from_entries(5, 5, [(3, 2), (5, 3)]).unwrap();
        let f = StructuralMatrix::from_entries(5, 1, [(2, 1)]).unwrap();
        let q = StructuralMatrix::zero(1, 1);
        SwitchedSystem::new(
            5,
            1,
            vec![
                Mode {
                    a: a1,
                    f: f.clone(),
                    q: q.clone(),
                },
                Mode { a: a2, f, q },
            ],
        )
    }

    #[test]
    fn edges_follow_column_to_row() {
        let m = StructuralMatrix::from_entries(3, 3, [(2, 1), (3, 3)]).unwrap();
        let g = Digraph::from_pattern(&m);
        assert_eq!(g.edges(), vec![(1, 2), (3, 3)]);
        assert_eq!(g.successors(1), &[2]);
        assert_eq!(g.predecessors(2), &[1]);
        assert_eq!(g.successors(3), &[3]); // self-loop kept
    }

    #[test]
    fn chain_fixture_has_two_sinks() {
        let aug = augment(&chain_fixture());
        let g = build_union_digraph(&aug);
        let scc = scc_decompose(&g);
        // All six components are singletons; the renumbering makes
        // component ids coincide with vertex ids.
        assert_eq!(scc.num_components(), 6);
        for v in 1..=6 {
            assert_eq!(scc.component_of[v], v);
            assert_eq!(scc.members_of(v), &[v]);
        }
        assert_eq!(target_sccs(&scc), vec![5, 6]);
    }

    #[test]
    fn cycle_collapses_to_one_component() {
        // 1 -> 2 -> 3 -> 1 plus a tail 3 -> 4.
        let m =
            StructuralMatrix::from_entries(4, 4, [(2, 1), (3, 2), (1, 3), (4, 3)]).unwrap();
        let g = Digraph::from_pattern(&m);
        let scc = scc_decompose(&g);
        assert_eq!(scc.num_components(), 2);
        assert_eq!(scc.members_of(1), &[1, 2, 3]);
        assert_eq!(scc.members_of(2), &[4]);
        assert_eq!(scc.condensation[0], vec![2]);
        assert!(scc.is_target(2));
        assert!(!scc.is_target(1));
        assert_eq!(target_sccs(&scc), vec![2]);
    }

    #[test]
    fn isolated_vertex_is_its_own_target() {
        let m = StructuralMatrix::zero(3, 3);
        let g = Digraph::from_pattern(&m);
        let scc = scc_decompose(&g);
        assert_eq!(scc.num_components(), 3);
        assert_eq!(target_sccs(&scc), vec![1, 2, 3]);
    }

    #[test]
    fn self_loop_singleton_is_a_target() {
        // A self-loop is an intra-component edge, not an outgoing one.
        let m = StructuralMatrix::from_entries(2, 2, [(1, 1), (2, 1)]).unwrap();
        let g = Digraph::from_pattern(&m);
        let scc = scc_decompose(&g);
        assert_eq!(target_sccs(&scc), vec![2]);
    }

    #[test]
    fn component_ids_ascend_with_smallest_member() {
        // 4 -> 3 -> 2 -> 1: discovery order differs from vertex order.
        let m = StructuralMatrix::from_entries(4, 4, [(3, 4), (2, 3), (1, 2)]).unwrap();
        let g = Digraph::from_pattern(&m);
        let scc = scc_decompose(&g);
        for v in 1..=4 {
            assert_eq!(scc.component_of[v], v);
        }
        assert_eq!(target_sccs(&scc), vec![1]);
    }

    #[test]
    fn two_interlocked_cycles_condense_properly() {
        // {1,2} -> {3,4} with both pairs cyclic.
        let m = StructuralMatrix::from_entries(
            4,
            4,
            [(2, 1), (1, 2), (3, 2), (4, 3), (3, 4)],
        )
        .unwrap();
        let g = Digraph::from_pattern(&m);
        let scc = scc_decompose(&g);
        assert_eq!(scc.num_components(), 2);
        assert_eq!(scc.members_of(1), &[1, 2]);
        assert_eq!(scc.members_of(2), &[3, 4]);
        assert_eq!(target_sccs(&scc), vec![2]);
    }

    #[test]
    fn reverse_reachability_reports_blind_vertices() {
        let aug = augment(&chain_fixture());
        let g = build_union_digraph(&aug);
        // Measuring both sinks covers everything.
        let all = BTreeSet::from([5, 6]);
        assert!(vertices_missing_output_access(&g, &all).is_empty());
        // Measuring only vertex 5 leaves vertex 6 blind.
        let partial = BTreeSet::from([5]);
        assert_eq!(vertices_missing_output_access(&g, &partial), vec![6]);
        // Measuring a source covers nothing else.
        let source = BTreeSet::from([1]);
        assert_eq!(
            vertices_missing_output_access(&g, &source),
            vec![2, 3, 4, 5, 6]
        );
        // No sensors: every vertex is blind.
        assert_eq!(
            vertices_missing_output_access(&g, &BTreeSet::new()),
            vec![1, 2, 3, 4, 5, 6]
        );
    }

    #[test]
    fn deep_path_does_not_overflow_the_stack() {
        // A 50k-vertex path exercises the iterative DFS.
        let n = 50_000;
        let mut m = StructuralMatrix::zero(n, n);
        for v in 1..n {
            m.insert(v + 1, v).unwrap();
        }
        let g = Digraph::from_pattern(&m);
        let scc = scc_decompose(&g);
        assert_eq!(scc.num_components(), n);
        assert_eq!(target_sccs(&scc), vec![n]);
        let measured = BTreeSet::from([n]);
        assert!(vertices_missing_output_access(&g, &measured).is_empty());
    }
}
