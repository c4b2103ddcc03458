//! Vertex-disjoint path routing for self-loop systems with static
//! disturbances.
//!
//! For systems whose disturbances have no dynamics (every `Q_k` zero)
//! and whose states all carry a self-loop somewhere across the modes,
//! minimum placements reduce to routing as many disturbances as
//! possible along vertex-disjoint paths into *distinct* sink components
//! of the union digraph. That routing is solved as a min-cost max-flow
//! problem:
//!
//! * a super-source feeds every input vertex (capacity 1);
//! * every augmented vertex is split into an in/out pair with unit
//!   capacity, enforcing vertex-disjointness;
//! * each sink component `i` gets an ancillary node `a_i` fed by its
//!   members, with a unit-capacity arc `a_i -> t` so one path per
//!   component counts;
//! * each input also has a cost-1 "direct" arc to the sink, so maximum
//!   flow always equals `p` and minimizing cost maximizes the number of
//!   component-covering paths.
//!
//! All other arcs cost 0. Unit capacity on `a_i -> t` (rather than
//! letting two paths share a component) is what makes the resulting
//! placement cardinality minimal: a second path into an already-covered
//! component would buy nothing.

use crate::error::{Error, Result};
use crate::graph::{build_union_digraph, scc_decompose, target_sccs};
use crate::sysmodel::{augment, SwitchedSystem};

/// A step of a routed path, in original vertex terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowNode {
    Source,
    /// Augmented vertex (input if `<= p`, state otherwise).
    Vertex(usize),
    /// Ancillary node of the `i`-th sink component (1-based).
    Ancillary(usize),
    Sink,
}

/// The routing result: one path per disturbance input, ascending by
/// input index. A path either traverses the digraph into an ancillary
/// (covering that sink component) or runs `Source -> input -> Sink`
/// directly (the disturbance could not reach an uncovered component).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointPaths {
    pub paths: Vec<Vec<FlowNode>>,
    /// Number of paths that cover a sink component.
    pub num_covering: usize,
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
    /// Capacity at creation; `orig - cap` is the flow carried.
    orig: i64,
}

/// The flow network for the class of self-loop systems with static
/// disturbances. Build with [`build_class1_network`], solve with
/// [`max_flow_disjoint_paths`].
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    /// `adj[node]` = arc ids leaving `node`, in creation order.
    adj: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
    /// Number of augmented vertices (n + p).
    num_vertices: usize,
    /// Sink components of the union digraph: sorted member lists,
    /// ascending by smallest member. `targets[i - 1]` feeds ancillary
    /// `a_i`.
    pub targets: Vec<Vec<usize>>,
    solved: bool,
}

impl FlowNetwork {
    fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc {
            to,
            cap,
            cost,
            orig: cap,
        });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            orig: 0,
        });
    }

    fn vertex_in(&self, v: usize) -> usize {
        2 * v - 1
    }

    fn vertex_out(&self, v: usize) -> usize {
        2 * v
    }

    fn ancillary(&self, i: usize) -> usize {
        2 * self.num_vertices + i
    }
}

/// Checks the class conditions and assembles the routing network.
///
/// Requirements: every mode's `Q` is zero, and the union of the `A`
/// patterns has a full diagonal (every state has a self-loop in at
/// least one mode). Returns [`Error::WrongClass`] otherwise.
pub fn build_class1_network(sys: &SwitchedSystem) -> Result<FlowNetwork> {
    for (idx, mode) in sys.modes.iter().enumerate() {
        if !mode.q.is_zero() {
            return Err(Error::WrongClass {
                algorithm: "class1",
                reason: format!(
                    "mode {}: disturbance dynamics Q is not zero",
                    idx + 1
                ),
            });
        }
    }
    let aug = augment(sys);
    let missing: Vec<usize> = (1..=sys.n)
        .filter(|&i| !aug.union.contains(sys.p + i, sys.p + i))
        .collect();
    if !missing.is_empty() {
        return Err(Error::WrongClass {
            algorithm: "class1",
            reason: format!("states without a self-loop in any mode: {missing:?}"),
        });
    }

    let g = build_union_digraph(&aug);
    let scc = scc_decompose(&g);
    let targets: Vec<Vec<usize>> = target_sccs(&scc)
        .into_iter()
        .map(|c| scc.members_of(c).to_vec())
        .collect();

    let nv = aug.num_vertices();
    let num_targets = targets.len();
    // Node layout: 0 = source, 2v-1/2v = split vertex v, then
    // ancillaries, then the sink.
    let node_count = 1 + 2 * nv + num_targets + 1;
    let mut net = FlowNetwork {
        arcs: Vec::new(),
        adj: vec![Vec::new(); node_count],
        source: 0,
        sink: node_count - 1,
        num_vertices: nv,
        targets,
        solved: false,
    };

    for v in 1..=nv {
        net.add_arc(net.vertex_in(v), net.vertex_out(v), 1, 0);
    }
    for j in 1..=sys.p {
        net.add_arc(net.source, net.vertex_in(j), 1, 0);
    }
    for (u, w) in g.edges() {
        if u != w {
            net.add_arc(net.vertex_out(u), net.vertex_in(w), 1, 0);
        }
    }
    for i in 1..=net.targets.len() {
        for m in 0..net.targets[i - 1].len() {
            let v = net.targets[i - 1][m];
            net.add_arc(net.vertex_out(v), net.ancillary(i), 1, 0);
        }
        net.add_arc(net.ancillary(i), net.sink, 1, 0);
    }
    for j in 1..=sys.p {
        net.add_arc(net.vertex_out(j), net.sink, 1, 1);
    }
    Ok(net)
}

/// Runs min-cost max-flow (successive shortest paths, Dijkstra with
/// potentials) and decomposes the flow into vertex-disjoint paths, one
/// per input in ascending input order.
///
/// # Panics
/// Panics if called twice on the same network.
pub fn max_flow_disjoint_paths(net: &mut FlowNetwork) -> DisjointPaths {
    assert!(!net.solved, "network already solved");
    net.solved = true;

    let nodes = net.adj.len();
    let mut potential = vec![0i64; nodes];
    loop {
        // Dijkstra over reduced costs from the super-source.
        let mut dist = vec![i64::MAX; nodes];
        let mut prev_arc = vec![usize::MAX; nodes];
        let mut settled = vec![false; nodes];
        let mut heap = std::collections::BinaryHeap::new();
        dist[net.source] = 0;
        heap.push(std::cmp::Reverse((0i64, net.source)));
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            if settled[u] || d > dist[u] {
                continue;
            }
            settled[u] = true;
            for &e in &net.adj[u] {
                let arc = &net.arcs[e];
                if arc.cap <= 0 || settled[arc.to] {
                    continue;
                }
                let rc = arc.cost + potential[u] - potential[arc.to];
                debug_assert!(rc >= 0, "negative reduced cost");
                let nd = d + rc;
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    prev_arc[arc.to] = e;
                    heap.push(std::cmp::Reverse((nd, arc.to)));
                }
            }
        }
        if dist[net.sink] == i64::MAX {
            break;
        }
        for v in 0..nodes {
            if dist[v] < i64::MAX {
                potential[v] += dist[v];
            }
        }
        // All arc capacities are 1, so each augmentation pushes one unit.
        let mut v = net.sink;
        while v != net.source {
            let e = prev_arc[v];
            net.arcs[e].cap -= 1;
            net.arcs[e ^ 1].cap += 1;
            v = net.arcs[e ^ 1].to;
        }
    }

    // Decompose: follow flow-carrying forward arcs from each source arc,
    // in creation order (ascending input index). Unit vertex capacities
    // force a unique continuation at every step.
    let mut flow: Vec<i64> = net.arcs.iter().map(|a| (a.orig - a.cap).max(0)).collect();
    let mut paths = Vec::new();
    let mut num_covering = 0;
    let source_arcs: Vec<usize> = net.adj[net.source].clone();
    for e0 in source_arcs {
        if e0 % 2 != 0 || flow[e0] == 0 {
            continue;
        }
        flow[e0] -= 1;
        let mut path = vec![FlowNode::Source];
        let mut node = net.arcs[e0].to;
        let mut covering = false;
        loop {
            if node == net.sink {
                path.push(FlowNode::Sink);
                break;
            } else if node <= 2 * net.num_vertices {
                if node % 2 == 1 {
                    path.push(FlowNode::Vertex((node + 1) / 2));
                }
            } else {
                path.push(FlowNode::Ancillary(node - 2 * net.num_vertices));
                covering = true;
            }
            let next = net.adj[node]
                .iter()
                .copied()
                .find(|&e| e % 2 == 0 && flow[e] > 0)
                .expect("flow conservation");
            flow[next] -= 1;
            node = net.arcs[next].to;
        }
        if covering {
            num_covering += 1;
        }
        paths.push(path);
    }
    DisjointPaths {
        paths,
        num_covering,
    }
}
