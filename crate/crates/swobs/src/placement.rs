//! Minimum dedicated-sensor placement.
//!
//! Three constructions, all returning placements that make the switched
//! system structurally observable with as few sensors as possible:
//!
//! * [`place_general`] works on any system. It appends one coverage row
//!   per sink component of the union digraph to the stacked mode
//!   patterns, prices those rows so a minimum-weight maximum matching
//!   uses as few of them as possible, and reads the placement off the
//!   matching: columns matched to coverage rows, columns no maximum
//!   matching can cover, and one representative for every sink component
//!   left untouched. The resulting cardinality is
//!   `n + p + (#sinks) - (max matching size)`, which is optimal.
//! * [`place_class1`] — systems whose disturbances are static (every
//!   `Q_k = 0`) and whose states all have self-loops somewhere across
//!   the modes. Routes disturbances along vertex-disjoint paths into
//!   distinct sink components ([`crate::flow`]); each covering path ends
//!   at a sensor, each non-covering disturbance is measured directly,
//!   and uncovered sinks get one sensor each.
//! * [`place_nodal`] — systems where every state *and* every disturbance
//!   has a self-loop somewhere across the modes. One sensor per sink
//!   component suffices.
//!
//! [`place`] dispatches by [`classify`], runs the chosen construction,
//! and re-verifies the result before returning it.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::flow::{build_class1_network, max_flow_disjoint_paths, FlowNode};
use crate::graph::{build_union_digraph, scc_decompose, target_sccs};
use crate::matching::{min_weight_max_matching, Bipartite};
use crate::sysmodel::{
    augment, vertex_name, AlgorithmTag, AugmentedSystem, Provenance, SensorPlacement,
    SwitchedSystem,
};
use crate::verify::check_structural_observability;

/// Structural class of a switched system, decided on the union patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemClass {
    /// No special structure; only the general construction applies.
    General,
    /// Static disturbances (`Q_k = 0` for every mode) and a self-loop on
    /// every state in the union.
    Class1,
    /// Self-loops on every state and every disturbance in the union.
    Class2,
}

/// Which construction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlgorithmChoice {
    /// Dispatch on [`classify`].
    #[default]
    Auto,
    General,
    Class1,
    Nodal,
}

/// Options for [`place`].
#[derive(Debug, Clone, Copy, Default)]
pub struct PlacementOptions {
    /// Prefer state sensors over disturbance sensors where the optimum
    /// cardinality allows a choice (general construction only).
    pub avoid_input_sensors: bool,
    pub algorithm: AlgorithmChoice,
}

fn union_a_diagonal_full(sys: &SwitchedSystem, aug: &AugmentedSystem) -> bool {
    (1..=sys.n).all(|i| aug.union.contains(sys.p + i, sys.p + i))
}

fn union_q_diagonal_full(sys: &SwitchedSystem, aug: &AugmentedSystem) -> bool {
    (1..=sys.p).all(|j| aug.union.contains(j, j))
}

/// The most specific class the system belongs to. Classification uses
/// the union across modes: a self-loop present in any one mode counts.
/// A system with no disturbances and all state self-loops satisfies
/// both special classes and reports as [`SystemClass::Class2`].
pub fn classify(sys: &SwitchedSystem) -> SystemClass {
    let aug = augment(sys);
    let a_diag = union_a_diagonal_full(sys, &aug);
    if a_diag && union_q_diagonal_full(sys, &aug) {
        SystemClass::Class2
    } else if a_diag && sys.modes.iter().all(|m| m.q.is_zero()) {
        SystemClass::Class1
    } else {
        SystemClass::General
    }
}

/// Sink components of the union digraph as sorted member lists,
/// ascending by smallest member.
fn sink_components(aug: &AugmentedSystem) -> Vec<Vec<usize>> {
    let g = build_union_digraph(aug);
    let scc = scc_decompose(&g);
    target_sccs(&scc)
        .into_iter()
        .map(|c| scc.members_of(c).to_vec())
        .collect()
}

/// Picks the sink component's sensor: its smallest state, or — for a
/// component made of disturbances only — its smallest member, with a
/// warning, since a disturbance sensor is then unavoidable.
fn pick_component_sensor(members: &[usize], p: usize, warnings: &mut Vec<String>) -> usize {
    match members.iter().copied().find(|&v| v > p) {
        Some(v) => v,
        None => {
            let v = members[0];
            warnings.push(format!(
                "sink component {{{}}} contains no state; measuring disturbance {}",
                members
                    .iter()
                    .map(|&m| vertex_name(m, p))
                    .collect::<Vec<_>>()
                    .join(", "),
                vertex_name(v, p),
            ));
            v
        }
    }
}

/// General minimum placement via a priced maximum matching.
///
/// With `avoid_input_sensors`, edges into state columns of the mode rows
/// get a small secondary weight, steering the matching toward covering
/// disturbance columns and thereby minimizing the number of disturbance
/// sensors — without ever changing the placement cardinality.
pub fn place_general(sys: &SwitchedSystem, avoid_input_sensors: bool) -> Result<SensorPlacement> {
    let aug = augment(sys);
    let nv = aug.num_vertices();
    let m = aug.modes.len();
    let targets = sink_components(&aug);
    let alpha = targets.len();

    // Stacked mode rows, then one coverage row per sink component. The
    // coverage-row price dominates any sum of secondary weights, so the
    // matching first maximizes cardinality with the fewest coverage
    // rows, then (if requested) the fewest state columns on mode rows.
    let coverage_price = (nv + 1) as u64;
    let mut g = Bipartite::new(m * nv + alpha, nv);
    for (k, pattern) in aug.modes.iter().enumerate() {
        for (i, j) in pattern.entries() {
            let secondary = u64::from(avoid_input_sensors && j > sys.p);
            g.add_edge(k * nv + i, j, secondary);
        }
    }
    for (s, members) in targets.iter().enumerate() {
        for &v in members {
            g.add_edge(m * nv + s + 1, v, coverage_price);
        }
    }

    let matching = min_weight_max_matching(&g);

    let mut warnings = Vec::new();
    let mut from_matching = BTreeSet::new();
    let mut covered_rows = vec![false; alpha + 1];
    for s in 1..=alpha {
        if let Some(col) = matching.left_to_right[m * nv + s] {
            from_matching.insert(col);
            covered_rows[s] = true;
        }
    }
    let from_unmatched_columns: BTreeSet<usize> =
        matching.unmatched_right().into_iter().collect();

    let mut from_uncovered_targets = BTreeSet::new();
    for (s, members) in targets.iter().enumerate() {
        if covered_rows[s + 1] {
            continue;
        }
        let already = members.iter().any(|v| {
            from_matching.contains(v) || from_unmatched_columns.contains(v)
        });
        if !already {
            from_uncovered_targets.insert(pick_component_sensor(members, sys.p, &mut warnings));
        }
    }

    let mut sensors = BTreeSet::new();
    sensors.extend(&from_matching);
    sensors.extend(&from_unmatched_columns);
    sensors.extend(&from_uncovered_targets);
    debug_assert_eq!(
        sensors.len(),
        nv + alpha - matching.size,
        "placement cardinality must equal n + p + #sinks - max matching"
    );

    Ok(SensorPlacement {
        n: sys.n,
        p: sys.p,
        sensors,
        provenance: Provenance {
            from_matching,
            from_unmatched_columns,
            from_uncovered_targets,
            from_class_rule: BTreeSet::new(),
        },
        algorithm: AlgorithmTag::General,
        warnings,
    })
}

/// True when the disjoint-routing bound below is tight. With one mode a
/// state row can absorb only one column of the rank condition, so every
/// unrouted disturbance really costs a sensor; with at most one
/// disturbance there is no routing contention at all. When several modes
/// meet several disturbances, each mode contributes its own copy of a
/// state's rows, and those copies can absorb several disturbance columns
/// at once — something vertex-disjoint paths cannot express.
fn routing_bound_is_tight(sys: &SwitchedSystem) -> bool {
    sys.modes.len() == 1 || sys.p <= 1
}

/// Placement for static-disturbance self-loop systems, via vertex-disjoint
/// disturbance-to-sink routing.
///
/// The result is always a valid placement. It is a *minimum* placement
/// when the system has a single mode or at most one disturbance; outside
/// that range the disjointness requirement can overcount (a warning is
/// attached), and [`place_general`] should be preferred.
pub fn place_class1(sys: &SwitchedSystem) -> Result<SensorPlacement> {
    let mut net = build_class1_network(sys)?;
    let targets = net.targets.clone();
    let routing = max_flow_disjoint_paths(&mut net);

    let mut from_class_rule = BTreeSet::new();
    for path in &routing.paths {
        // A covering path [.., v, a_i, sink] puts the sensor on v; a
        // direct path [source, d_j, sink] measures the disturbance.
        match path[path.len() - 2] {
            FlowNode::Ancillary(_) => match path[path.len() - 3] {
                FlowNode::Vertex(v) => {
                    from_class_rule.insert(v);
                }
                _ => unreachable!("ancillary fed by a vertex"),
            },
            FlowNode::Vertex(d) => {
                from_class_rule.insert(d);
            }
            _ => unreachable!("path ends with a vertex or ancillary before the sink"),
        }
    }

    let mut warnings = Vec::new();
    if !routing_bound_is_tight(sys) {
        warnings.push(
            "disjoint routing can exceed the minimum when several modes meet several \
             disturbances; the general construction is exact"
                .into(),
        );
    }
    let mut from_uncovered_targets = BTreeSet::new();
    for members in &targets {
        if !members.iter().any(|v| from_class_rule.contains(v)) {
            from_uncovered_targets.insert(pick_component_sensor(members, sys.p, &mut warnings));
        }
    }

    let mut sensors = BTreeSet::new();
    sensors.extend(&from_class_rule);
    sensors.extend(&from_uncovered_targets);

    Ok(SensorPlacement {
        n: sys.n,
        p: sys.p,
        sensors,
        provenance: Provenance {
            from_matching: BTreeSet::new(),
            from_unmatched_columns: BTreeSet::new(),
            from_uncovered_targets,
            from_class_rule,
        },
        algorithm: AlgorithmTag::Class1,
        warnings,
    })
}

/// Minimum placement for systems with self-loops on every state and
/// every disturbance: one sensor per sink component.
pub fn place_nodal(sys: &SwitchedSystem) -> Result<SensorPlacement> {
    let aug = augment(sys);
    if !union_a_diagonal_full(sys, &aug) {
        return Err(Error::WrongClass {
            algorithm: "nodal",
            reason: "some state has no self-loop in any mode".into(),
        });
    }
    if !union_q_diagonal_full(sys, &aug) {
        return Err(Error::WrongClass {
            algorithm: "nodal",
            reason: "some disturbance has no self-loop in any mode".into(),
        });
    }

    let mut warnings = Vec::new();
    let mut from_class_rule = BTreeSet::new();
    for members in &sink_components(&aug) {
        from_class_rule.insert(pick_component_sensor(members, sys.p, &mut warnings));
    }

    Ok(SensorPlacement {
        n: sys.n,
        p: sys.p,
        sensors: from_class_rule.clone(),
        provenance: Provenance {
            from_matching: BTreeSet::new(),
            from_unmatched_columns: BTreeSet::new(),
            from_uncovered_targets: BTreeSet::new(),
            from_class_rule,
        },
        algorithm: AlgorithmTag::Nodal,
        warnings,
    })
}

/// Computes a minimum placement with the requested (or auto-selected)
/// construction and re-verifies structural observability of the result.
/// A verification failure indicates a bug and surfaces as
/// [`Error::InternalVerificationFailure`].
pub fn place(sys: &SwitchedSystem, opts: &PlacementOptions) -> Result<SensorPlacement> {
    let placement = match opts.algorithm {
        AlgorithmChoice::General => place_general(sys, opts.avoid_input_sensors)?,
        AlgorithmChoice::Class1 => place_class1(sys)?,
        AlgorithmChoice::Nodal => place_nodal(sys)?,
        AlgorithmChoice::Auto => match classify(sys) {
            SystemClass::General => place_general(sys, opts.avoid_input_sensors)?,
            // Routing is only used where its bound is tight; elsewhere the
            // general construction keeps the minimality guarantee.
            SystemClass::Class1 if routing_bound_is_tight(sys) => place_class1(sys)?,
            SystemClass::Class1 => place_general(sys, opts.avoid_input_sensors)?,
            SystemClass::Class2 => place_nodal(sys)?,
        },
    };
    let verdict = check_structural_observability(sys, &placement)?;
    if !verdict.observable {
        return Err(Error::InternalVerificationFailure(format!(
            "computed placement {:?} fails verification: {}",
            placement.sensors.iter().collect::<Vec<_>>(),
            verdict.summary(),
        )));
    }
    Ok(placement)
}
