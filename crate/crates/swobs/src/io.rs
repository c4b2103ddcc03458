//! JSON documents for systems and placements, and DOT export.
//!
//! Systems are described by a JSON document listing the ⋆ coordinates
//! of each mode's `A`, `F`, `Q` patterns as `[row, col]` pairs
//! (1-based). Placements round-trip through a JSON document that also
//! carries redundant views (`j_d`, `j_x_states`, `cardinality`), which
//! are cross-checked on read so a hand-edited file cannot smuggle in an
//! inconsistent placement.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_union_digraph, scc_decompose, target_sccs};
use crate::sysmodel::{
    augment, vertex_name, AlgorithmTag, Mode, Provenance, SensorPlacement, StructuralMatrix,
    SwitchedSystem,
};

/// On-disk form of one mode: ⋆ coordinates of each pattern.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDocument {
    #[serde(rename = "A")]
    pub a: Vec<(usize, usize)>,
    #[serde(rename = "F")]
    pub f: Vec<(usize, usize)>,
    #[serde(rename = "Q")]
    pub q: Vec<(usize, usize)>,
}

/// Optional descriptive fields; extra keys are tolerated.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_labels: Option<Vec<String>>,
}

/// On-disk form of a switched system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub n: usize,
    pub p: usize,
    /// Number of modes; must equal `modes.len()`.
    pub m: usize,
    pub modes: Vec<ModeDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

pub fn parse_system_document(text: &str) -> Result<SystemDocument> {
    Ok(serde_json::from_str(text)?)
}

fn pattern(
    mode: usize,
    name: &str,
    rows: usize,
    cols: usize,
    entries: &[(usize, usize)],
) -> Result<StructuralMatrix> {
    StructuralMatrix::from_entries(rows, cols, entries.iter().copied()).map_err(|e| {
        Error::InvalidDocument(format!("mode {mode}, matrix {name}: {e}"))
    })
}

/// Builds the in-memory system, checking the document's declared mode
/// count and coordinate ranges. Run
/// [`SwitchedSystem::validate`] afterwards for the semantic checks.
pub fn system_from_document(doc: &SystemDocument) -> Result<SwitchedSystem> {
    if doc.m != doc.modes.len() {
        return Err(Error::InvalidDocument(format!(
            "document declares m={} but lists {} modes",
            doc.m,
            doc.modes.len()
        )));
    }
    let mut modes = Vec::with_capacity(doc.modes.len());
    for (idx, md) in doc.modes.iter().enumerate() {
        let k = idx + 1;
        modes.push(Mode {
            a: pattern(k, "A", doc.n, doc.n, &md.a)?,
            f: pattern(k, "F", doc.n, doc.p, &md.f)?,
            q: pattern(k, "Q", doc.p, doc.p, &md.q)?,
        });
    }
    Ok(SwitchedSystem::new(doc.n, doc.p, modes))
}

/// Document form of an in-memory system (metadata passed through).
pub fn document_from_system(sys: &SwitchedSystem, metadata: Option<Metadata>) -> SystemDocument {
    SystemDocument {
        n: sys.n,
        p: sys.p,
        m: sys.modes.len(),
        modes: sys
            .modes
            .iter()
            .map(|m| ModeDocument {
                a: m.a.entries().collect(),
                f: m.f.entries().collect(),
                q: m.q.entries().collect(),
            })
            .collect(),
        metadata,
    }
}

/// Parses and constructs a system from JSON text.
pub fn system_from_json(text: &str) -> Result<SwitchedSystem> {
    system_from_document(&parse_system_document(text)?)
}

/// Reads a system document from a file.
pub fn read_system(path: &Path) -> Result<SwitchedSystem> {
    system_from_json(&fs::read_to_string(path)?)
}

/// Writes a system document as pretty JSON.
pub fn write_system(path: &Path, sys: &SwitchedSystem, metadata: Option<Metadata>) -> Result<()> {
    let doc = document_from_system(sys, metadata);
    fs::write(path, to_pretty_json(&doc)?)?;
    Ok(())
}

/// On-disk form of a placement's provenance.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDocument {
    pub from_matching: Vec<usize>,
    pub from_unmatched_columns: Vec<usize>,
    pub from_uncovered_targets: Vec<usize>,
    pub from_class_rule: Vec<usize>,
}

/// On-disk form of a sensor placement. `j` lists measured augmented
/// vertices; `j_d` and `j_x_states` are the disturbance and state views
/// of the same set (states in state numbering).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDocument {
    pub n: usize,
    pub p: usize,
    pub j: Vec<usize>,
    pub j_d: Vec<usize>,
    pub j_x_states: Vec<usize>,
    pub cardinality: usize,
    pub algorithm: String,
    pub provenance: ProvenanceDocument,
    pub warnings: Vec<String>,
}

pub fn document_from_placement(placement: &SensorPlacement) -> PlacementDocument {
    PlacementDocument {
        n: placement.n,
        p: placement.p,
        j: placement.sensors.iter().copied().collect(),
        j_d: placement.input_sensors().into_iter().collect(),
        j_x_states: placement.state_sensors().into_iter().collect(),
        cardinality: placement.cardinality(),
        algorithm: placement.algorithm.as_str().to_string(),
        provenance: ProvenanceDocument {
            from_matching: placement.provenance.from_matching.iter().copied().collect(),
            from_unmatched_columns: placement
                .provenance
                .from_unmatched_columns
                .iter()
                .copied()
                .collect(),
            from_uncovered_targets: placement
                .provenance
                .from_uncovered_targets
                .iter()
                .copied()
                .collect(),
            from_class_rule: placement.provenance.from_class_rule.iter().copied().collect(),
        },
        warnings: placement.warnings.clone(),
    }
}

/// Reconstructs a placement, cross-checking every redundant field.
pub fn placement_from_document(doc: &PlacementDocument) -> Result<SensorPlacement> {
    let mut placement = SensorPlacement::manual(doc.n, doc.p, doc.j.iter().copied())
        .map_err(|e| Error::InvalidDocument(format!("placement sensors: {e}")))?;
    if doc.j.len() != placement.sensors.len() {
        return Err(Error::InvalidDocument(
            "placement lists a sensor twice".into(),
        ));
    }
    if doc.cardinality != placement.sensors.len() {
        return Err(Error::InvalidDocument(format!(
            "cardinality {} does not match {} listed sensors",
            doc.cardinality,
            placement.sensors.len()
        )));
    }
    let j_d: Vec<usize> = placement.input_sensors().into_iter().collect();
    if doc.j_d != j_d {
        return Err(Error::InvalidDocument(format!(
            "j_d {:?} does not match the disturbance sensors {:?} of j",
            doc.j_d, j_d
        )));
    }
    let j_x: Vec<usize> = placement.state_sensors().into_iter().collect();
    if doc.j_x_states != j_x {
        return Err(Error::InvalidDocument(format!(
            "j_x_states {:?} does not match the state sensors {:?} of j",
            doc.j_x_states, j_x
        )));
    }
    placement.algorithm = AlgorithmTag::from_str(&doc.algorithm).ok_or_else(|| {
        Error::InvalidDocument(format!("unknown algorithm tag {:?}", doc.algorithm))
    })?;

    let parts = [
        &doc.provenance.from_matching,
        &doc.provenance.from_unmatched_columns,
        &doc.provenance.from_uncovered_targets,
        &doc.provenance.from_class_rule,
    ];
    let mut seen = BTreeSet::new();
    for part in parts {
        for &v in part.iter() {
            if !placement.sensors.contains(&v) {
                return Err(Error::InvalidDocument(format!(
                    "provenance lists vertex {v} which is not a sensor"
                )));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidDocument(format!(
                    "provenance lists vertex {v} in two stages"
                )));
            }
        }
    }
    placement.provenance = Provenance {
        from_matching: doc.provenance.from_matching.iter().copied().collect(),
        from_unmatched_columns: doc.provenance.from_unmatched_columns.iter().copied().collect(),
        from_uncovered_targets: doc.provenance.from_uncovered_targets.iter().copied().collect(),
        from_class_rule: doc.provenance.from_class_rule.iter().copied().collect(),
    };
    placement.warnings = doc.warnings.clone();
    Ok(placement)
}

pub fn parse_placement(text: &str) -> Result<SensorPlacement> {
    placement_from_document(&serde_json::from_str(text)?)
}

pub fn read_placement(path: &Path) -> Result<SensorPlacement> {
    parse_placement(&fs::read_to_string(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn placement_to_json(placement: &SensorPlacement) -> Result<String> {
    to_pretty_json(&document_from_placement(placement))
}

pub fn write_placement(path: &Path, placement: &SensorPlacement) -> Result<()> {
    fs::write(path, placement_to_json(placement)?)?;
    Ok(())
}

/// Renders the union digraph in DOT, one cluster per strongly connected
/// component, sink components drawn bold red and marked in their label.
/// Disturbance vertices are diamonds, states ellipses; with a placement,
/// each sensor becomes a box `y_k` fed by its measured vertex. Output is
/// deterministic byte-for-byte for a given system and placement.
pub fn export_dot(sys: &SwitchedSystem, placement: Option<&SensorPlacement>) -> Result<String> {
    if let Some(pl) = placement {
        if pl.n != sys.n || pl.p != sys.p {
            return Err(Error::InvalidPlacement(format!(
                "placement is for n={}, p={} but the system has n={}, p={}",
                pl.n, pl.p, sys.n, sys.p
            )));
        }
    }
    let aug = augment(sys);
    let g = build_union_digraph(&aug);
    let scc = scc_decompose(&g);
    let sinks: BTreeSet<usize> = target_sccs(&scc).into_iter().collect();

    let mut out = String::new();
    out.push_str("digraph switched_system {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    for c in 1..=scc.num_components() {
        let sink = sinks.contains(&c);
        let _ = writeln!(out, "  subgraph cluster_{c} {{");
        let _ = writeln!(
            out,
            "    label=\"C{c}{}\";",
            if sink { " (sink)" } else { "" }
        );
        if sink {
            out.push_str("    color=red;\n    penwidth=2;\n");
        } else {
            out.push_str("    color=gray;\n");
        }
        for &v in scc.members_of(c) {
            let shape = if v <= sys.p { "diamond" } else { "ellipse" };
            let _ = writeln!(out, "    {} [shape={shape}];", vertex_name(v, sys.p));
        }
        out.push_str("  }\n");
    }
    for v in 1..=g.num_vertices() {
        for &w in g.successors(v) {
            let _ = writeln!(
                out,
                "  {} -> {};",
                vertex_name(v, sys.p),
                vertex_name(w, sys.p)
            );
        }
    }
    if let Some(pl) = placement {
        for (k, &v) in pl.sensors.iter().enumerate() {
            let y = k + 1;
            let _ = writeln!(
                out,
                "  y{y} [shape=box, style=filled, fillcolor=lightyellow];"
            );
            let _ = writeln!(out, "  {} -> y{y};", vertex_name(v, sys.p));
        }
    }
    out.push_str("}\n");
    Ok(out)
}
