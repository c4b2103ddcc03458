//! Observability verification and independent cross-checks.
//!
//! [`check_structural_observability`] is the decision procedure used
//! everywhere else: a placement is accepted iff every vertex of the
//! union digraph reaches a measured vertex and the stacked mode
//! patterns together with the output rows have full generic column
//! rank. [`brute_force_min_placement`] searches all sensor subsets in
//! cardinality order and is the ground truth the fast constructions are
//! tested against. [`numeric_rank_probe`] samples random realizations
//! of the structural pattern and compares numeric rank to generic rank.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_union_digraph, vertices_missing_output_access, Digraph};
use crate::matching::grank;
use crate::sysmodel::{
    augment, vertex_name, AlgorithmTag, Provenance, SensorPlacement, StructuralMatrix,
    SwitchedSystem,
};

/// Outcome of a structural observability check.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub observable: bool,
    /// Every vertex reaches a measured vertex in the union digraph.
    pub condition_i: bool,
    /// Vertices with no path to any measured vertex, ascending.
    pub non_accessible: Vec<usize>,
    /// The stacked mode patterns plus output rows have full generic
    /// column rank.
    pub condition_ii: bool,
    pub rank_achieved: usize,
    pub rank_required: usize,
    /// Number of disturbances, for naming vertices in reports.
    pub p: usize,
}

impl Verdict {
    /// One-line human-readable explanation.
    pub fn summary(&self) -> String {
        if self.observable {
            return "structurally observable".into();
        }
        let mut reasons = Vec::new();
        if !self.condition_i {
            let names: Vec<String> = self
                .non_accessible
                .iter()
                .map(|&v| vertex_name(v, self.p))
                .collect();
            reasons.push(format!(
                "no path to any sensor from: {}",
                names.join(", ")
            ));
        }
        if !self.condition_ii {
            reasons.push(format!(
                "generic rank {} of required {}",
                self.rank_achieved, self.rank_required
            ));
        }
        format!("not structurally observable ({})", reasons.join("; "))
    }
}

fn check_dimensions(sys: &SwitchedSystem, placement: &SensorPlacement) -> Result<()> {
    if placement.n != sys.n || placement.p != sys.p {
        return Err(Error::InvalidPlacement(format!(
            "placement is for n={}, p={} but the system has n={}, p={}",
            placement.n, placement.p, sys.n, sys.p
        )));
    }
    Ok(())
}

/// The rank test matrix: all mode patterns stacked, then one row per
/// sensor.
fn stack_with_output(stacked: &StructuralMatrix, output: &StructuralMatrix) -> StructuralMatrix {
    StructuralMatrix::vstack(&[stacked, output])
}

fn verdict_on(
    digraph: &Digraph,
    stacked: &StructuralMatrix,
    placement: &SensorPlacement,
    required: usize,
) -> Verdict {
    let non_accessible = vertices_missing_output_access(digraph, &placement.sensors);
    let condition_i = non_accessible.is_empty();
    let rank_achieved = grank(&stack_with_output(stacked, &placement.output_pattern()));
    let condition_ii = rank_achieved == required;
    Verdict {
        observable: condition_i && condition_ii,
        condition_i,
        non_accessible,
        condition_ii,
        rank_achieved,
        rank_required: required,
        p: placement.p,
    }
}

/// Decides structural observability of the system under the placement.
pub fn check_structural_observability(
    sys: &SwitchedSystem,
    placement: &SensorPlacement,
) -> Result<Verdict> {
    check_dimensions(sys, placement)?;
    let aug = augment(sys);
    let digraph = build_union_digraph(&aug);
    let stacked = aug.stacked_modes();
    Ok(verdict_on(&digraph, &stacked, placement, aug.num_vertices()))
}

/// Exhaustive minimum placement, the oracle for the fast constructions.
///
/// Tries every subset of vertices in ascending cardinality and, within
/// a cardinality, in lexicographic order; returns the first subset that
/// passes [`check_structural_observability`], or `None` when no subset
/// of size `<= max_size` works. Refuses systems with more than `cap`
/// vertices ([`Error::CapExceeded`]), since the search is exponential.
pub fn brute_force_min_placement(
    sys: &SwitchedSystem,
    max_size: usize,
    cap: usize,
) -> Result<Option<SensorPlacement>> {
    let nv = sys.num_vertices();
    if nv > cap {
        return Err(Error::CapExceeded { size: nv, cap });
    }
    let aug = augment(sys);
    let digraph = build_union_digraph(&aug);
    let stacked = aug.stacked_modes();

    let mut found: Option<BTreeSet<usize>> = None;
    for k in 0..=max_size.min(nv) {
        for_each_subset(nv, k, &mut |subset| {
            let sensors: BTreeSet<usize> = subset.iter().copied().collect();
            let candidate = SensorPlacement {
                n: sys.n,
                p: sys.p,
                sensors,
                provenance: Provenance::default(),
                algorithm: AlgorithmTag::BruteForce,
                warnings: Vec::new(),
            };
            if verdict_on(&digraph, &stacked, &candidate, nv).observable {
                found = Some(candidate.sensors);
                true
            } else {
                false
            }
        });
        if found.is_some() {
            break;
        }
    }
    Ok(found.map(|sensors| SensorPlacement {
        n: sys.n,
        p: sys.p,
        sensors,
        provenance: Provenance::default(),
        algorithm: AlgorithmTag::BruteForce,
        warnings: Vec::new(),
    }))
}

/// Calls `visit` with every size-`k` subset of `1..=n` in lexicographic
/// order until one returns `true`.
fn for_each_subset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut subset: Vec<usize> = (1..=k).collect();
    loop {
        if visit(&subset) {
            return;
        }
        // Advance the rightmost index that still has room.
        let mut i = k;
        while i > 0 && subset[i - 1] == n - (k - i) {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        subset[i - 1] += 1;
        for j in i..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Result of sampling random numeric realizations of the structural
/// pattern.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    /// Generic rank of the stacked patterns with the output rows.
    pub structural_rank: usize,
    pub rank_required: usize,
    /// Numeric rank achieved per trial.
    pub per_trial: Vec<usize>,
    pub max_numeric_rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// The best sampled realization reaches the generic rank.
    pub agrees: bool,
}

/// Samples `trials` random realizations of the stacked pattern (every
/// structural entry drawn uniformly from `[-1, 1]` excluding a band
/// around zero) and reports the numeric rank of each, computed from
/// singular values with the relative threshold `tol`.
///
/// Generic rank is an upper bound on the numeric rank of any
/// realization and is attained for almost all of them, so with a
/// handful of trials `max_numeric_rank` should equal `structural_rank`.
pub fn numeric_rank_probe(
    sys: &SwitchedSystem,
    placement: &SensorPlacement,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ProbeReport> {
    check_dimensions(sys, placement)?;
    let aug = augment(sys);
    let pattern = stack_with_output(&aug.stacked_modes(), &placement.output_pattern());
    let structural_rank = grank(&pattern);
    let entries: Vec<(usize, usize)> = pattern.entries().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_trial = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut mat = DMatrix::<f64>::zeros(pattern.rows(), pattern.cols());
        for &(i, j) in &entries {
            // Keep magnitudes away from zero so no draw is accidentally
            // a structural zero.
            let v = loop {
                let v: f64 = rng.random_range(-1.0..=1.0);
                if v.abs() >= 0.05 {
                    break v;
                }
            };
            mat[(i - 1, j - 1)] = v;
        }
        per_trial.push(numeric_rank(&mat, tol));
    }
    let max_numeric_rank = per_trial.iter().copied().max().unwrap_or(0);
    Ok(ProbeReport {
        structural_rank,
        rank_required: aug.num_vertices(),
        per_trial,
        max_numeric_rank,
        trials,
        seed,
        tolerance: tol,
        agrees: max_numeric_rank == structural_rank,
    })
}

/// Rank by counting singular values above `tol` times the largest one.
fn numeric_rank(mat: &DMatrix<f64>, tol: f64) -> usize {
    let sv = mat.singular_values();
    let max = sv.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}
