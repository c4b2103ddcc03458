//! Sparsity-pattern data model: structural matrices, switched systems with
//! unknown inputs, augmented patterns, and sensor placements.
//!
//! Coordinates are 1-based everywhere. An augmented system over `n` states
//! and `p` unknown inputs has `n + p` vertices; vertex `i <= p` is the
//! input `d_i` and vertex `i > p` is the state `x_{i-p}`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A {0, ⋆} pattern matrix stored as the sorted set of 1-based
/// `(row, col)` coordinates of its ⋆ entries.
///
/// Either dimension may be zero (a system without inputs has `n x 0`
/// disturbance patterns), in which case the entry set is necessarily
/// empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeSet<(usize, usize)>,
}

impl StructuralMatrix {
    /// The all-zero pattern of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        StructuralMatrix {
            rows,
            cols,
            entries: BTreeSet::new(),
        }
    }

    /// Builds a pattern from an entry list, rejecting out-of-range
    /// coordinates. Duplicates collapse silently.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = StructuralMatrix::zero(rows, cols);
        for (i, j) in entries {
            m.insert(i, j)?;
        }
        Ok(m)
    }

    /// Marks entry `(i, j)` as ⋆.
    pub fn insert(&mut self, i: usize, j: usize) -> Result<()> {
        if i == 0 || j == 0 || i > self.rows || j > self.cols {
            return Err(Error::CoordinateOutOfRange {
                matrix: format!("{}x{} pattern", self.rows, self.cols),
                row: i,
                col: j,
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.entries.insert((i, j));
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True when entry `(i, j)` is ⋆.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.entries.contains(&(i, j))
    }

    /// Number of ⋆ entries.
    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Row-major iteration over the ⋆ coordinates.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when column `j` holds no ⋆ entry.
    pub fn column_is_zero(&self, j: usize) -> bool {
        !self.entries.iter().any(|&(_, c)| c == j)
    }

    /// True when every diagonal entry `(i, i)` of a square pattern is ⋆.
    /// Vacuously true for the 0 x 0 pattern.
    pub fn has_full_diagonal(&self) -> bool {
        debug_assert_eq!(self.rows, self.cols, "diagonal of a non-square pattern");
        (1..=self.rows).all(|i| self.contains(i, i))
    }

    /// Entry-wise OR of two same-shaped patterns.
    ///
    /// # Panics
    /// Panics if the shapes differ; unioning differently shaped patterns
    /// is a programming error, not an input error.
    pub fn union(&self, other: &StructuralMatrix) -> StructuralMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "union of differently shaped patterns"
        );
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().copied());
        StructuralMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Stacks patterns vertically, top to bottom.
    ///
    /// # Panics
    /// Panics if the column counts differ.
    pub fn vstack(parts: &[&StructuralMatrix]) -> StructuralMatrix {
        let cols = parts.first().map_or(0, |m| m.cols);
        let mut entries = BTreeSet::new();
        let mut offset = 0;
        for part in parts {
            assert_eq!(part.cols, cols, "vstack with differing column counts");
            entries.extend(part.entries.iter().map(|&(i, j)| (i + offset, j)));
            offset += part.rows;
        }
        StructuralMatrix {
            rows: offset,
            cols,
            entries,
        }
    }
}

impl fmt::Display for StructuralMatrix {
    /// Renders the pattern as a grid of `.` and `*`, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                f.write_str(if self.contains(i, j) { "*" } else { "." })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

/// One mode's dynamics patterns: state matrix `A` (n x n), disturbance
/// injection `F` (n x p), and disturbance dynamics `Q` (p x p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mode {
    pub a: StructuralMatrix,
    pub f: StructuralMatrix,
    pub q: StructuralMatrix,
}

/// A switched system: `n` states, `p` unknown inputs, and one
/// [`Mode`] per switching mode. The output equation is shared by all
/// modes and is supplied separately as a [`SensorPlacement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchedSystem {
    pub n: usize,
    pub p: usize,
    pub modes: Vec<Mode>,
}

impl SwitchedSystem {
    pub fn new(n: usize, p: usize, modes: Vec<Mode>) -> Self {
        SwitchedSystem { n, p, modes }
    }

    /// Number of modes.
    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    /// Total number of augmented vertices, `n + p`.
    pub fn num_vertices(&self) -> usize {
        self.n + self.p
    }

    /// Checks well-formedness: `n >= 1`, at least one mode, each mode's
    /// matrices correctly shaped, and every disturbance column nonzero in
    /// at least one mode's `F` (a disturbance that never enters the
    /// dynamics cannot be distinguished from nothing; pass
    /// `allow_zero_f_columns` to keep such inputs anyway).
    pub fn validate(&self, allow_zero_f_columns: bool) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSystem("n must be at least 1".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidSystem("at least one mode is required".into()));
        }
        for (idx, mode) in self.modes.iter().enumerate() {
            let k = idx + 1;
            let check = |name: &str, m: &StructuralMatrix, r: usize, c: usize| -> Result<()> {
                if (m.rows(), m.cols()) != (r, c) {
                    return Err(Error::DimensionMismatch {
                        mode: k,
                        detail: format!(
                            "{name} is {}x{}, expected {}x{}",
                            m.rows(),
                            m.cols(),
                            r,
                            c
                        ),
                    });
                }
                Ok(())
            };
            check("A", &mode.a, self.n, self.n)?;
            check("F", &mode.f, self.n, self.p)?;
            check("Q", &mode.q, self.p, self.p)?;
        }
        if !allow_zero_f_columns {
            for j in 1..=self.p {
                if self.modes.iter().all(|m| m.f.column_is_zero(j)) {
                    return Err(Error::ZeroDisturbanceColumn(j));
                }
            }
        }
        Ok(())
    }
}

/// Human-oriented name of augmented vertex `i`: `d{i}` for inputs,
/// `x{i - p}` for states.
pub fn vertex_name(i: usize, p: usize) -> String {
    if i <= p {
        format!("d{i}")
    } else {
        format!("x{}", i - p)
    }
}

/// The augmented view of a switched system: per mode, the
/// `(n + p) x (n + p)` block pattern
///
/// ```text
///     [ Q_k   0  ]
///     [ F_k  A_k ]
/// ```
///
/// over the vertex order `d_1 .. d_p, x_1 .. x_n`, plus the entry-wise
/// union of those blocks across modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedSystem {
    pub n: usize,
    pub p: usize,
    /// One augmented pattern per mode, in mode order.
    pub modes: Vec<StructuralMatrix>,
    /// Entry-wise union of `modes`.
    pub union: StructuralMatrix,
}

impl AugmentedSystem {
    /// Number of augmented vertices, `n + p`.
    pub fn num_vertices(&self) -> usize {
        self.n + self.p
    }

    /// All mode patterns stacked vertically (an `m(n+p) x (n+p)`
    /// pattern), the left half of the rank test.
    pub fn stacked_modes(&self) -> StructuralMatrix {
        let refs: Vec<&StructuralMatrix> = self.modes.iter().collect();
        StructuralMatrix::vstack(&refs)
    }
}

/// Builds the augmented patterns of a switched system.
///
/// # Panics
/// Panics on mis-shaped mode matrices; call
/// [`SwitchedSystem::validate`] first.
pub fn augment(sys: &SwitchedSystem) -> AugmentedSystem {
    let (n, p) = (sys.n, sys.p);
    let size = n + p;
    let mut aug_modes = Vec::with_capacity(sys.modes.len());
    for mode in &sys.modes {
        assert_eq!((mode.a.rows(), mode.a.cols()), (n, n), "A shape");
        assert_eq!((mode.f.rows(), mode.f.cols()), (n, p), "F shape");
        assert_eq!((mode.q.rows(), mode.q.cols()), (p, p), "Q shape");
        let mut aug = StructuralMatrix::zero(size, size);
        for (i, j) in mode.q.entries() {
            aug.insert(i, j).expect("Q entry in range");
        }
        for (i, j) in mode.f.entries() {
            aug.insert(p + i, j).expect("F entry in range");
        }
        for (i, j) in mode.a.entries() {
            aug.insert(p + i, p + j).expect("A entry in range");
        }
        aug_modes.push(aug);
    }
    let union = union_of_patterns(&aug_modes);
    AugmentedSystem {
        n,
        p,
        modes: aug_modes,
        union,
    }
}

/// Entry-wise union of the augmented mode patterns of `sys`.
pub fn union_of(sys: &SwitchedSystem) -> StructuralMatrix {
    augment(sys).union
}

fn union_of_patterns(mats: &[StructuralMatrix]) -> StructuralMatrix {
    let mut it = mats.iter();
    let first = it.next().expect("at least one mode").clone();
    it.fold(first, |acc, m| acc.union(m))
}

/// Identifies which construction stage contributed each sensor of a
/// placement. Manual placements leave all four parts empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    /// Sensors at columns the weighted matching assigned to coverage rows.
    pub from_matching: BTreeSet<usize>,
    /// Sensors at columns left unmatched by the maximum matching.
    pub from_unmatched_columns: BTreeSet<usize>,
    /// Sensors added for sink components not otherwise covered.
    pub from_uncovered_targets: BTreeSet<usize>,
    /// Sensors chosen by a class-specific construction (disjoint-path or
    /// one-per-sink rules).
    pub from_class_rule: BTreeSet<usize>,
}

/// How a placement was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmTag {
    /// Weighted-matching construction for arbitrary systems.
    General,
    /// Disjoint-path construction for self-loop systems with static
    /// disturbances.
    Class1,
    /// One-sensor-per-sink construction for systems with self-loops on
    /// every state and every input.
    Nodal,
    /// Exhaustive minimum search.
    BruteForce,
    /// Supplied by the user rather than computed.
    Manual,
}

impl AlgorithmTag {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmTag::General => "general",
            AlgorithmTag::Class1 => "class1",
            AlgorithmTag::Nodal => "nodal",
            AlgorithmTag::BruteForce => "brute-force",
            AlgorithmTag::Manual => "manual",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "general" => Some(AlgorithmTag::General),
            "class1" => Some(AlgorithmTag::Class1),
            "nodal" => Some(AlgorithmTag::Nodal),
            "brute-force" => Some(AlgorithmTag::BruteForce),
            "manual" => Some(AlgorithmTag::Manual),
            _ => None,
        }
    }
}

/// A dedicated-sensor placement: the set of measured augmented vertices.
///
/// Vertex `i <= p` means a sensor on input `d_i`; vertex `i > p` means a
/// sensor on state `x_{i-p}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorPlacement {
    pub n: usize,
    pub p: usize,
    /// Measured augmented vertices, ascending.
    pub sensors: BTreeSet<usize>,
    pub provenance: Provenance,
    pub algorithm: AlgorithmTag,
    /// Notes emitted during construction (e.g. an input sensor forced by a
    /// sink component containing no state).
    pub warnings: Vec<String>,
}

impl SensorPlacement {
    /// A placement supplied directly by the caller, without provenance.
    pub fn manual<I>(n: usize, p: usize, sensors: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let sensors: BTreeSet<usize> = sensors.into_iter().collect();
        let placement = SensorPlacement {
            n,
            p,
            sensors,
            provenance: Provenance::default(),
            algorithm: AlgorithmTag::Manual,
            warnings: Vec::new(),
        };
        placement.check_in_range()?;
        Ok(placement)
    }

    fn check_in_range(&self) -> Result<()> {
        for &j in &self.sensors {
            if j == 0 || j > self.n + self.p {
                return Err(Error::InvalidPlacement(format!(
                    "sensor index {j} outside 1..={}",
                    self.n + self.p
                )));
            }
        }
        Ok(())
    }

    pub fn cardinality(&self) -> usize {
        self.sensors.len()
    }

    /// Measured inputs, as augmented indices (`<= p`).
    pub fn input_sensors(&self) -> BTreeSet<usize> {
        self.sensors.iter().copied().filter(|&j| j <= self.p).collect()
    }

    /// Measured states, as augmented indices (`> p`).
    pub fn state_sensors_aug(&self) -> BTreeSet<usize> {
        self.sensors.iter().copied().filter(|&j| j > self.p).collect()
    }

    /// Measured states, as 1-based state indices.
    pub fn state_sensors(&self) -> BTreeSet<usize> {
        self.state_sensors_aug().iter().map(|&j| j - self.p).collect()
    }

    /// The output patterns induced by the placement: `(D, C, [D C])`,
    /// where each of the `|sensors|` rows (ascending by measured vertex)
    /// reads exactly one vertex. `D` is `|sensors| x p`, `C` is
    /// `|sensors| x n`, and the concatenation addresses augmented columns.
    pub fn output_patterns(&self) -> (StructuralMatrix, StructuralMatrix, StructuralMatrix) {
        let rows = self.sensors.len();
        let mut d = StructuralMatrix::zero(rows, self.p);
        let mut c = StructuralMatrix::zero(rows, self.n);
        let mut both = StructuralMatrix::zero(rows, self.n + self.p);
        for (row0, &j) in self.sensors.iter().enumerate() {
            let row = row0 + 1;
            both.insert(row, j).expect("in range");
            if j <= self.p {
                d.insert(row, j).expect("in range");
            } else {
                c.insert(row, j - self.p).expect("in range");
            }
        }
        (d, c, both)
    }

    /// The combined `[D C]` output pattern over augmented columns.
    pub fn output_pattern(&self) -> StructuralMatrix {
        self.output_patterns().2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-mode system with one static disturbance: a chain picked apart
    /// by switching, used as a golden fixture across the test suite.
    pub fn chain_fixture() -> SwitchedSystem {
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
    fn entry_out_of_range_is_rejected() {
        let err = StructuralMatrix::from_entries(2, 3, [(3, 1)]).unwrap_err();
        assert!(matches!(err, Error::CoordinateOutOfRange { row: 3, .. }));
        let err = StructuralMatrix::from_entries(2, 3, [(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::CoordinateOutOfRange { row: 0, .. }));
        let err = StructuralMatrix::from_entries(2, 3, [(1, 4)]).unwrap_err();
        assert!(matches!(err, Error::CoordinateOutOfRange { col: 4, .. }));
    }

    #[test]
    fn zero_dimension_matrices_are_allowed_and_empty() {
        let m = StructuralMatrix::zero(5, 0);
        assert!(m.is_zero());
        assert_eq!(m.rows(), 5);
        assert_eq!(m.cols(), 0);
        assert!(StructuralMatrix::from_entries(0, 0, []).is_ok());
        assert!(StructuralMatrix::from_entries(5, 0, [(1, 1)]).is_err());
    }

    #[test]
    fn union_is_entrywise_or() {
        let a = StructuralMatrix::from_entries(2, 2, [(1, 1)]).unwrap();
        let b = StructuralMatrix::from_entries(2, 2, [(2, 2), (1, 1)]).unwrap();
        let u = a.union(&b);
        assert_eq!(u.entries().collect::<Vec<_>>(), vec![(1, 1), (2, 2)]);
        assert_eq!(a.union(&b), b.union(&a));
        assert_eq!(a.union(&a), a);
    }

    #[test]
    fn vstack_offsets_rows() {
        let a = StructuralMatrix::from_entries(2, 2, [(2, 1)]).unwrap();
        let b = StructuralMatrix::from_entries(1, 2, [(1, 2)]).unwrap();
        let s = StructuralMatrix::vstack(&[&a, &b]);
        assert_eq!(s.rows(), 3);
        assert_eq!(s.entries().collect::<Vec<_>>(), vec![(2, 1), (3, 2)]);
    }

    #[test]
    fn augmentation_places_blocks() {
        let aug = augment(&chain_fixture());
        assert_eq!(aug.num_vertices(), 6);
        assert_eq!(
            aug.modes[0].entries().collect::<Vec<_>>(),
            vec![(3, 1), (3, 3), (4, 2), (5, 4)]
        );
        assert_eq!(
            aug.modes[1].entries().collect::<Vec<_>>(),
            vec![(3, 1), (4, 3), (6, 4)]
        );
        assert_eq!(
            aug.union.entries().collect::<Vec<_>>(),
            vec![(3, 1), (3, 3), (4, 2), (4, 3), (5, 4), (6, 4)]
        );
    }

    #[test]
    fn stacked_modes_concatenates_all_modes() {
        let aug = augment(&chain_fixture());
        let stacked = aug.stacked_modes();
        assert_eq!(stacked.rows(), 12);
        assert_eq!(stacked.cols(), 6);
        assert_eq!(
            stacked.num_entries(),
            aug.modes[0].num_entries() + aug.modes[1].num_entries()
        );
        assert!(stacked.contains(9, 1)); // mode 2's (3, 1) shifted by 6
    }

    #[test]
    fn validate_accepts_the_fixture() {
        chain_fixture().validate(false).unwrap();
    }

    #[test]
    fn validate_reports_the_offending_mode() {
        let good = StructuralMatrix::zero(3, 2);
        let bad = StructuralMatrix::zero(3, 1);
        let a = StructuralMatrix::from_entries(3, 3, [(1, 1)]).unwrap();
        let q = StructuralMatrix::from_entries(2, 2, [(1, 1), (2, 2)]).unwrap();
        let sys = SwitchedSystem::new(
            3,
            2,
            vec![
                Mode {
                    a: a.clone(),
                    f: good,
                    q: q.clone(),
                },
                Mode { a, f: bad, q },
            ],
        );
        match sys.validate(true) {
            Err(Error::DimensionMismatch { mode: 2, .. }) => {}
            other => panic!("expected mode-2 dimension mismatch, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_disturbances_never_entering_dynamics() {
        let mut sys = chain_fixture();
        for mode in &mut sys.modes {
            mode.f = StructuralMatrix::zero(5, 1);
        }
        match sys.validate(false) {
            Err(Error::ZeroDisturbanceColumn(1)) => {}
            other => panic!("expected zero-column error, got {other:?}"),
        }
        sys.validate(true).unwrap();
    }

    #[test]
    fn zero_column_check_uses_the_union_across_modes() {
        // The column is zero in mode 2 but not in mode 1: acceptable.
        let sys = chain_fixture();
        let mut sys2 = sys.clone();
        sys2.modes[1].f = StructuralMatrix::zero(5, 1);
        sys2.validate(false).unwrap();
    }

    #[test]
    fn systems_without_inputs_validate() {
        let a = StructuralMatrix::from_entries(2, 2, [(1, 1), (2, 1)]).unwrap();
        let sys = SwitchedSystem::new(
            2,
            0,
            vec![Mode {
                a,
                f: StructuralMatrix::zero(2, 0),
                q: StructuralMatrix::zero(0, 0),
            }],
        );
        sys.validate(false).unwrap();
        let aug = augment(&sys);
        assert_eq!(aug.num_vertices(), 2);
        assert_eq!(aug.union.entries().collect::<Vec<_>>(), vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn vertex_names_split_inputs_and_states() {
        assert_eq!(vertex_name(1, 2), "d1");
        assert_eq!(vertex_name(2, 2), "d2");
        assert_eq!(vertex_name(3, 2), "x1");
        assert_eq!(vertex_name(5, 0), "x5");
    }

    #[test]
    fn output_patterns_have_one_star_per_row() {
        let placement = SensorPlacement::manual(5, 1, [2, 5, 6]).unwrap();
        let (d, c, both) = placement.output_patterns();
        assert_eq!((d.rows(), d.cols()), (3, 1));
        assert_eq!((c.rows(), c.cols()), (3, 5));
        assert_eq!((both.rows(), both.cols()), (3, 6));
        // With p = 1 the measured vertices 2, 5, 6 are states x1, x4, x5.
        assert_eq!(both.entries().collect::<Vec<_>>(), vec![(1, 2), (2, 5), (3, 6)]);
        assert_eq!(c.entries().collect::<Vec<_>>(), vec![(1, 1), (2, 4), (3, 5)]);
        assert!(d.is_zero());
        for i in 1..=3 {
            let stars = both.entries().filter(|&(r, _)| r == i).count();
            assert_eq!(stars, 1);
        }
    }

    #[test]
    fn input_sensors_split_from_state_sensors() {
        let placement = SensorPlacement::manual(5, 2, [1, 3, 7]).unwrap();
        assert_eq!(placement.input_sensors().into_iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(
            placement.state_sensors_aug().into_iter().collect::<Vec<_>>(),
            vec![3, 7]
        );
        assert_eq!(placement.state_sensors().into_iter().collect::<Vec<_>>(), vec![1, 5]);
        let (d, c, _) = placement.output_patterns();
        assert_eq!(d.entries().collect::<Vec<_>>(), vec![(1, 1)]);
        assert_eq!(c.entries().collect::<Vec<_>>(), vec![(2, 1), (3, 5)]);
    }

    #[test]
    fn manual_placement_rejects_out_of_range_sensors() {
        assert!(SensorPlacement::manual(2, 1, [4]).is_err());
        assert!(SensorPlacement::manual(2, 1, [0]).is_err());
        assert!(SensorPlacement::manual(2, 1, []).is_ok());
    }

    #[test]
    fn empty_placement_yields_zero_row_patterns() {
        let placement = SensorPlacement::manual(3, 1, []).unwrap();
        let (d, c, both) = placement.output_patterns();
        assert_eq!(d.rows(), 0);
        assert_eq!(c.rows(), 0);
        assert_eq!(both.rows(), 0);
        assert_eq!(both.cols(), 4);
    }

    #[test]
    fn display_renders_grid() {
        let m = StructuralMatrix::from_entries(2, 3, [(1, 1), (2, 3)]).unwrap();
        assert_eq!(m.to_string(), "*..\n..*\n");
    }
}
