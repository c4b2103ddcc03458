//! Shared helpers for the integration suites: fixture loading, seeded
//! random system generators, and mode permutations.
//!
//! Every generator is a pure function of its seed, so any failure can
//! be replayed by seed alone.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swobs::io::read_system;
use swobs::sysmodel::{Mode, StructuralMatrix, SwitchedSystem};

pub fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn load_fixture(name: &str) -> SwitchedSystem {
    let sys = read_system(&data_path(name)).expect("fixture parses");
    sys.validate(false).expect("fixture is valid");
    sys
}

fn random_pattern(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> StructuralMatrix {
    let mut m = StructuralMatrix::zero(rows, cols);
    for i in 1..=rows {
        for j in 1..=cols {
            if rng.random_bool(density) {
                m.insert(i, j).unwrap();
            }
        }
    }
    m
}

struct Shape {
    n: usize,
    p: usize,
    m: usize,
    density: f64,
    /// Give every state a self-loop in some mode.
    a_self_loops: bool,
    /// Give every disturbance a self-loop in some mode.
    q_self_loops: bool,
    /// Zero out all disturbance dynamics.
    static_disturbances: bool,
}

fn build(rng: &mut ChaCha8Rng, shape: Shape) -> SwitchedSystem {
    let mut modes = Vec::with_capacity(shape.m);
    for _ in 0..shape.m {
        let q = if shape.static_disturbances {
            StructuralMatrix::zero(shape.p, shape.p)
        } else {
            random_pattern(rng, shape.p, shape.p, shape.density)
        };
        modes.push(Mode {
            a: random_pattern(rng, shape.n, shape.n, shape.density),
            f: random_pattern(rng, shape.n, shape.p, shape.density),
            q,
        });
    }
    if shape.a_self_loops {
        for i in 1..=shape.n {
            let k = rng.random_range(0..shape.m);
            modes[k].a.insert(i, i).unwrap();
        }
    }
    if shape.q_self_loops {
        for j in 1..=shape.p {
            let k = rng.random_range(0..shape.m);
            modes[k].q.insert(j, j).unwrap();
        }
    }
    // Every disturbance must enter the dynamics in at least one mode.
    for j in 1..=shape.p {
        if modes.iter().all(|mo| mo.f.column_is_zero(j)) {
            let k = rng.random_range(0..shape.m);
            let i = rng.random_range(1..=shape.n);
            modes[k].f.insert(i, j).unwrap();
        }
    }
    let sys = SwitchedSystem::new(shape.n, shape.p, modes);
    sys.validate(false).expect("generated system is valid");
    sys
}

fn pick_density(rng: &mut ChaCha8Rng) -> f64 {
    [0.1, 0.25, 0.5][rng.random_range(0..3)]
}

/// Small system of no particular class: `n + p <= 8`, up to 3 modes.
pub fn random_general(seed: u64) -> SwitchedSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=6);
    let p = rng.random_range(0..=2);
    let m = rng.random_range(1..=3);
    let density = pick_density(&mut rng);
    build(
        &mut rng,
        Shape {
            n,
            p,
            m,
            density,
            a_self_loops: false,
            q_self_loops: false,
            static_disturbances: false,
        },
    )
}

/// Static disturbances and a self-loop on every state in some mode,
/// drawn from the range where the disjoint-routing construction is
/// exact: either a single mode (several disturbances allowed) or a
/// single disturbance (several modes allowed). Outside that range the
/// routing bound is loose and auto dispatch falls back to the general
/// construction anyway.
pub fn random_class1(seed: u64) -> SwitchedSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x1000_0000));
    let n = rng.random_range(1..=5);
    let (p, m) = if rng.random_bool(0.5) {
        (rng.random_range(1..=3), 1)
    } else {
        (1, rng.random_range(1..=3))
    };
    let density = pick_density(&mut rng);
    build(
        &mut rng,
        Shape {
            n,
            p,
            m,
            density,
            a_self_loops: true,
            q_self_loops: false,
            static_disturbances: true,
        },
    )
}

/// Self-loops on every state and every disturbance in some mode.
pub fn random_class2(seed: u64) -> SwitchedSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x2000_0000));
    let n = rng.random_range(1..=5);
    let p = rng.random_range(1..=2);
    let m = rng.random_range(1..=3);
    let density = pick_density(&mut rng);
    build(
        &mut rng,
        Shape {
            n,
            p,
            m,
            density,
            a_self_loops: true,
            q_self_loops: true,
            static_disturbances: false,
        },
    )
}

/// Small system guaranteed to have at least two disturbances.
pub fn random_multi_disturbance(seed: u64) -> SwitchedSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x3000_0000));
    let n = rng.random_range(1..=5);
    let p = rng.random_range(2..=3);
    let m = rng.random_range(1..=3);
    let density = pick_density(&mut rng);
    build(
        &mut rng,
        Shape {
            n,
            p,
            m,
            density,
            a_self_loops: false,
            q_self_loops: false,
            static_disturbances: false,
        },
    )
}

/// Sparse system with `n + p` vertices at average out-degree around 3.
pub fn random_large(seed: u64, num_vertices: usize, p: usize, m: usize) -> SwitchedSystem {
    assert!(p < num_vertices);
    let n = num_vertices - p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x4000_0000));
    let density = 3.0 / num_vertices as f64;
    build(
        &mut rng,
        Shape {
            n,
            p,
            m,
            density,
            a_self_loops: false,
            q_self_loops: false,
            static_disturbances: false,
        },
    )
}

/// All orderings of `0..m`.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            go(items, k + 1, out);
            items.swap(k, i);
        }
    }
    let mut items: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    go(&mut items, 0, &mut out);
    out.sort();
    out
}

/// The same system with its modes reordered.
pub fn permute_modes(sys: &SwitchedSystem, perm: &[usize]) -> SwitchedSystem {
    assert_eq!(perm.len(), sys.modes.len());
    SwitchedSystem::new(
        sys.n,
        sys.p,
        perm.iter().map(|&k| sys.modes[k].clone()).collect(),
    )
}
