//! Structural observability analysis and minimal sensor placement for
//! switched linear systems driven by unknown inputs.
//!
//! The library reasons about sparsity patterns only: every matrix is a
//! {0, ⋆} pattern whose ⋆ entries stand for independent free parameters.
//! A switched system is a finite family of modes
//!
//! ```text
//!     dx/dt = A_k x + F_k d,      dd/dt = Q_k d,      y = C x + D d
//! ```
//!
//! sharing one output equation. State and input patterns of each mode are
//! combined into an augmented pattern over `n + p` vertices (inputs first,
//! then states), and observability of the switched whole is decided from
//!
//! 1. reachability of some measured vertex from every vertex of the union
//!    digraph (equivalently: every sink component holds a sensor), and
//! 2. full generic rank of the modes' augmented patterns stacked on top of
//!    the output pattern.
//!
//! Sensors are *dedicated*: each output reads exactly one state or one
//! input. [`placement`] computes minimum-cardinality sensor sets — a
//! weighted-matching construction for arbitrary systems and two cheaper
//! constructions for systems with self-loop structure — and [`verify`]
//! provides an exhaustive oracle plus a numeric rank probe to cross-check
//! the structural results.
//!
//! Conventions used throughout:
//!
//! * indices are 1-based, matching the modelling literature;
//! * augmented vertex `i <= p` is the unknown input `d_i`, vertex `i > p`
//!   is the state `x_{i-p}`;
//! * all set-like results are sorted ascending and all algorithms are
//!   deterministic for a fixed input.

pub mod cli;
pub mod error;
pub mod flow;
pub mod graph;
pub mod io;
pub mod matching;
pub mod placement;
pub mod sysmodel;
pub mod verify;

pub use error::{Error, Result};
