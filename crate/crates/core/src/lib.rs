//! Solvers for the graph burning problem.
//!
//! * [`graph`]: representation, text formats, BFS, generators
//! * [`schedule`]: process simulation, strict validation, certificates
//! * [`exact`]: brute-force oracle, path-forest DP, coverage check
//! * [`approx`]: center-selection 3-approximation for any graph
//! * [`tree`]: deepest-vertex 2-approximation for trees
//! * [`bincover`]: bin covering reduction for near-regular path forests
//! * [`ptas`]: radius-grouping scheme for arbitrary path forests

pub mod approx;
pub mod bincover;
pub mod exact;
pub mod graph;
pub mod ptas;
pub mod schedule;
pub mod tree;

mod result;

pub use result::{ApproxResult, Counters, LowerBound};
