//! Spherical ideal circle patterns with prescribed total geodesic curvature.
//!
//! A pattern is a graph embedded in a closed surface, with an intersection
//! angle on every edge and a prescribed total geodesic curvature on every
//! vertex circle. The crate finds radii realizing those curvatures by
//! integrating the combinatorial geodesic curvature flow
//! `dK/dt = -(L(K) - L_hat)` in log-curvature coordinates `K = ln cot r`, or by
//! damped Newton on the same gradient system, and decides whether the targets
//! are attainable at all via the subset inequalities
//! `sum_{v in X} L_hat_v < 2 sum_{e in E(X)} theta(e)`.
//!
//! Module map:
//!
//! - [`pattern_graph`]: combinatorics, angles, targets, coordinate vectors
//! - [`bigon`]: spherical trigonometry of one lens with its closed-form derivatives
//! - [`curvature`]: per-vertex totals, Jacobian and the convex potential
//! - [`feasibility`]: exhaustive and max-flow checks of the subset inequalities
//! - [`solver`]: flow integration, Newton, rate estimation
//! - [`io`]: pattern files, run reports, trajectory CSV, built-in examples
//!
//! With the default `parallel` feature, per-edge evaluation on large patterns,
//! subset enumeration and batched solves run on rayon. Every reduction is done
//! in a fixed order so results are bit-identical to [`Execution::Sequential`].

pub mod bigon;
pub mod curvature;
mod error;
mod exec;
pub mod feasibility;
pub mod io;
pub mod pattern_graph;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Execution;
pub use pattern_graph::{EdgeId, KVector, PatternGraph, RadiusVector, VertexId};
