//! Approximate convex covers of collision-free space.
//!
//! The free space is an axis-aligned box minus a set of convex obstacles.
//! [`pipeline::vcc`] samples the uncovered free space, builds a visibility
//! graph, extracts a truncated clique cover with an exact maximum-clique
//! solver, summarizes every clique by its minimum-volume enclosing ellipsoid
//! and inflates one collision-free polytope per ellipsoid. [`pipeline::ios`]
//! is the iterative-obstacle-seeding baseline that grows full IRIS regions
//! around random uncovered seeds.

pub mod bitset;
pub mod cli;
pub mod cliques;
pub mod demo;
pub mod error;
pub mod geometry;
pub mod inflation;
pub mod numopt;
pub mod pipeline;
pub mod render;
pub mod scene;
pub mod scenes;
pub mod visibility;

pub use error::{Error, Result};
pub use geometry::{ConvexObstacle, Ellipsoid, Environment, HPolytope, Hyperplane, Point};

/// Membership tolerance shared by every geometric predicate.
pub const GEOM_TOL: f64 = 1e-9;

/// Termination tolerance for LP and QP subproblems.
pub const SOLVER_TOL: f64 = 1e-7;
