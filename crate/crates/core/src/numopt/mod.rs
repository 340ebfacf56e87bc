//! Small dense convex solvers: LP, metric projection, minimum-volume
//! enclosing and maximum-volume inscribed ellipsoids, and point/hull
//! separation.

pub mod lp;
pub mod mvee;
pub mod mvie;
pub mod projection;
pub mod separation;

pub use lp::{lp_solve, LpOutcome, LpProblem};
pub use mvee::{min_volume_ellipsoid, MveeResult, DEFAULT_MVEE_EPS};
pub use mvie::max_volume_inscribed_ellipsoid;
pub use projection::project_onto_polytope;
pub use separation::{hull_weights, separating_hyperplane};
