//! Points, polytopes, ellipsoids, obstacles and the free-space predicates.

mod ellipsoid;
mod environment;
mod obstacle;
mod polytope;

use nalgebra::DVector;

pub use ellipsoid::{unit_ball_volume, Ellipsoid};
pub use environment::{Environment, SegmentCheck, FREE_VOLUME_PROBES};
pub use obstacle::ConvexObstacle;
pub use polytope::{HPolytope, Hyperplane};

use crate::numopt::lp::{lp_solve, LpOutcome, LpProblem};
use crate::numopt::projection::project_affine;
use crate::{Error, Result, GEOM_TOL};

/// Configuration-space point.
pub type Point = DVector<f64>;

pub fn polytope_contains(p: &HPolytope, q: &Point) -> Result<bool> {
    p.contains(q)
}

pub fn point_in_free_space(env: &Environment, q: &Point) -> Result<bool> {
    env.point_in_free_space(q)
}

pub fn segment_in_free_space(env: &Environment, q: &Point, q2: &Point) -> Result<bool> {
    env.segment_in_free_space(q, q2)
}

/// Exact disjointness of a bounded region and an obstacle; touching counts
/// as intersecting.
pub fn region_obstacle_disjoint(p: &HPolytope, o: &ConvexObstacle) -> Result<bool> {
    if p.dim() != o.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: o.dim() });
    }
    if !p.is_bounded()? {
        return Err(Error::Unbounded("region passed to disjointness check".into()));
    }
    match o {
        ConvexObstacle::Polytope(q) => Ok(separation_depth(p, q)? > GEOM_TOL),
        ConvexObstacle::Sphere { center, radius } => {
            let n = p.dim();
            match project_affine(p, center, &nalgebra::DMatrix::identity(n, n)) {
                Ok(x) => Ok((x - center).norm() > radius + GEOM_TOL),
                Err(Error::Empty(_)) => Ok(true),
                Err(e) => Err(e),
            }
        }
    }
}

/// `min s` such that some `x` satisfies both polytopes with every
/// (normalized) face relaxed by `s`. Positive iff the polytopes are
/// separated; zero when they touch.
pub fn separation_depth(p: &HPolytope, q: &HPolytope) -> Result<f64> {
    let stacked = p.normalized().intersect(&q.normalized())?;
    let (m, n) = (stacked.num_faces(), stacked.dim());
    let mut a = nalgebra::DMatrix::zeros(m, n + 1);
    a.view_mut((0, 0), (m, n)).copy_from(stacked.a());
    a.column_mut(n).fill(-1.0);
    let mut c = DVector::zeros(n + 1);
    c[n] = 1.0;
    match lp_solve(&LpProblem::new(c, a, stacked.b().clone()))? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Unbounded => Err(Error::Unbounded("separation LP".into())),
        LpOutcome::Infeasible => Err(Error::Numerical("separation LP reported infeasible".into())),
    }
}
