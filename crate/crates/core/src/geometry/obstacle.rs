use nalgebra::{DMatrix, DVector};

use super::{HPolytope, Point};
use crate::numopt::lp::LpOutcome;
use crate::numopt::projection::project_affine;
use crate::{Error, Result, GEOM_TOL};

/// Convex obstacle; its boundary counts as collision.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexObstacle {
    Polytope(HPolytope),
    Sphere { center: Point, radius: f64 },
}

impl ConvexObstacle {
    pub fn sphere(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("sphere radius must be positive, got {radius}")));
        }
        if !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("sphere center must be finite".into()));
        }
        Ok(Self::Sphere { center, radius })
    }

    pub fn aabb(lower: &[f64], upper: &[f64]) -> Result<Self> {
        Ok(Self::Polytope(HPolytope::from_box(lower, upper)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Polytope(p) => p.dim(),
            Self::Sphere { center, .. } => center.len(),
        }
    }

    /// Membership with tolerance `1e-9`, so touching counts as inside.
    pub fn contains(&self, q: &Point) -> bool {
        match self {
            Self::Polytope(p) => p.contains_with_tol(q, GEOM_TOL),
            Self::Sphere { center, radius } => (q - center).norm() <= radius + GEOM_TOL,
        }
    }

    /// Whether the closed segment `[q, q2]` meets the obstacle.
    ///
    /// Polytopes: the one-variable LP `∃t ∈ [0,1] : A(q + t(q2−q)) ≤ b + tol`
    /// solved in closed form by interval clipping. Spheres: distance from the
    /// center to the segment.
    pub fn segment_hits(&self, q: &Point, q2: &Point) -> bool {
        let d = q2 - q;
        match self {
            Self::Polytope(p) => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for i in 0..p.num_faces() {
                    let row = p.a().row(i);
                    let num = p.b()[i] + GEOM_TOL - row.dot(&q.transpose());
                    let den = row.dot(&d.transpose());
                    if den == 0.0 {
                        if num < 0.0 {
                            return false;
                        }
                    } else if den > 0.0 {
                        hi = hi.min(num / den);
                    } else {
                        lo = lo.max(num / den);
                    }
                    if lo > hi {
                        return false;
                    }
                }
                true
            }
            Self::Sphere { center, radius } => {
                let len2 = d.norm_squared();
                let t = if len2 > 0.0 { ((center - q).dot(&d) / len2).clamp(0.0, 1.0) } else { 0.0 };
                let closest = q + d * t;
                (closest - center).norm() <= radius + GEOM_TOL
            }
        }
    }

    /// `min aᵀx` over the obstacle.
    pub fn min_linear(&self, a: &DVector<f64>) -> Result<f64> {
        match self {
            Self::Polytope(p) => match p.minimize(a)? {
                LpOutcome::Optimal { value, .. } => Ok(value),
                LpOutcome::Infeasible => Err(Error::Empty("polytope obstacle".into())),
                LpOutcome::Unbounded => Err(Error::Unbounded("polytope obstacle".into())),
            },
            Self::Sphere { center, radius } => Ok(a.dot(center) - radius * a.norm()),
        }
    }

    /// Point of the obstacle closest to `center` in the metric of the
    /// ellipsoid `{center + Cu : ‖u‖ ≤ 1}`, i.e. minimizing `‖C⁻¹(x − center)‖`.
    pub fn closest_point(&self, center: &Point, shape: &DMatrix<f64>) -> Result<Point> {
        match self {
            Self::Polytope(p) => project_affine(p, center, shape),
            Self::Sphere { center: c, radius } => sphere_closest_point(c, *radius, center, shape),
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> Result<(Point, Point)> {
        match self {
            Self::Polytope(p) => p.bounding_box(),
            Self::Sphere { center, radius } => Ok((center.add_scalar(-radius), center.add_scalar(*radius))),
        }
    }
}

/// Solve `min ‖z‖ s.t. ‖d + Cz − c‖ ≤ r` through the secular equation in
/// the multiplier `μ`; returns `x = d + Cz`.
fn sphere_closest_point(c: &Point, r: f64, d: &Point, shape: &DMatrix<f64>) -> Result<Point> {
    let v = c - d;
    if v.norm() <= r {
        return Ok(d.clone());
    }
    let svd = shape.clone().svd(true, false);
    let u = svd.u.as_ref().ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let sigma2: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    let w = u.transpose() * &v;
    let residual = |mu: f64| -> f64 {
        w.iter().zip(&sigma2).map(|(wi, s2)| (wi / (1.0 + mu * s2)).powi(2)).sum::<f64>().sqrt()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while residual(hi) > r {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numerical("sphere projection multiplier diverged".into()));
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = hi;
    let offset = DVector::from_iterator(w.len(), w.iter().zip(&sigma2).map(|(wi, s2)| wi / (1.0 + mu * s2)));
    let dir = u * offset;
    let norm = dir.norm();
    // x − c = −U(w / (1 + μσ²)); snap onto the sphere.
    Ok(c - dir * (r / norm))
}
