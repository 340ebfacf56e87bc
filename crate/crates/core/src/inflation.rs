//! Clique summaries and IRIS polytope inflation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexObstacle, Ellipsoid, Environment, HPolytope, Hyperplane, Point};
use crate::numopt::{max_volume_inscribed_ellipsoid, min_volume_ellipsoid, DEFAULT_MVEE_EPS};
use crate::{Error, Result, GEOM_TOL};

/// Relative tolerance of the inscribed-ellipsoid step in [`iris_full`].
pub const MVIE_REL_TOL: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedEllipsoid {
    pub ellipsoid: Ellipsoid,
    pub source_size: usize,
    pub recentered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InflationConfig {
    /// Defaults to `10·n` plus the number of obstacles considered.
    pub max_hyperplanes: Option<usize>,
    /// Each obstacle hyperplane is pulled back toward the seed by this much.
    pub boundary_backoff: f64,
    pub ios_max_iterations: usize,
    pub ios_termination_threshold: f64,
}

impl Default for InflationConfig {
    fn default() -> Self {
        Self { max_hyperplanes: None, boundary_backoff: 0.0, ios_max_iterations: 10, ios_termination_threshold: 0.02 }
    }
}

impl InflationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.boundary_backoff >= 0.0 && self.boundary_backoff.is_finite()) {
            return Err(Error::InvalidInput("boundary backoff must be finite and nonnegative".into()));
        }
        if self.ios_max_iterations == 0 {
            return Err(Error::InvalidInput("IRIS iteration limit must be positive".into()));
        }
        if !(self.ios_termination_threshold > 0.0) {
            return Err(Error::InvalidInput("IRIS termination threshold must be positive".into()));
        }
        if self.max_hyperplanes == Some(0) {
            return Err(Error::InvalidInput("hyperplane budget must be positive".into()));
        }
        Ok(())
    }
}

/// Minimum-volume ellipsoid around a clique, recentered on the nearest
/// clique vertex when its center is in collision.
pub fn clique_to_ellipsoid(env: &Environment, points: &[Point]) -> Result<SeedEllipsoid> {
    for p in points {
        if p.len() != env.dimension() {
            return Err(Error::DimensionMismatch { expected: env.dimension(), found: p.len() });
        }
    }
    let mvee = min_volume_ellipsoid(points, DEFAULT_MVEE_EPS)?;
    let center = mvee.ellipsoid.center();
    if env.is_free(center) {
        return Ok(SeedEllipsoid { ellipsoid: mvee.ellipsoid, source_size: points.len(), recentered: false });
    }
    let nearest = points
        .iter()
        .min_by(|a, b| (*a - center).norm().total_cmp(&(*b - center).norm()))
        .expect("clique is nonempty");
    Ok(SeedEllipsoid {
        ellipsoid: mvee.ellipsoid.with_center(nearest.clone())?,
        source_size: points.len(),
        recentered: true,
    })
}

fn check_seed(env: &Environment, seed: &Point, extra: &[HPolytope]) -> Result<()> {
    if seed.len() != env.dimension() {
        return Err(Error::DimensionMismatch { expected: env.dimension(), found: seed.len() });
    }
    if !env.is_free(seed) {
        return Err(Error::InCollision("inflation seed is not collision-free".into()));
    }
    if let Some(i) = extra.iter().position(|p| p.contains_with_tol(seed, GEOM_TOL)) {
        return Err(Error::InCollision(format!("inflation seed lies in extra obstacle {i}")));
    }
    Ok(())
}

/// One separating-hyperplane pass of IRIS in the metric of `seed`, followed
/// by the domain faces. `extra` polytopes are treated as obstacles.
pub fn inflate_polytope_one_iteration(
    env: &Environment,
    seed: &Ellipsoid,
    cfg: &InflationConfig,
    extra: &[HPolytope],
) -> Result<HPolytope> {
    cfg.validate()?;
    let center = seed.center();
    check_seed(env, center, extra)?;
    let n = env.dimension();
    let extra_obstacles: Vec<ConvexObstacle> = extra.iter().cloned().map(ConvexObstacle::Polytope).collect();
    let obstacles: Vec<&ConvexObstacle> = env.obstacles().iter().chain(extra_obstacles.iter()).collect();
    let budget = cfg.max_hyperplanes.unwrap_or(10 * n + obstacles.len());

    let shape = seed.shape();
    let metric = seed.metric();
    let shape_inv = seed.shape_inverse();
    let mut candidates: Vec<(f64, usize, Point)> = Vec::with_capacity(obstacles.len());
    for (i, o) in obstacles.iter().enumerate() {
        let x = o.closest_point(center, shape)?;
        let dist = (&shape_inv * (&x - center)).norm();
        candidates.push((dist, i, x));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut excluded = vec![false; obstacles.len()];
    let mut planes: Vec<Hyperplane> = Vec::new();
    for (dist, i, x) in &candidates {
        if excluded[*i] {
            continue;
        }
        if *dist <= 0.0 {
            return Err(Error::InCollision(format!("inflation seed touches obstacle {i}")));
        }
        if planes.len() == budget {
            return Err(Error::HyperplaneBudget(budget));
        }
        let normal = tangent_normal(&metric, x, center);
        let offset = normal.dot(x) - cfg.boundary_backoff;
        excluded[*i] = true;
        for (j, o) in obstacles.iter().enumerate() {
            if !excluded[j] && o.min_linear(&normal)? >= normal.dot(x) {
                excluded[j] = true;
            }
        }
        planes.push(Hyperplane::new(normal, offset)?);
    }
    let region = HPolytope::from_hyperplanes(n, &planes)?;
    if planes.is_empty() {
        return Ok(env.domain().clone());
    }
    region.intersect(env.domain())
}

fn tangent_normal(metric: &DMatrix<f64>, x: &Point, center: &Point) -> Point {
    let v = metric * (x - center);
    let norm = v.norm();
    v / norm
}

#[derive(Clone, Debug)]
pub struct IrisOutcome {
    pub region: HPolytope,
    pub ellipsoid: Ellipsoid,
    pub iterations: usize,
    /// Inscribed-ellipsoid volume after each iteration.
    pub volumes: Vec<f64>,
}

/// IRIS run to convergence from a point seed.
pub fn iris_full(env: &Environment, seed: &Point, cfg: &InflationConfig, extra: &[HPolytope]) -> Result<HPolytope> {
    Ok(iris_full_traced(env, seed, cfg, extra)?.region)
}

pub fn iris_full_traced(
    env: &Environment,
    seed: &Point,
    cfg: &InflationConfig,
    extra: &[HPolytope],
) -> Result<IrisOutcome> {
    cfg.validate()?;
    check_seed(env, seed, extra)?;
    let mut ellipsoid = Ellipsoid::ball(seed.clone(), 1.0)?;
    let mut region = inflate_polytope_one_iteration(env, &ellipsoid, cfg, extra)?;
    let mut volumes = Vec::new();
    let mut iterations = 1;
    loop {
        let next = max_volume_inscribed_ellipsoid(&region, MVIE_REL_TOL)?;
        let growth = volumes.last().map(|&v: &f64| next.volume() / v - 1.0);
        volumes.push(next.volume());
        ellipsoid = next;
        if growth.is_some_and(|g| g < cfg.ios_termination_threshold) || iterations >= cfg.ios_max_iterations {
            break;
        }
        let candidate = inflate_polytope_one_iteration(env, &ellipsoid, cfg, extra)?;
        if candidate == region {
            break;
        }
        region = candidate;
        iterations += 1;
    }
    Ok(IrisOutcome { region, ellipsoid, iterations, volumes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::region_obstacle_disjoint;
    use nalgebra::{dmatrix, dvector};

    fn slab_env() -> Environment {
        Environment::new(
            dvector![0.0, 0.0],
            dvector![4.0, 4.0],
            vec![ConvexObstacle::aabb(&[2.0, 0.0], &[3.0, 4.0]).unwrap()],
        )
        .unwrap()
    }

    fn bbox(p: &HPolytope) -> (Point, Point) {
        p.bounding_box().unwrap()
    }

    #[test]
    fn square_clique_gives_circle() {
        let env = Environment::new(dvector![-2.0, -2.0], dvector![2.0, 2.0], vec![]).unwrap();
        let pts = vec![dvector![-1.0, -1.0], dvector![1.0, -1.0], dvector![1.0, 1.0], dvector![-1.0, 1.0]];
        let s = clique_to_ellipsoid(&env, &pts).unwrap();
        assert!(!s.recentered);
        assert_eq!(s.source_size, 4);
        assert!(s.ellipsoid.center().norm() < 1e-6);
        let r = 2.0f64.sqrt();
        for k in 0..8 {
            let th = k as f64 * std::f64::consts::FRAC_PI_4;
            let p = s.ellipsoid.boundary_point(&dvector![th.cos(), th.sin()]);
            assert!((p.norm() - r).abs() < 1e-3 * r);
        }
    }

    #[test]
    fn ring_around_obstacle_is_recentered() {
        let env = Environment::new(
            dvector![-2.0, -2.0],
            dvector![2.0, 2.0],
            vec![ConvexObstacle::sphere(dvector![0.0, 0.0], 0.3).unwrap()],
        )
        .unwrap();
        let pts: Vec<Point> = (0..6)
            .map(|k| {
                let th = k as f64 * std::f64::consts::PI / 3.0 + 0.1;
                dvector![th.cos(), th.sin()]
            })
            .collect();
        let s = clique_to_ellipsoid(&env, &pts).unwrap();
        assert!(s.recentered);
        assert!(pts.contains(s.ellipsoid.center()));
    }

    #[test]
    fn c_shape_recenters_on_nearest_vertex() {
        let env = Environment::new(
            dvector![-2.0, -2.0],
            dvector![2.0, 2.0],
            vec![ConvexObstacle::sphere(dvector![0.0, 0.0], 0.3).unwrap()],
        )
        .unwrap();
        let mut pts: Vec<Point> = (0..7)
            .map(|k| {
                let th = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / 6.0;
                dvector![th.cos(), th.sin()]
            })
            .collect();
        pts.push(dvector![0.5, 0.0]);
        let s = clique_to_ellipsoid(&env, &pts).unwrap();
        let mvee = min_volume_ellipsoid(&pts, DEFAULT_MVEE_EPS).unwrap().ellipsoid;
        assert!(!env.is_free(mvee.center()));
        let nearest = pts
            .iter()
            .min_by(|a, b| (*a - mvee.center()).norm().total_cmp(&(*b - mvee.center()).norm()))
            .unwrap();
        assert!(s.recentered);
        assert_eq!(s.ellipsoid.center(), nearest);
        assert_eq!(s.ellipsoid.shape(), mvee.shape());
    }

    #[test]
    fn slab_gives_halfplane() {
        let env = slab_env();
        let e = Ellipsoid::ball(dvector![1.0, 2.0], 1.0).unwrap();
        let p = inflate_polytope_one_iteration(&env, &e, &InflationConfig::default(), &[]).unwrap();
        let (lo, hi) = bbox(&p);
        assert!((lo - dvector![0.0, 0.0]).norm() < 1e-9);
        assert!((hi - dvector![2.0, 4.0]).norm() < 1e-9);
        let backed = InflationConfig { boundary_backoff: 1e-6, ..Default::default() };
        let p = inflate_polytope_one_iteration(&env, &e, &backed, &[]).unwrap();
        assert!(region_obstacle_disjoint(&p, &env.obstacles()[0]).unwrap());
    }

    #[test]
    fn empty_environment_returns_domain() {
        let env = Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], vec![]).unwrap();
        let e = Ellipsoid::ball(dvector![0.5, 0.5], 0.1).unwrap();
        let p = inflate_polytope_one_iteration(&env, &e, &InflationConfig::default(), &[]).unwrap();
        assert_eq!(&p, env.domain());
    }

    #[test]
    fn mirror_symmetric_obstacles() {
        let env = Environment::new(
            dvector![-3.0, -3.0],
            dvector![3.0, 3.0],
            vec![
                ConvexObstacle::aabb(&[1.0, -1.0], &[2.0, 1.0]).unwrap(),
                ConvexObstacle::aabb(&[-2.0, -1.0], &[-1.0, 1.0]).unwrap(),
            ],
        )
        .unwrap();
        let e = Ellipsoid::ball(dvector![0.0, 0.0], 1.0).unwrap();
        let p = inflate_polytope_one_iteration(&env, &e, &InflationConfig::default(), &[]).unwrap();
        let rows = p.rows_as_vecs();
        for (i, r) in rows.iter().enumerate() {
            let mirrored = [-r[0], r[1]];
            assert!(
                (0..rows.len()).any(|j| {
                    (rows[j][0] - mirrored[0]).abs() < 1e-9
                        && (rows[j][1] - mirrored[1]).abs() < 1e-9
                        && (p.b()[j] - p.b()[i]).abs() < 1e-9
                }),
                "row {i} has no mirror image"
            );
        }
        assert!(rows.iter().any(|r| (r[0] - 1.0).abs() < 1e-9 && r[1].abs() < 1e-9));
        assert!(rows.iter().any(|r| (r[0] + 1.0).abs() < 1e-9 && r[1].abs() < 1e-9));
    }

    #[test]
    fn elongated_metric_grows_along_major_axis() {
        let obstacles = (0..8)
            .map(|k| {
                let th = k as f64 * std::f64::consts::FRAC_PI_4;
                ConvexObstacle::sphere(dvector![3.0 * th.cos(), 3.0 * th.sin()], 0.5).unwrap()
            })
            .collect();
        let env = Environment::new(dvector![-5.0, -5.0], dvector![5.0, 5.0], obstacles).unwrap();
        let wide = Ellipsoid::new(dmatrix![2.0, 0.0; 0.0, 0.5], dvector![0.0, 0.0]).unwrap();
        let p = inflate_polytope_one_iteration(&env, &wide, &InflationConfig::default(), &[]).unwrap();
        let (lo, hi) = bbox(&p);
        assert!(hi[0] - lo[0] >= hi[1] - lo[1], "x extent {} < y extent {}", hi[0] - lo[0], hi[1] - lo[1]);
        let tall = Ellipsoid::new(dmatrix![0.5, 0.0; 0.0, 2.0], dvector![0.0, 0.0]).unwrap();
        let p = inflate_polytope_one_iteration(&env, &tall, &InflationConfig::default(), &[]).unwrap();
        let (lo, hi) = bbox(&p);
        assert!(hi[1] - lo[1] >= hi[0] - lo[0]);
    }

    #[test]
    fn collision_seed_is_rejected() {
        let env = slab_env();
        let e = Ellipsoid::ball(dvector![2.5, 2.0], 1.0).unwrap();
        assert!(matches!(
            inflate_polytope_one_iteration(&env, &e, &InflationConfig::default(), &[]),
            Err(Error::InCollision(_))
        ));
    }

    #[test]
    fn hyperplane_budget_is_enforced() {
        let env = Environment::new(
            dvector![-3.0, -3.0],
            dvector![3.0, 3.0],
            vec![
                ConvexObstacle::aabb(&[1.0, -1.0], &[2.0, 1.0]).unwrap(),
                ConvexObstacle::aabb(&[-2.0, -1.0], &[-1.0, 1.0]).unwrap(),
            ],
        )
        .unwrap();
        let cfg = InflationConfig { max_hyperplanes: Some(1), ..Default::default() };
        let e = Ellipsoid::ball(dvector![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(inflate_polytope_one_iteration(&env, &e, &cfg, &[]), Err(Error::HyperplaneBudget(1))));
    }

    #[test]
    fn iris_full_on_slab_converges_to_slab() {
        let env = slab_env();
        let out = iris_full_traced(&env, &dvector![1.0, 2.0], &InflationConfig::default(), &[]).unwrap();
        let (lo, hi) = bbox(&out.region);
        assert!((lo - dvector![0.0, 0.0]).norm() < 1e-3);
        assert!((hi - dvector![2.0, 4.0]).norm() < 1e-3);
        assert!(out.volumes.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-4)));
    }

    #[test]
    fn iris_full_on_empty_env_is_domain() {
        let env = Environment::new(dvector![0.0, 0.0], dvector![1.0, 2.0], vec![]).unwrap();
        let out = iris_full_traced(&env, &dvector![0.3, 0.3], &InflationConfig::default(), &[]).unwrap();
        assert_eq!(&out.region, env.domain());
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn seed_inside_extra_obstacle_errors() {
        let env = slab_env();
        let prev = HPolytope::from_box(&[0.0, 0.0], &[2.0, 4.0]).unwrap();
        assert!(matches!(
            iris_full(&env, &dvector![1.0, 2.0], &InflationConfig::default(), &[prev]),
            Err(Error::InCollision(_))
        ));
    }

    #[test]
    fn iris_full_avoids_previous_regions() {
        let env = slab_env();
        let prev = HPolytope::from_box(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let cfg = InflationConfig { boundary_backoff: 1e-6, ..Default::default() };
        let out = iris_full_traced(&env, &dvector![1.0, 3.0], &cfg, std::slice::from_ref(&prev)).unwrap();
        assert!(region_obstacle_disjoint(&out.region, &ConvexObstacle::Polytope(prev)).unwrap());
        assert!(region_obstacle_disjoint(&out.region, &env.obstacles()[0]).unwrap());
        assert!(out.volumes.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-4)));
    }
}
