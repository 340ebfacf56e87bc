//! Built-in scenes: a seeded random 2D benchmark suite and the triangle with
//! a central triangular hole.

use std::f64::consts::PI;

use nalgebra::{dvector, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{ConvexObstacle, Environment, HPolytope, Point};
use crate::{Error, Result};

/// H-representation of a convex polygon given counter-clockwise vertices.
pub fn convex_polygon(vertices: &[[f64; 2]]) -> Result<HPolytope> {
    let m = vertices.len();
    if m < 3 {
        return Err(Error::InvalidInput("polygon needs at least three vertices".into()));
    }
    let mut a = DMatrix::zeros(m, 2);
    let mut b = DVector::zeros(m);
    for i in 0..m {
        let p = vertices[i];
        let q = vertices[(i + 1) % m];
        let (nx, ny) = (q[1] - p[1], p[0] - q[0]);
        let norm = nx.hypot(ny);
        a[(i, 0)] = nx / norm;
        a[(i, 1)] = ny / norm;
        b[i] = (nx * p[0] + ny * p[1]) / norm;
    }
    HPolytope::new(a, b)
}

/// Seeded scene in the unit square with 3 to 8 convex obstacles: rotated
/// elliptical polygons and disks.
pub fn random_scene(seed: u64) -> Environment {
    random_scene_scaled(seed, 1.0)
}

/// [`random_scene`] with every obstacle size multiplied by `scale`.
pub fn random_scene_scaled(seed: u64, scale: f64) -> Environment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ce9_e5ee_d000_0000);
    let count = rng.random_range(3..=8);
    let mut obstacles = Vec::with_capacity(count);
    while obstacles.len() < count {
        let cx = rng.random_range(0.1..0.9);
        let cy = rng.random_range(0.1..0.9);
        let o = if rng.random::<f64>() < 0.3 {
            ConvexObstacle::sphere(dvector![cx, cy], scale * rng.random_range(0.04..0.1))
        } else {
            let m = rng.random_range(3..=6);
            let (rx, ry) = (scale * rng.random_range(0.05..0.15), scale * rng.random_range(0.03..0.12));
            let rot = rng.random_range(0.0..2.0 * PI);
            let spacing = 2.0 * PI / m as f64;
            let vertices: Vec<[f64; 2]> = (0..m)
                .map(|k| {
                    let th = k as f64 * spacing + rng.random_range(-0.3..0.3) * spacing;
                    let (x, y) = (rx * th.cos(), ry * th.sin());
                    [cx + x * rot.cos() - y * rot.sin(), cy + x * rot.sin() + y * rot.cos()]
                })
                .collect();
            convex_polygon(&vertices).map(ConvexObstacle::Polytope)
        };
        obstacles.push(o.expect("generated obstacle is valid"));
    }
    Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], obstacles).expect("generated scene is valid")
}

/// The ten-scene 2D benchmark suite.
pub fn benchmark_suite() -> Vec<(String, Environment)> {
    (0..10).map(|s| (format!("random-{s}"), random_scene(s))).collect()
}

/// Largest hole size for which the maximum clique of a dense sample must
/// enclose the hole.
pub fn hole_enclosure_threshold() -> f64 {
    1.0 - (5.0f64 / 6.0).sqrt()
}

/// Unit equilateral triangle with a concentric triangular hole of side `ε`.
///
/// The domain is the triangle's bounding box; the two side wedges of the box
/// are obstacles. The hole is the scaled copy `G + ε(V − G)` of the outer
/// triangle about its centroid `G`, i.e. the points with every barycentric
/// coordinate at least `(1 − ε)/3`.
#[derive(Clone, Debug)]
pub struct TriangleScene {
    pub epsilon: f64,
    pub env: Environment,
    pub vertices: [Point; 3],
    pub centroid: Point,
    pub hole: HPolytope,
}

impl TriangleScene {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1/3), got {epsilon}")));
        }
        let h = 3.0f64.sqrt() / 2.0;
        let v = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        let g = [0.5, h / 3.0];
        let left = convex_polygon(&[[0.0, 0.0], [0.5, h], [0.0, h]])?;
        let right = convex_polygon(&[[1.0, 0.0], [1.0, h], [0.5, h]])?;
        let hole_vertices: Vec<[f64; 2]> =
            v.iter().map(|p| [g[0] + epsilon * (p[0] - g[0]), g[1] + epsilon * (p[1] - g[1])]).collect();
        let hole = convex_polygon(&hole_vertices)?;
        let env = Environment::new(
            dvector![0.0, 0.0],
            dvector![1.0, h],
            vec![
                ConvexObstacle::Polytope(left),
                ConvexObstacle::Polytope(right),
                ConvexObstacle::Polytope(hole.clone()),
            ],
        )?;
        Ok(Self {
            epsilon,
            env,
            vertices: v.map(|p| dvector![p[0], p[1]]),
            centroid: dvector![g[0], g[1]],
            hole,
        })
    }

    pub fn enclosure_guaranteed(&self) -> bool {
        self.epsilon <= hole_enclosure_threshold()
    }

    /// Barycentric coordinates with respect to the outer triangle.
    pub fn barycentric(&self, p: &Point) -> [f64; 3] {
        let h = 3.0f64.sqrt() / 2.0;
        let l2 = p[1] / h;
        let l1 = p[0] - 0.5 * l2;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Trapezoid `{λ_C ≤ t}` below the hole.
    pub fn in_trapezoid(&self, p: &Point, t: f64) -> bool {
        let l = self.barycentric(p);
        l.iter().all(|&x| x >= 0.0) && l[2] <= t
    }

    /// Union of the three corner parallelograms `{λ_j ≤ t, λ_k ≤ t}`.
    pub fn in_parallelograms(&self, p: &Point, t: f64) -> bool {
        let l = self.barycentric(p);
        l.iter().all(|&x| x >= 0.0) && (0..3).any(|i| (0..3).filter(|&j| j != i).all(|j| l[j] <= t))
    }

    /// `(1 − ε)/3`, the barycentric level of the hole's edges.
    pub fn hole_level(&self) -> f64 {
        (1.0 - self.epsilon) / 3.0
    }

    /// Free area as a fraction of the outer triangle.
    pub fn free_fraction(&self) -> f64 {
        1.0 - self.epsilon * self.epsilon
    }
}
