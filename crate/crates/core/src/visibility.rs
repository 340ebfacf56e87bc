//! Uniform sampling of uncovered free space and visibility graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::geometry::{ConvexObstacle, Environment, HPolytope, Point, SegmentCheck};
use crate::{Error, Result, GEOM_TOL};

/// Consecutive rejections allowed per requested sample before the sampler
/// reports saturation.
pub const REJECTIONS_PER_SAMPLE: u64 = 10_000;

/// Deterministic generator for `(seed, stream)`; distinct streams never
/// overlap.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Whether `q` lies in any of the regions.
pub fn covered(regions: &[HPolytope], q: &Point) -> bool {
    regions.iter().any(|r| r.contains_with_tol(q, GEOM_TOL))
}

/// `k` i.i.d. uniform samples of the free space outside every region.
pub fn sample_free_uncovered(env: &Environment, regions: &[HPolytope], k: usize, seed: u64) -> Result<Vec<Point>> {
    sample_free_uncovered_with(env, regions, k, &mut seeded_rng(seed, 0))
}

pub fn sample_free_uncovered_with<R: Rng + ?Sized>(
    env: &Environment,
    regions: &[HPolytope],
    k: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if k == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    for r in regions {
        if r.dim() != env.dimension() {
            return Err(Error::DimensionMismatch { expected: env.dimension(), found: r.dim() });
        }
    }
    let budget = REJECTIONS_PER_SAMPLE * k as u64;
    let mut out = Vec::with_capacity(k);
    let mut rejections = 0u64;
    while out.len() < k {
        let q = env.sample_domain(rng);
        if env.is_free(&q) && !covered(regions, &q) {
            out.push(q);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= budget {
                return Err(Error::CoverageSaturated { rejections });
            }
        }
    }
    Ok(out)
}

/// Sampled free configurations with a symmetric, irreflexive adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct VisibilityGraph {
    points: Vec<Point>,
    adjacency: Vec<BitSet>,
}

impl VisibilityGraph {
    /// Purely combinatorial graph; `points` may be empty.
    pub fn from_edges(k: usize, edges: &[(usize, usize)], points: Vec<Point>) -> Result<Self> {
        if !points.is_empty() && points.len() != k {
            return Err(Error::InvalidInput(format!("graph has {k} vertices but {} points", points.len())));
        }
        let mut adjacency = vec![BitSet::new(k); k];
        for &(i, j) in edges {
            if i >= k || j >= k {
                return Err(Error::InvalidInput(format!("edge ({i}, {j}) out of range for {k} vertices")));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop at vertex {i}")));
            }
            adjacency[i].insert(j);
            adjacency[j].insert(i);
        }
        Ok(Self { points, adjacency })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn has_points(&self) -> bool {
        !self.points.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &BitSet {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BitSet::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.adjacency[i].iter().filter(move |&j| j > i).map(move |j| (i, j)))
            .collect()
    }

    /// Subgraph induced by `vertices`, relabeled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> VisibilityGraph {
        let k = vertices.len();
        let mut adjacency = vec![BitSet::new(k); k];
        for (a, &va) in vertices.iter().enumerate() {
            for (b, &vb) in vertices.iter().enumerate().skip(a + 1) {
                if self.has_edge(va, vb) {
                    adjacency[a].insert(b);
                    adjacency[b].insert(a);
                }
            }
        }
        let points = if self.has_points() { vertices.iter().map(|&v| self.points[v].clone()).collect() } else { vec![] };
        VisibilityGraph { points, adjacency }
    }

    pub fn to_dump(&self) -> GraphDump {
        GraphDump {
            k: self.len(),
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
            points: self.has_points().then(|| self.points.iter().map(|p| p.iter().copied().collect()).collect()),
        }
    }

    pub fn from_dump(dump: &GraphDump) -> Result<Self> {
        let edges: Vec<(usize, usize)> = dump.edges.iter().map(|e| (e[0], e[1])).collect();
        let points = dump
            .points
            .as_ref()
            .map(|ps| ps.iter().map(|p| Point::from_column_slice(p)).collect())
            .unwrap_or_default();
        Self::from_edges(dump.k, &edges, points)
    }
}

/// JSON adjacency dump: `{"K": ..., "edges": [[i, j], ...]}` plus optional
/// vertex coordinates.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphDump {
    #[serde(rename = "K")]
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

/// Visibility graph over free points; edge `{i, j}` iff the segment is free.
pub fn build_visibility_graph(env: &Environment, points: &[Point]) -> Result<VisibilityGraph> {
    build_visibility_graph_with(env, points, SegmentCheck::Exact)
}

pub fn build_visibility_graph_with(env: &Environment, points: &[Point], mode: SegmentCheck) -> Result<VisibilityGraph> {
    for (i, p) in points.iter().enumerate() {
        if !env.point_in_free_space(p)? {
            return Err(Error::InCollision(format!("visibility vertex {i} is not collision-free")));
        }
    }
    let k = points.len();
    let oracle = SegmentOracle::new(env, points);
    let rows: Vec<Vec<usize>> = (0..k)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..k)
                .filter(|&j| match mode {
                    SegmentCheck::Exact => oracle.visible(i, j),
                    SegmentCheck::Sampled { .. } => env.segment_free_unchecked(&points[i], &points[j], mode),
                })
                .collect()
        })
        .collect();
    let mut adjacency = vec![BitSet::new(k); k];
    for (i, row) in rows.into_iter().enumerate() {
        for j in row {
            adjacency[i].insert(j);
            adjacency[j].insert(i);
        }
    }
    Ok(VisibilityGraph { points: points.to_vec(), adjacency })
}

/// Exact segment tests over a fixed point set, with every face value
/// `aᵢᵀp` precomputed so each pair costs one pass over the faces.
struct SegmentOracle<'a> {
    n: usize,
    coords: Vec<f64>,
    boxes: &'a [(Point, Point)],
    shapes: Vec<OracleShape>,
}

enum OracleShape {
    /// Face values per point (row-major, `faces` per point) and `b + tol`.
    Polytope { faces: usize, values: Vec<f64>, rhs: Vec<f64> },
    Sphere { center: Vec<f64>, radius: f64 },
}

impl<'a> SegmentOracle<'a> {
    fn new(env: &'a Environment, points: &[Point]) -> Self {
        let n = env.dimension();
        let coords: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
        let shapes = env
            .obstacles()
            .iter()
            .map(|o| match o {
                ConvexObstacle::Polytope(p) => {
                    let a = p.a();
                    let faces = p.num_faces();
                    let mut values = Vec::with_capacity(points.len() * faces);
                    for q in points {
                        for f in 0..faces {
                            let mut s = 0.0;
                            for c in 0..n {
                                s += a[(f, c)] * q[c];
                            }
                            values.push(s);
                        }
                    }
                    let rhs = p.b().iter().map(|b| b + GEOM_TOL).collect();
                    OracleShape::Polytope { faces, values, rhs }
                }
                ConvexObstacle::Sphere { center, radius } => {
                    OracleShape::Sphere { center: center.iter().copied().collect(), radius: *radius }
                }
            })
            .collect();
        Self { n, coords, boxes: env.obstacle_boxes(), shapes }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    fn visible(&self, i: usize, j: usize) -> bool {
        let (p, q) = (self.point(i), self.point(j));
        for (shape, (lo, hi)) in self.shapes.iter().zip(self.boxes) {
            let outside_box = (0..self.n).any(|c| p[c].max(q[c]) < lo[c] || p[c].min(q[c]) > hi[c]);
            if !outside_box && Self::hits(shape, p, q, i, j) {
                return false;
            }
        }
        true
    }

    /// Same closed-segment semantics as `ConvexObstacle::segment_hits`.
    fn hits(shape: &OracleShape, p: &[f64], q: &[f64], i: usize, j: usize) -> bool {
        match shape {
            OracleShape::Polytope { faces, values, rhs } => {
                let (vi, vj) = (&values[i * faces..(i + 1) * faces], &values[j * faces..(j + 1) * faces]);
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for f in 0..*faces {
                    let num = rhs[f] - vi[f];
                    let den = vj[f] - vi[f];
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
            OracleShape::Sphere { center, radius } => {
                let (mut len2, mut proj) = (0.0, 0.0);
                for c in 0..p.len() {
                    let d = q[c] - p[c];
                    len2 += d * d;
                    proj += (center[c] - p[c]) * d;
                }
                let t = if len2 > 0.0 { (proj / len2).clamp(0.0, 1.0) } else { 0.0 };
                let mut dist2 = 0.0;
                for c in 0..p.len() {
                    let x = p[c] + t * (q[c] - p[c]) - center[c];
                    dist2 += x * x;
                }
                dist2.sqrt() <= radius + GEOM_TOL
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexObstacle;
    use nalgebra::dvector;

    fn sphere_env() -> Environment {
        Environment::new(
            dvector![0.0, 0.0],
            dvector![3.0, 3.0],
            vec![ConvexObstacle::sphere(dvector![1.5, 1.5], 0.5).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn samples_stay_in_box() {
        let env = Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], vec![]).unwrap();
        let pts = sample_free_uncovered(&env, &[], 100, 1).unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|p| (0..2).all(|i| (0.0..=1.0).contains(&p[i]))));
    }

    #[test]
    fn fully_covered_space_saturates() {
        let env = Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], vec![]).unwrap();
        let cover = HPolytope::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(matches!(
            sample_free_uncovered(&env, &[cover], 10, 3),
            Err(Error::CoverageSaturated { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let env = sphere_env();
        assert_eq!(sample_free_uncovered(&env, &[], 50, 9).unwrap(), sample_free_uncovered(&env, &[], 50, 9).unwrap());
        assert_ne!(sample_free_uncovered(&env, &[], 50, 9).unwrap(), sample_free_uncovered(&env, &[], 50, 10).unwrap());
    }

    #[test]
    fn right_half_mean() {
        // Uniform on [1,2]x[0,1]: mean x = 1.5, σ_x = 1/√12, so 3σ/√K ≈ 0.0087.
        let env = Environment::new(
            dvector![0.0, 0.0],
            dvector![2.0, 1.0],
            vec![ConvexObstacle::aabb(&[0.0, 0.0], &[1.0, 1.0]).unwrap()],
        )
        .unwrap();
        let pts = sample_free_uncovered(&env, &[], 10_000, 4).unwrap();
        let mean = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
        assert!((mean - 1.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn collinear_points_form_triangle() {
        let env = Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], vec![]).unwrap();
        let pts = vec![dvector![0.1, 0.1], dvector![0.5, 0.5], dvector![0.9, 0.9]];
        let g = build_visibility_graph(&env, &pts).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn sphere_blocks_middle_row() {
        let env = sphere_env();
        let g = build_visibility_graph(&env, &[dvector![0.2, 0.5], dvector![2.8, 0.5]]).unwrap();
        assert!(g.has_edge(0, 1));
        let g = build_visibility_graph(&env, &[dvector![0.2, 1.5], dvector![2.8, 1.5]]).unwrap();
        assert!(!g.has_edge(0, 1));
    }

    #[test]
    fn non_free_vertex_rejected() {
        let env = sphere_env();
        assert!(build_visibility_graph(&env, &[dvector![1.5, 1.5]]).is_err());
    }

    #[test]
    fn oracle_agrees_with_obstacle_tests() {
        let env = crate::scenes::random_scene(5);
        let pts = sample_free_uncovered(&env, &[], 150, 8).unwrap();
        let g = build_visibility_graph(&env, &pts).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let direct = !env.obstacles().iter().any(|o| o.segment_hits(&pts[i], &pts[j]));
                assert_eq!(g.has_edge(i, j), direct, "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn dump_round_trip() {
        let env = sphere_env();
        let pts = sample_free_uncovered(&env, &[], 20, 2).unwrap();
        let g = build_visibility_graph(&env, &pts).unwrap();
        let s = serde_json::to_string(&g.to_dump()).unwrap();
        let back = VisibilityGraph::from_dump(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(g, back);
    }
}
