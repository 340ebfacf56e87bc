//! Maximum cliques whose convex hull contains no non-member vertex.
//!
//! Lazy enumeration: solve the constrained maximum clique, test every
//! non-member for strict separability from the hull, and for each
//! inseparable vertex `q` add the implication `support ⊆ C ⇒ q ∈ C`, where
//! `support` is a set of at most `n + 1` members whose hull holds `q`. Any
//! clique violating such an implication has `q` inside its hull, so no
//! admissible clique is ever cut off. Planar inputs additionally enforce
//! hull closure inside the search, so the first candidate is usually
//! admissible and the cuts only mop up boundary cases.

use std::time::Duration;

use super::search::{max_clique_search, Implication};
use super::{Clique, DEFAULT_TIME_BUDGET};
use crate::geometry::Point;
use crate::numopt::{hull_weights, separating_hyperplane};
use crate::visibility::VisibilityGraph;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct NoHolesOptions {
    /// Big-M constant of the mixed-integer separability formulation.
    /// Defaults to ten times the point-set diameter.
    pub big_m: Option<f64>,
    /// Maximum number of candidate cliques examined.
    pub max_candidates: usize,
    /// Budget per maximum-clique solve.
    pub time_budget: Duration,
}

impl Default for NoHolesOptions {
    fn default() -> Self {
        Self { big_m: None, max_candidates: 10_000, time_budget: DEFAULT_TIME_BUDGET }
    }
}

#[derive(Clone, Debug)]
pub struct NoHolesOutcome {
    pub clique: Clique,
    /// Candidates examined, including the returned one.
    pub candidates: usize,
    pub cuts: Vec<Implication>,
    pub big_m: f64,
}

pub fn max_clique_no_holes(g: &VisibilityGraph, big_m: Option<f64>) -> Result<Clique> {
    let opts = NoHolesOptions { big_m, ..NoHolesOptions::default() };
    Ok(max_clique_no_holes_with(g, &opts)?.clique)
}

pub fn max_clique_no_holes_with(g: &VisibilityGraph, opts: &NoHolesOptions) -> Result<NoHolesOutcome> {
    solve(g, opts, true)
}

fn solve(g: &VisibilityGraph, opts: &NoHolesOptions, planar_closure: bool) -> Result<NoHolesOutcome> {
    if g.is_empty() {
        return Err(Error::InvalidInput("maximum clique of an empty graph".into()));
    }
    if !g.has_points() {
        return Err(Error::InvalidInput("hole-free cliques need vertex coordinates".into()));
    }
    let points = g.points();
    let diameter = diameter(points);
    let big_m = match opts.big_m {
        Some(l) if !(l.is_finite() && l > 0.0) => {
            return Err(Error::InvalidInput(format!("big-M constant must be positive, got {l}")));
        }
        Some(l) => l,
        None => 10.0 * diameter.max(f64::MIN_POSITIVE),
    };

    let plane: Option<Vec<[f64; 2]>> = (planar_closure && points[0].len() == 2).then(|| points.iter().map(|p| [p[0], p[1]]).collect());
    let mut cuts: Vec<Implication> = Vec::new();
    for round in 1..=opts.max_candidates {
        let members = max_clique_search(g, &cuts, plane.as_deref(), opts.time_budget)?;
        if members.is_empty() {
            return Err(Error::Numerical("implication cuts excluded every clique".into()));
        }
        let new_cuts = hole_cuts(points, &members)?;
        if new_cuts.is_empty() {
            return Ok(NoHolesOutcome { clique: Clique::from_sorted(members), candidates: round, cuts, big_m });
        }
        log::debug!("candidate {round}: {} vertices, {} enclosed non-members", members.len(), new_cuts.len());
        cuts.extend(new_cuts);
    }
    Err(Error::EnumerationBudget { budget: opts.max_candidates, best: None })
}

fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Implications for every non-member inside the hull of `members`.
fn hole_cuts(points: &[Point], members: &[usize]) -> Result<Vec<Implication>> {
    let hull: Vec<Point> = members.iter().map(|&i| points[i].clone()).collect();
    let n = points[0].len();
    let mut lo = hull[0].clone();
    let mut hi = hull[0].clone();
    for p in &hull {
        for j in 0..n {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    let mut cuts = Vec::new();
    for (q_idx, q) in points.iter().enumerate() {
        if members.binary_search(&q_idx).is_ok() {
            continue;
        }
        // Outside the bounding box means trivially separable.
        if (0..n).any(|j| q[j] < lo[j] || q[j] > hi[j]) {
            continue;
        }
        if separating_hyperplane(q, &hull)?.is_some() {
            continue;
        }
        let premise = match hull_weights(q, &hull)? {
            Some(w) => {
                let mut s: Vec<usize> = w.iter().map(|&(k, _)| members[k]).collect();
                s.sort_unstable();
                s
            }
            // On the hull boundary within tolerance: exclude this exact set.
            None => members.to_vec(),
        };
        cuts.push(Implication { premise, conclusion: q_idx });
    }
    Ok(cuts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::max_clique;
    use nalgebra::dvector;

    fn geometric(points: Vec<Point>, edges: &[(usize, usize)]) -> VisibilityGraph {
        VisibilityGraph::from_edges(points.len(), edges, points).unwrap()
    }

    #[test]
    fn admissible_max_clique_is_unchanged() {
        let pts = vec![dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.0, 1.0], dvector![5.0, 5.0]];
        let g = geometric(pts, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(max_clique_no_holes(&g, None).unwrap(), max_clique(&g).unwrap());
    }

    #[test]
    fn square_with_center_hole() {
        // Corners form K4; the interior point sees only corner 0.
        let pts = vec![
            dvector![0.0, 0.0],
            dvector![1.0, 0.0],
            dvector![1.0, 1.0],
            dvector![0.0, 1.0],
            dvector![0.3, 0.4],
        ];
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)];
        let g = geometric(pts.clone(), &edges);
        assert_eq!(max_clique(&g).unwrap().vertices(), &[0, 1, 2, 3]);
        assert!(separating_hyperplane(&pts[4], &pts[..4]).unwrap().is_none());
        let c = max_clique_no_holes(&g, None).unwrap();
        assert_eq!(c.len(), 3);
        let hull: Vec<Point> = c.vertices().iter().map(|&i| pts[i].clone()).collect();
        for q in (0..5).filter(|&q| !c.contains(q)) {
            assert!(separating_hyperplane(&pts[q], &hull).unwrap().is_some());
        }
        // {0,1,2} is the lexicographically first triangle missing (0.3, 0.4).
        assert_eq!(c.vertices(), &[0, 1, 2]);
    }

    /// Largest admissible clique by exhaustion, lexicographically smallest
    /// among ties.
    fn brute_force(g: &VisibilityGraph) -> Vec<usize> {
        let pts = g.points();
        let n = g.len();
        let mut best: Vec<usize> = vec![];
        for mask in 1u32..(1 << n) {
            let c: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if c.len() < best.len() || !c.iter().all(|&a| c.iter().all(|&b| a == b || g.has_edge(a, b))) {
                continue;
            }
            let hull: Vec<Point> = c.iter().map(|&i| pts[i].clone()).collect();
            let admissible = (0..n)
                .filter(|q| !c.contains(q))
                .all(|q| separating_hyperplane(&pts[q], &hull).unwrap().is_some());
            if admissible && (c.len() > best.len() || c < best) {
                best = c;
            }
        }
        best
    }

    #[test]
    fn matches_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        for seed in 0..25u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 11;
            let pts: Vec<Point> = (0..n).map(|_| dvector![rng.random::<f64>(), rng.random::<f64>()]).collect();
            let mut edges = vec![];
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < 0.8 {
                        edges.push((i, j));
                    }
                }
            }
            let g = geometric(pts, &edges);
            let expected = brute_force(&g);
            let opts = NoHolesOptions::default();
            assert_eq!(solve(&g, &opts, true).unwrap().clique.vertices(), expected.as_slice(), "seed {seed}");
            assert_eq!(solve(&g, &opts, false).unwrap().clique.vertices(), expected.as_slice(), "seed {seed}");
        }
    }

    #[test]
    fn big_m_is_validated() {
        let g = geometric(vec![dvector![0.0], dvector![1.0]], &[(0, 1)]);
        assert!(max_clique_no_holes(&g, Some(-1.0)).is_err());
        let out = max_clique_no_holes_with(&g, &NoHolesOptions::default()).unwrap();
        assert!((out.big_m - 10.0).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports() {
        let pts = vec![dvector![0.0], dvector![2.0], dvector![1.0]];
        let g = geometric(pts, &[(0, 1)]);
        let opts = NoHolesOptions { max_candidates: 1, ..Default::default() };
        assert!(matches!(max_clique_no_holes_with(&g, &opts), Err(Error::EnumerationBudget { budget: 1, .. })));
    }
}
