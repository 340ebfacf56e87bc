//! Exact maximum cliques, greedy truncated clique covers and hole-free
//! cliques.

mod no_holes;
mod search;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::visibility::VisibilityGraph;
use crate::{Error, Result};

pub use no_holes::{max_clique_no_holes, max_clique_no_holes_with, NoHolesOptions, NoHolesOutcome};
pub use search::Implication;

/// Wall-clock budget for a single maximum-clique solve.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(60);

/// Sorted vertex indices of a clique.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clique {
    vertices: Vec<usize>,
}

impl Clique {
    /// Validates that `vertices` are pairwise adjacent in `g`.
    pub fn new(g: &VisibilityGraph, mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&v) = vertices.iter().find(|&&v| v >= g.len()) {
            return Err(Error::InvalidInput(format!("vertex {v} out of range")));
        }
        for (a, &i) in vertices.iter().enumerate() {
            for &j in &vertices[a + 1..] {
                if !g.has_edge(i, j) {
                    return Err(Error::InvalidInput(format!("vertices {i} and {j} are not adjacent")));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCover {
    pub cliques: Vec<Clique>,
    pub residual: Vec<usize>,
}

/// Maximum clique with the lexicographically smallest vertex set among ties.
pub fn max_clique(g: &VisibilityGraph) -> Result<Clique> {
    max_clique_with_budget(g, DEFAULT_TIME_BUDGET)
}

pub fn max_clique_with_budget(g: &VisibilityGraph, budget: Duration) -> Result<Clique> {
    if g.is_empty() {
        return Err(Error::InvalidInput("maximum clique of an empty graph".into()));
    }
    Ok(Clique::from_sorted(search::max_clique_search(g, &[], None, budget)?))
}

/// Largest clique satisfying every implication; empty if none does.
pub fn max_clique_subject_to(g: &VisibilityGraph, cuts: &[Implication], budget: Duration) -> Result<Clique> {
    for cut in cuts {
        if cut.conclusion >= g.len() || cut.premise.iter().any(|&v| v >= g.len()) {
            return Err(Error::InvalidInput("implication refers to a missing vertex".into()));
        }
    }
    Ok(Clique::from_sorted(search::max_clique_search(g, cuts, None, budget)?))
}

/// Greedily extracts maximum cliques until the largest remaining one has
/// fewer than `s_min` vertices.
pub fn truncated_clique_cover(g: &VisibilityGraph, s_min: usize) -> Result<CliqueCover> {
    truncated_clique_cover_with_budget(g, s_min, DEFAULT_TIME_BUDGET)
}

pub fn truncated_clique_cover_with_budget(g: &VisibilityGraph, s_min: usize, budget: Duration) -> Result<CliqueCover> {
    if s_min == 0 {
        return Err(Error::InvalidInput("s_min must be at least 1".into()));
    }
    let mut remaining: Vec<usize> = (0..g.len()).collect();
    let mut cliques = Vec::new();
    while remaining.len() >= s_min {
        let sub = g.induced(&remaining);
        let local = search::max_clique_search(&sub, &[], None, budget)?;
        if local.len() < s_min {
            break;
        }
        let picked: Vec<usize> = local.iter().map(|&i| remaining[i]).collect();
        remaining.retain(|v| picked.binary_search(v).is_err());
        cliques.push(Clique::from_sorted(picked));
    }
    Ok(CliqueCover { cliques, residual: remaining })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn graph(k: usize, edges: &[(usize, usize)]) -> VisibilityGraph {
        VisibilityGraph::from_edges(k, edges, vec![]).unwrap()
    }

    pub(crate) fn random_graph(k: usize, p: f64, seed: u64) -> VisibilityGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        graph(k, &edges)
    }

    /// Lexicographically smallest maximum clique by subset enumeration.
    fn brute_force(g: &VisibilityGraph) -> Vec<usize> {
        let k = g.len();
        let mut best: Vec<usize> = vec![];
        for mask in 1u32..(1 << k) {
            let set: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            let is_clique = set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| g.has_edge(i, j)));
            if is_clique && (set.len() > best.len() || (set.len() == best.len() && set < best)) {
                best = set;
            }
        }
        best
    }

    fn cycle(k: usize) -> VisibilityGraph {
        graph(k, &(0..k).map(|i| (i, (i + 1) % k)).collect::<Vec<_>>())
    }

    fn complete(k: usize) -> VisibilityGraph {
        graph(k, &(0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect::<Vec<_>>())
    }

    #[test]
    fn triangle() {
        assert_eq!(max_clique(&complete(3)).unwrap().vertices(), &[0, 1, 2]);
    }

    #[test]
    fn five_cycle_picks_first_edge() {
        assert_eq!(max_clique(&cycle(5)).unwrap().vertices(), &[0, 1]);
    }

    #[test]
    fn isolated_vertices() {
        assert_eq!(max_clique(&graph(4, &[])).unwrap().vertices(), &[0]);
        assert_eq!(max_clique(&graph(4, &[(2, 3)])).unwrap().vertices(), &[2, 3]);
    }

    #[test]
    fn erdos_renyi_matches_brute_force() {
        let g = random_graph(15, 0.5, 2024);
        assert_eq!(max_clique(&g).unwrap().vertices(), brute_force(&g).as_slice());
    }

    #[test]
    fn many_random_graphs_match_brute_force_exactly() {
        for seed in 0..60u64 {
            let p = [0.2, 0.5, 0.8][seed as usize % 3];
            let g = random_graph(6 + (seed as usize % 11), p, seed);
            assert_eq!(max_clique(&g).unwrap().vertices(), brute_force(&g).as_slice(), "seed {seed}");
        }
    }

    #[test]
    fn complete_graph_cover() {
        let c = truncated_clique_cover(&complete(10), 3).unwrap();
        assert_eq!(c.cliques.len(), 1);
        assert_eq!(c.cliques[0].len(), 10);
        assert!(c.residual.is_empty());
    }

    #[test]
    fn joined_k4_cover() {
        let mut edges = vec![];
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((3, 4));
        let c = truncated_clique_cover(&graph(8, &edges), 3).unwrap();
        assert_eq!(c.cliques.iter().map(|c| c.vertices().to_vec()).collect::<Vec<_>>(), vec![
            vec![0, 1, 2, 3],
            vec![4, 5, 6, 7]
        ]);
        assert!(c.residual.is_empty());
    }

    #[test]
    fn five_cycle_cover_is_empty() {
        let c = truncated_clique_cover(&cycle(5), 3).unwrap();
        assert!(c.cliques.is_empty());
        assert_eq!(c.residual, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn cuts_force_and_forbid() {
        let g = complete(4);
        // {0,1} ⇒ 2 and {0,1,2} ⇒ 3 leave the full clique admissible.
        let cuts = vec![
            Implication { premise: vec![0, 1], conclusion: 2 },
            Implication { premise: vec![0, 1, 2], conclusion: 3 },
        ];
        assert_eq!(max_clique_subject_to(&g, &cuts, DEFAULT_TIME_BUDGET).unwrap().len(), 4);
        // On a path 0-1-2 plus a triangle 3-4-5, forbid the triangle's edges.
        let g = graph(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (3, 5)]);
        let cuts = vec![
            Implication { premise: vec![3, 4], conclusion: 0 },
            Implication { premise: vec![3, 5], conclusion: 0 },
            Implication { premise: vec![4, 5], conclusion: 0 },
        ];
        assert_eq!(max_clique_subject_to(&g, &cuts, DEFAULT_TIME_BUDGET).unwrap().vertices(), &[0, 1]);
    }

    #[test]
    fn timeout_is_reported() {
        let g = random_graph(200, 0.9, 1);
        assert!(matches!(max_clique_with_budget(&g, Duration::ZERO), Err(Error::Timeout { .. })));
    }
}
