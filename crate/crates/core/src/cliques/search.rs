//! Exact maximum-clique branch and bound over bitsets.
//!
//! Phase one finds the clique number with greedy-coloring bounds on a
//! degeneracy-ordered relabeling. Phase two recovers the lexicographically
//! smallest clique of that size by include-first search over the original
//! vertex order, which visits equal-size cliques in lexicographic order.
//!
//! Both phases honor implication cuts `premise ⊆ C ⇒ conclusion ∈ C`, used
//! by the hole-free clique enumeration. Cuts are propagated at every node:
//! once a premise is inside the current clique its conclusion is forced in,
//! or the node is pruned if the conclusion can no longer be added.
//!
//! For planar vertex coordinates the search can also enforce hull closure
//! directly: a vertex strictly inside the hull of the current clique is
//! forced in, and a candidate whose addition would swallow an excluded
//! vertex is dropped.

use std::time::{Duration, Instant};

use crate::bitset::BitSet;
use crate::render::convex_hull_2d;
use crate::visibility::VisibilityGraph;
use crate::{Error, Result};

/// `premise ⊆ C ⇒ conclusion ∈ C`, in original vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implication {
    pub premise: Vec<usize>,
    pub conclusion: usize,
}

struct Cut {
    premise: BitSet,
    members: Vec<usize>,
    conclusion: usize,
}

impl Cut {
    fn new(n: usize, members: Vec<usize>, conclusion: usize) -> Self {
        Self { premise: relabel_set(n, members.iter().copied()), members, conclusion }
    }
}

pub(crate) struct Search<'a> {
    adj: &'a [BitSet],
    cuts: Vec<Cut>,
    plane: Option<Vec<[f64; 2]>>,
    deadline: Instant,
    budget: Duration,
    nodes: u64,
}

pub(crate) fn max_clique_search(
    g: &VisibilityGraph,
    implications: &[Implication],
    plane: Option<&[[f64; 2]]>,
    budget: Duration,
) -> Result<Vec<usize>> {
    let n = g.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let deadline = Instant::now() + budget;

    // Phase one on a relabeled copy.
    let order = degeneracy_order(g);
    let mut position = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let relabeled: Vec<BitSet> = order
        .iter()
        .map(|&old| {
            let mut row = BitSet::new(n);
            for nb in g.neighbors(old).iter() {
                row.insert(position[nb]);
            }
            row
        })
        .collect();
    let cuts_relabeled = implications
        .iter()
        .map(|imp| Cut::new(n, imp.premise.iter().map(|&v| position[v]).collect(), position[imp.conclusion]))
        .collect();
    let plane1 = plane.map(|pts| order.iter().map(|&old| pts[old]).collect());
    let mut phase1 = Search { adj: &relabeled, cuts: cuts_relabeled, plane: plane1, deadline, budget, nodes: 0 };
    let mut best = BitSet::new(n);
    let mut best_len = 0usize;
    phase1.expand(BitSet::new(n), 0, BitSet::full(n), &mut best, &mut best_len)?;
    if best_len == 0 {
        // Every clique violates a cut, including all singletons.
        return Ok(vec![]);
    }

    // Phase two in original labels.
    let adj: Vec<BitSet> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let cuts = implications
        .iter()
        .map(|imp| Cut::new(n, imp.premise.clone(), imp.conclusion))
        .collect();
    let mut phase2 = Search { adj: &adj, cuts, plane: plane.map(<[_]>::to_vec), deadline, budget, nodes: 0 };
    let found = phase2
        .lex_first(BitSet::new(n), 0, BitSet::full(n), best_len)?
        .ok_or_else(|| Error::Numerical("clique of optimal size not recovered".into()))?;
    Ok(found.iter().collect())
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

const ORIENT_TOL: f64 = 1e-12;

/// Strictly inside a counter-clockwise convex polygon.
fn strictly_inside_polygon(hull: &[[f64; 2]], u: [f64; 2]) -> bool {
    (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], u) > ORIENT_TOL)
}

fn strictly_inside_triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2], u: [f64; 2]) -> bool {
    let (d1, d2, d3) = (cross(a, b, u), cross(b, c, u), cross(c, a, u));
    (d1 > ORIENT_TOL && d2 > ORIENT_TOL && d3 > ORIENT_TOL) || (d1 < -ORIENT_TOL && d2 < -ORIENT_TOL && d3 < -ORIENT_TOL)
}

/// Whether `u` lies strictly inside one of the triangles fanning from `v`
/// over the edges of `hull`. Their union is the hull of `hull ∪ {v}`.
fn strictly_inside_fan(hull: &[[f64; 2]], v: [f64; 2], u: [f64; 2]) -> bool {
    match hull.len() {
        0 | 1 => false,
        2 => strictly_inside_triangle(v, hull[0], hull[1], u),
        m => (0..m).any(|i| strictly_inside_triangle(v, hull[i], hull[(i + 1) % m], u)),
    }
}

fn relabel_set(n: usize, items: impl Iterator<Item = usize>) -> BitSet {
    let mut s = BitSet::new(n);
    for v in items {
        s.insert(v);
    }
    s
}

/// Smallest-last ordering reversed, so high-core vertices come first.
fn degeneracy_order(g: &VisibilityGraph) -> Vec<usize> {
    let n = g.len();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("vertex left");
        removed[v] = true;
        order.push(v);
        for nb in g.neighbors(v).iter() {
            if !removed[nb] {
                degree[nb] -= 1;
            }
        }
    }
    order.reverse();
    order
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes & 0xfff == 0 && Instant::now() > self.deadline {
            return Err(Error::Timeout { seconds: self.budget.as_secs_f64() });
        }
        Ok(())
    }

    /// Unit propagation of the cuts. A cut whose premise lies in `r` forces
    /// its conclusion in; a cut whose conclusion can no longer join and whose
    /// premise misses a single candidate removes that candidate. Returns
    /// false if some cut is violated irrecoverably.
    fn propagate(&self, r: &mut BitSet, r_len: &mut usize, p: &mut BitSet) -> bool {
        if !self.hull_closure(r, r_len, p) {
            return false;
        }
        if self.cuts.is_empty() {
            return true;
        }
        loop {
            let mut changed = false;
            for cut in &self.cuts {
                let q = cut.conclusion;
                if r.contains(q) {
                    continue;
                }
                let mut missing = None;
                let mut count = 0;
                for &v in &cut.members {
                    if !r.contains(v) {
                        count += 1;
                        missing = Some(v);
                        if count > 1 {
                            break;
                        }
                    }
                }
                match (count, missing) {
                    (0, _) => {
                        if !p.contains(q) {
                            return false;
                        }
                        r.insert(q);
                        *r_len += 1;
                        p.remove(q);
                        p.intersect_with(&self.adj[q]);
                        changed = true;
                    }
                    (1, Some(v)) if !p.contains(q) && p.contains(v) => {
                        p.remove(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Planar hull closure of `r`. Vertices strictly inside the hull join
    /// `r`, or prune the node if they cannot; candidates whose addition would
    /// put an excluded vertex strictly inside the hull leave `p`.
    fn hull_closure(&self, r: &mut BitSet, r_len: &mut usize, p: &mut BitSet) -> bool {
        let Some(pts) = &self.plane else {
            return true;
        };
        if *r_len < 2 {
            return true;
        }
        let members: Vec<[f64; 2]> = r.iter().map(|v| pts[v]).collect();
        let hull = convex_hull_2d(&members);
        let n = pts.len();
        if hull.len() >= 3 {
            for u in 0..n {
                if !r.contains(u) && strictly_inside_polygon(&hull, pts[u]) {
                    if !p.contains(u) {
                        return false;
                    }
                    r.insert(u);
                    *r_len += 1;
                    p.remove(u);
                    p.intersect_with(&self.adj[u]);
                }
            }
        }
        loop {
            let excluded: Vec<usize> = (0..n).filter(|&u| !r.contains(u) && !p.contains(u)).collect();
            let doomed: Vec<usize> = p
                .iter()
                .filter(|&v| excluded.iter().any(|&u| strictly_inside_fan(&hull, pts[v], pts[u])))
                .collect();
            if doomed.is_empty() {
                return true;
            }
            for v in doomed {
                p.remove(v);
            }
        }
    }

    /// Greedy sequential coloring of `p`; returns vertices grouped by color
    /// class and the color of each.
    fn color(&self, p: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.len());
        let mut colors = Vec::with_capacity(p.len());
        let mut uncolored = p.clone();
        let mut k = 0;
        while !uncolored.is_empty() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                uncolored.remove(v);
                q.remove(v);
                q.difference_with(&self.adj[v]);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn color_bound(&self, p: &BitSet) -> usize {
        let (_, colors) = self.color(p);
        colors.last().copied().unwrap_or(0)
    }

    fn expand(
        &mut self,
        mut r: BitSet,
        mut r_len: usize,
        mut p: BitSet,
        best: &mut BitSet,
        best_len: &mut usize,
    ) -> Result<()> {
        self.tick()?;
        if !self.propagate(&mut r, &mut r_len, &mut p) {
            return Ok(());
        }
        if r_len > *best_len {
            *best = r.clone();
            *best_len = r_len;
        }
        let (order, colors) = self.color(&p);
        for idx in (0..order.len()).rev() {
            if r_len + colors[idx] <= *best_len {
                return Ok(());
            }
            let v = order[idx];
            let mut r2 = r.clone();
            r2.insert(v);
            let p2 = p.intersection(&self.adj[v]);
            self.expand(r2, r_len + 1, p2, best, best_len)?;
            p.remove(v);
            // Excluding v may strand a cut whose premise is already in r.
            if !self.cuts.is_empty() && self.cuts.iter().any(|c| c.conclusion == v && c.premise.is_subset(&r)) {
                return Ok(());
            }
        }
        Ok(())
    }

    /// First clique of size `target` in include-first order over ascending
    /// vertex labels.
    fn lex_first(&mut self, mut r: BitSet, mut r_len: usize, mut p: BitSet, target: usize) -> Result<Option<BitSet>> {
        self.tick()?;
        if !self.propagate(&mut r, &mut r_len, &mut p) {
            return Ok(None);
        }
        if r_len >= target {
            return Ok(Some(r));
        }
        loop {
            if r_len + p.len() < target || r_len + self.color_bound(&p) < target {
                return Ok(None);
            }
            let Some(v) = p.first() else {
                return Ok(None);
            };
            let mut r2 = r.clone();
            r2.insert(v);
            let p2 = p.intersection(&self.adj[v]);
            if let Some(found) = self.lex_first(r2, r_len + 1, p2, target)? {
                return Ok(Some(found));
            }
            p.remove(v);
            if !self.cuts.is_empty() && self.cuts.iter().any(|c| c.conclusion == v && c.premise.is_subset(&r)) {
                return Ok(None);
            }
            self.tick()?;
        }
    }
}
