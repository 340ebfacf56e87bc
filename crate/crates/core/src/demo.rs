//! Maximum cliques in the triangle-with-hole scene.

use serde::Serialize;

use crate::cliques::{max_clique, max_clique_no_holes_with, Clique, NoHolesOptions};
use crate::geometry::Point;
use crate::numopt::separating_hyperplane;
use crate::render::{convex_hull_2d, SvgCanvas};
use crate::scenes::TriangleScene;
use crate::visibility::{build_visibility_graph, sample_free_uncovered, VisibilityGraph};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct TriangleDemo {
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
    /// Whether `ε ≤ 1 − √(5/6)`, below which dense maximum cliques must
    /// enclose the hole.
    pub enclosure_guaranteed: bool,
    pub unconstrained: Clique,
    pub constrained: Clique,
    pub unconstrained_encloses_hole: bool,
    pub constrained_encloses_hole: bool,
    pub candidates_examined: usize,
    #[serde(skip)]
    pub scene: TriangleScene,
    #[serde(skip)]
    pub graph: VisibilityGraph,
}

/// Whether the hull of `members` contains `target`.
pub fn hull_contains(points: &[Point], members: &Clique, target: &Point) -> Result<bool> {
    let hull: Vec<Point> = members.vertices().iter().map(|&i| points[i].clone()).collect();
    Ok(separating_hyperplane(target, &hull)?.is_none())
}

pub fn triangle_demo(epsilon: f64, samples: usize, seed: u64) -> Result<TriangleDemo> {
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let scene = TriangleScene::new(epsilon)?;
    let points = sample_free_uncovered(&scene.env, &[], samples, seed)?;
    let graph = build_visibility_graph(&scene.env, &points)?;
    let unconstrained = max_clique(&graph)?;
    let outcome = max_clique_no_holes_with(&graph, &NoHolesOptions::default())?;
    let constrained = outcome.clique;
    if constrained.len() > unconstrained.len() {
        return Err(Error::Numerical("hole-free clique larger than the maximum clique".into()));
    }
    Ok(TriangleDemo {
        epsilon,
        samples,
        seed,
        enclosure_guaranteed: scene.enclosure_guaranteed(),
        unconstrained_encloses_hole: hull_contains(&points, &unconstrained, &scene.centroid)?,
        constrained_encloses_hole: hull_contains(&points, &constrained, &scene.centroid)?,
        unconstrained,
        constrained,
        candidates_examined: outcome.candidates,
        scene,
        graph,
    })
}

impl TriangleDemo {
    /// Scene with the unconstrained clique and its hull in red, the
    /// hole-free clique in green.
    pub fn to_svg(&self) -> Result<String> {
        let mut canvas = SvgCanvas::new(&self.scene.env)?;
        let pts = self.graph.points();
        for (clique, color) in [(&self.unconstrained, "#d02020"), (&self.constrained, "#20a040")] {
            let members: Vec<[f64; 2]> = clique.vertices().iter().map(|&i| [pts[i][0], pts[i][1]]).collect();
            canvas.polygon(&convex_hull_2d(&members), color, 0.2, Some(color));
        }
        canvas.obstacles(&self.scene.env)?;
        canvas.points(pts, "#808080", 2.0);
        for (clique, color) in [(&self.unconstrained, "#d02020"), (&self.constrained, "#20a040")] {
            let members: Vec<Point> = clique.vertices().iter().map(|&i| pts[i].clone()).collect();
            canvas.points(&members, color, 3.0);
        }
        Ok(canvas.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_demo_invariants() {
        let d = triangle_demo(0.05, 40, 1).unwrap();
        assert!(d.constrained.len() <= d.unconstrained.len());
        assert!(!d.constrained_encloses_hole);
        assert!(d.to_svg().unwrap().contains("#20a040"));
    }
}
