//! SVG rendering of 2D scenes, regions, visibility graphs and cliques.

use std::fmt::Write as _;

use crate::geometry::{ConvexObstacle, Environment, HPolytope, Point};
use crate::visibility::VisibilityGraph;
use crate::{Error, Result};

const VERTEX_TOL: f64 = 1e-7;

/// Counter-clockwise vertices of a bounded 2D polytope: pairwise face
/// intersections filtered by containment.
pub fn polygon_vertices(p: &HPolytope) -> Result<Vec<[f64; 2]>> {
    if p.dim() != 2 {
        return Err(Error::InvalidInput("render supports 2D only".into()));
    }
    let (a, b) = (p.a(), p.b());
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..p.num_faces() {
        for j in i + 1..p.num_faces() {
            let det = a[(i, 0)] * a[(j, 1)] - a[(i, 1)] * a[(j, 0)];
            let scale = a.row(i).norm() * a.row(j).norm();
            if det.abs() <= 1e-12 * scale {
                continue;
            }
            let x = (b[i] * a[(j, 1)] - b[j] * a[(i, 1)]) / det;
            let y = (a[(i, 0)] * b[j] - a[(j, 0)] * b[i]) / det;
            let q = Point::from_column_slice(&[x, y]);
            if p.contains_with_tol(&q, VERTEX_TOL * (1.0 + x.abs().max(y.abs()))) {
                pts.push([x, y]);
            }
        }
    }
    Ok(convex_hull_2d(&pts))
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup_by(|p, q| (p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Fill color for the `i`-th of many regions.
pub fn palette(i: usize) -> String {
    let hue = (i as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},70%,50%)")
}

pub struct SvgCanvas {
    lower: [f64; 2],
    upper: [f64; 2],
    unit: f64,
    body: String,
}

impl SvgCanvas {
    pub fn new(env: &Environment) -> Result<Self> {
        if env.dimension() != 2 {
            return Err(Error::InvalidInput("render supports 2D only".into()));
        }
        let lower = [env.lower()[0], env.lower()[1]];
        let upper = [env.upper()[0], env.upper()[1]];
        let unit = 0.002 * env.diagonal();
        let mut canvas = Self { lower, upper, unit, body: String::new() };
        let _ = writeln!(
            canvas.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black" stroke-width="{}"/>"#,
            lower[0],
            lower[1],
            upper[0] - lower[0],
            upper[1] - lower[1],
            canvas.unit
        );
        Ok(canvas)
    }

    pub fn obstacles(&mut self, env: &Environment) -> Result<()> {
        for o in env.obstacles() {
            match o {
                ConvexObstacle::Polytope(p) => {
                    let v = polygon_vertices(p)?;
                    self.polygon(&v, "#444444", 1.0, None);
                }
                ConvexObstacle::Sphere { center, radius } => {
                    let _ = writeln!(
                        self.body,
                        r##"<circle cx="{}" cy="{}" r="{}" fill="#444444"/>"##,
                        center[0], center[1], radius
                    );
                }
            }
        }
        Ok(())
    }

    pub fn polygon(&mut self, vertices: &[[f64; 2]], fill: &str, opacity: f64, stroke: Option<&str>) {
        if vertices.is_empty() {
            return;
        }
        let pts: Vec<String> = vertices.iter().map(|v| format!("{},{}", v[0], v[1])).collect();
        let stroke = stroke.map_or(String::new(), |s| format!(r#" stroke="{s}" stroke-width="{}""#, self.unit));
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" fill-opacity="{opacity}"{stroke}/>"#,
            pts.join(" ")
        );
    }

    pub fn region(&mut self, p: &HPolytope, fill: &str, opacity: f64) -> Result<()> {
        let v = polygon_vertices(p)?;
        self.polygon(&v, fill, opacity, Some(fill));
        Ok(())
    }

    /// Edges as lines, vertices as dots.
    pub fn graph(&mut self, g: &VisibilityGraph) -> Result<()> {
        if !g.has_points() {
            return Err(Error::InvalidInput("graph overlay needs vertex coordinates".into()));
        }
        let pts = g.points();
        for (i, j) in g.edges() {
            let _ = writeln!(
                self.body,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#3060c0" stroke-opacity="0.15" stroke-width="{}"/>"##,
                pts[i][0],
                pts[i][1],
                pts[j][0],
                pts[j][1],
                0.5 * self.unit
            );
        }
        self.points(pts, "#3060c0", 2.0);
        Ok(())
    }

    pub fn points(&mut self, pts: &[Point], color: &str, size: f64) {
        for p in pts {
            let _ = writeln!(self.body, r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#, p[0], p[1], size * self.unit);
        }
    }

    pub fn finish(self) -> String {
        let (w, h) = (self.upper[0] - self.lower[0], self.upper[1] - self.lower[1]);
        let pad = 2.0 * self.unit;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
            self.lower[0] - pad,
            self.lower[1] - pad,
            w + 2.0 * pad,
            h + 2.0 * pad,
            (800.0 * (h + 2.0 * pad) / (w + 2.0 * pad)).round()
        );
        // Flip the y axis about the domain's mid-height.
        let _ = writeln!(out, r#"<g transform="translate(0,{}) scale(1,-1)">"#, self.lower[1] + self.upper[1]);
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}

/// Scene, translucent regions and an optional visibility-graph overlay.
pub fn render_cover(env: &Environment, regions: &[HPolytope], graph: Option<&VisibilityGraph>) -> Result<String> {
    let mut canvas = SvgCanvas::new(env)?;
    for (i, r) in regions.iter().enumerate() {
        canvas.region(r, &palette(i), 0.3)?;
    }
    canvas.obstacles(env)?;
    if let Some(g) = graph {
        canvas.graph(g)?;
    }
    Ok(canvas.finish())
}
