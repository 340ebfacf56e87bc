//! Minimum-volume enclosing ellipsoid by Khachiyan's dual ascent with
//! Wolfe–Atwood away steps (Todd–Yildirim variant).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::geometry::{Ellipsoid, Point};
use crate::{Error, Result};

pub const DEFAULT_MVEE_EPS: f64 = 1e-4;

/// Relative singular-value floor applied to the shape matrix.
pub const SINGULAR_FLOOR: f64 = 1e-6;

/// Relative singular value below which the centered points are treated as
/// lying in a lower-dimensional affine subspace.
const RANK_TOL: f64 = 1e-8;

const MAX_ITERATIONS: usize = 200_000;

#[derive(Clone, Debug)]
pub struct MveeResult {
    pub ellipsoid: Ellipsoid,
    /// Dual weights over the input points; nonnegative, summing to one.
    pub weights: Vec<f64>,
    /// Final relative optimality gap of the dual iteration.
    pub gap: f64,
    /// The points were affinely degenerate and the shape was floored.
    pub regularized: bool,
}

pub fn min_volume_ellipsoid(points: &[Point], eps: f64) -> Result<MveeResult> {
    if points.len() < 2 {
        return Err(Error::InvalidInput(format!("MVEE needs at least 2 points, got {}", points.len())));
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidInput(format!("MVEE tolerance must be in (0, 0.5], got {eps}")));
    }
    let n = points[0].len();
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("MVEE point is not finite".into()));
        }
    }
    let count = points.len();
    let mean = points.iter().fold(DVector::zeros(n), |acc, p| acc + p) / count as f64;
    let mut centered = DMatrix::zeros(n, count);
    for (j, p) in points.iter().enumerate() {
        centered.set_column(j, &(p - &mean));
    }
    let svd = centered.clone().svd(true, false);
    let u = svd.u.expect("SVD with U requested");
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return Err(Error::InvalidInput("MVEE points are all identical".into()));
    }
    // Orthonormal basis of the affine hull, sorted by singular value.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let basis_idx: Vec<usize> = order.into_iter().filter(|&i| svd.singular_values[i] > RANK_TOL * smax).collect();
    let r = basis_idx.len();
    let basis = u.select_columns(&basis_idx);
    let reduced: Vec<DVector<f64>> = (0..count).map(|j| basis.transpose() * centered.column(j)).collect();

    let (weights, gap) = khachiyan(&reduced, eps)?;

    // Center and shape in the subspace.
    let c_r = reduced.iter().zip(&weights).fold(DVector::zeros(r), |acc, (z, w)| acc + z * *w);
    let mut sigma = DMatrix::zeros(r, r);
    for (z, w) in reduced.iter().zip(&weights) {
        let dz = z - &c_r;
        sigma += &dz * dz.transpose() * *w;
    }
    let shape_r = sym_sqrt(&(sigma * r as f64));

    let mut shape = &basis * shape_r * basis.transpose();
    let center = &mean + &basis * c_r;
    let regularized = r < n;
    // Floor small singular values; the shape is symmetric PSD here.
    let eig = SymmetricEigen::new(shape.clone());
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = SINGULAR_FLOOR * lmax;
    if eig.eigenvalues.iter().any(|&l| l < floor) {
        let vals = eig.eigenvalues.map(|l| l.max(floor));
        shape = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
    }
    let mut ellipsoid = Ellipsoid::new(shape, center)?;
    // Scale so that every point lies inside exactly.
    let worst = points.iter().map(|p| ellipsoid.normalized_distance(p)).fold(0.0f64, f64::max);
    if worst > 1.0 {
        ellipsoid = ellipsoid.scaled(worst)?;
    }
    Ok(MveeResult { ellipsoid, weights, gap, regularized })
}

/// Dual weights of the MVEE of full-dimensional points; returns the
/// weights and the achieved gap.
fn khachiyan(points: &[DVector<f64>], eps: f64) -> Result<(Vec<f64>, f64)> {
    let count = points.len();
    let r = points[0].len();
    let d = (r + 1) as f64;
    let lifted: Vec<DVector<f64>> = points.iter().map(|p| p.clone().insert_row(r, 1.0)).collect();
    let mut u = vec![1.0 / count as f64; count];
    let mut m = vec![0.0; count];
    for _ in 0..MAX_ITERATIONS {
        let mut x = DMatrix::zeros(r + 1, r + 1);
        for (q, w) in lifted.iter().zip(&u) {
            if *w > 0.0 {
                x.ger(*w, q, q, 1.0);
            }
        }
        let chol = x
            .cholesky()
            .ok_or_else(|| Error::Numerical("MVEE moment matrix lost definiteness".into()))?;
        for (mi, q) in m.iter_mut().zip(&lifted) {
            *mi = q.dot(&chol.solve(q));
        }
        let (j, &mj) = m
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let (k, &mk) = m
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("some positive weight");
        let up = mj / d - 1.0;
        let down = 1.0 - mk / d;
        let gap = up.max(down);
        if gap <= eps {
            return Ok((u, gap));
        }
        if up >= down {
            let tau = (mj - d) / (d * (mj - 1.0));
            for w in u.iter_mut() {
                *w *= 1.0 - tau;
            }
            u[j] += tau;
        } else {
            let mut tau = if mk > 1.0 { (d - mk) / (d * (mk - 1.0)) } else { f64::INFINITY };
            let drop = u[k] / (1.0 - u[k]);
            let dropping = drop <= tau;
            tau = tau.min(drop);
            for w in u.iter_mut() {
                *w *= 1.0 + tau;
            }
            u[k] -= tau;
            if dropping || u[k] < 0.0 {
                u[k] = 0.0;
            }
        }
    }
    Err(Error::Numerical(format!("MVEE did not reach gap {eps} in {MAX_ITERATIONS} iterations")))
}

fn sym_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn square_corners_give_circle() {
        let pts = vec![dvector![-1.0, -1.0], dvector![1.0, -1.0], dvector![1.0, 1.0], dvector![-1.0, 1.0]];
        let res = min_volume_ellipsoid(&pts, DEFAULT_MVEE_EPS).unwrap();
        let e = &res.ellipsoid;
        assert!(e.center().norm() < 1e-6);
        let sv = e.shape().clone().svd(false, false).singular_values;
        for s in sv.iter() {
            assert!((s - 2.0f64.sqrt()).abs() < 1e-3, "radius {s}");
        }
        assert!((res.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(!res.regularized);
    }

    #[test]
    fn equilateral_triangle_circumcircle() {
        let h = 3.0f64.sqrt() / 2.0;
        let pts = vec![dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.5, h]];
        let res = min_volume_ellipsoid(&pts, DEFAULT_MVEE_EPS).unwrap();
        // Closed-form circumradius abc / (4·area) of the unit equilateral triangle.
        let area = 0.5 * h;
        let circumradius = 1.0 / (4.0 * area);
        assert!((circumradius - 1.0 / 3.0f64.sqrt()).abs() < 1e-12);
        let sv = res.ellipsoid.shape().clone().svd(false, false).singular_values;
        for s in sv.iter() {
            assert!((s - circumradius).abs() < 1e-3);
        }
        assert!((res.ellipsoid.center() - dvector![0.5, h / 3.0]).norm() < 1e-3);
    }

    #[test]
    fn degenerate_points_are_regularized() {
        let pts = vec![dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![0.5, 1e-9]];
        let res = min_volume_ellipsoid(&pts, DEFAULT_MVEE_EPS).unwrap();
        assert!(res.regularized);
        assert!((res.ellipsoid.center()[0] - 0.5).abs() < 1e-3);
        assert!(res.ellipsoid.center()[1].abs() < 1e-6);
        for p in &pts {
            assert!(res.ellipsoid.contains(p, 1e-9));
        }
        let sv = res.ellipsoid.shape().clone().svd(false, false).singular_values;
        let (lo, hi) = (sv.min(), sv.max());
        assert!(lo >= SINGULAR_FLOOR * hi * (1.0 - 1e-9));
    }

    #[test]
    fn too_few_or_identical_points() {
        assert!(min_volume_ellipsoid(&[dvector![0.0, 0.0]], 1e-4).is_err());
        assert!(min_volume_ellipsoid(&[dvector![1.0, 1.0], dvector![1.0, 1.0]], 1e-4).is_err());
        assert!(min_volume_ellipsoid(&[dvector![0.0], dvector![1.0]], 0.0).is_err());
    }

    #[test]
    fn two_points_in_plane() {
        let res = min_volume_ellipsoid(&[dvector![0.0, 0.0], dvector![2.0, 2.0]], 1e-4).unwrap();
        assert!((res.ellipsoid.center() - dvector![1.0, 1.0]).norm() < 1e-9);
        assert!(res.ellipsoid.contains(&dvector![2.0, 2.0], 1e-9));
    }
}
