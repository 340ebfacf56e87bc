//! Metric projection onto H-polytopes.
//!
//! The projection `argmin_{Ax ≤ b} (x−y)ᵀW(x−y)` is reduced to a least
//! distance program in whitened coordinates and solved with the
//! Lawson–Hanson NNLS active-set method.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{HPolytope, Point};
use crate::{Error, Result};

/// Lawson–Hanson nonnegative least squares: `min ‖Eu − f‖, u ≥ 0`.
pub fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = e.shape();
    if f.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, found: f.len() });
    }
    let mut u = DVector::<f64>::zeros(cols);
    let mut passive = vec![false; cols];
    let tol = 10.0 * f64::EPSILON * e.amax().max(1.0) * rows.max(cols) as f64;
    let max_outer = 3 * cols + 10;

    for _ in 0..max_outer {
        let w = e.transpose() * (f - e * &u);
        let candidate = (0..cols)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(t) = candidate.filter(|&j| w[j] > tol) else {
            return Ok(u);
        };
        passive[t] = true;

        loop {
            let idx: Vec<usize> = (0..cols).filter(|&j| passive[j]).collect();
            let z = least_squares_on(e, f, &idx)?;
            if z.iter().all(|&v| v > tol) {
                u.fill(0.0);
                for (k, &j) in idx.iter().enumerate() {
                    u[j] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] <= tol {
                    let denom = u[j] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(u[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in idx.iter().enumerate() {
                u[j] += alpha * (z[k] - u[j]);
            }
            let mut dropped = false;
            for &j in &idx {
                if u[j] <= tol {
                    u[j] = 0.0;
                    passive[j] = false;
                    dropped = true;
                }
            }
            if !dropped {
                // Guard against stalling on a zero step.
                passive[t] = false;
                break;
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    Err(Error::Numerical("NNLS did not converge".into()))
}

fn least_squares_on(e: &DMatrix<f64>, f: &DVector<f64>, idx: &[usize]) -> Result<DVector<f64>> {
    let sub = e.select_columns(idx);
    let svd = sub.svd(true, true);
    let eps = 1e-13 * svd.singular_values.max().max(1e-300);
    svd.solve(f, eps).map_err(|m| Error::Numerical(format!("least squares failed: {m}")))
}

/// Least distance programming: the minimum-norm `z` with `Gz ≥ g`.
/// Returns `None` when the constraints are infeasible.
pub fn least_distance(g: &DMatrix<f64>, h: &DVector<f64>) -> Result<Option<DVector<f64>>> {
    let (m, n) = g.shape();
    if h.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: h.len() });
    }
    if m == 0 {
        return Ok(Some(DVector::zeros(n)));
    }
    let mut e = DMatrix::<f64>::zeros(n + 1, m);
    e.view_mut((0, 0), (n, m)).copy_from(&g.transpose());
    e.row_mut(n).copy_from(&h.transpose());
    let mut f = DVector::<f64>::zeros(n + 1);
    f[n] = 1.0;
    let u = nnls(&e, &f)?;
    let r = &e * &u - &f;
    if r.norm() < 1e-12 || r[n].abs() < 1e-14 {
        return Ok(None);
    }
    Ok(Some(DVector::from_iterator(n, (0..n).map(|i| -r[i] / r[n]))))
}

/// Projection of `y` onto `{x : Ax ≤ b}` in the metric `(x−y)ᵀW(x−y)`.
pub fn project_onto_polytope(p: &HPolytope, y: &Point, w: &DMatrix<f64>) -> Result<Point> {
    let n = p.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    if w.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: w.nrows() });
    }
    let chol = w
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("metric matrix is not positive definite".into()))?;
    // W = LLᵀ; with z = Lᵀ(x − y) we get x = y + L⁻ᵀz.
    let l = chol.l();
    let l_inv_t = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?
        .transpose();
    project_affine(p, y, &l_inv_t)
}

/// Projection in the metric induced by the map `x = y + Tz`: minimizes `‖z‖`
/// subject to `x ∈ P`. Used directly by IRIS with `T` = ellipsoid shape.
pub fn project_affine(p: &HPolytope, y: &Point, t: &DMatrix<f64>) -> Result<Point> {
    let m = p.a() * t;
    let rhs = p.b() - p.a() * y;
    // Mz ≤ rhs  ⇔  (−M)z ≥ −rhs.
    let z = least_distance(&(-m), &(-rhs))?.ok_or_else(|| Error::Empty("projection target polytope".into()))?;
    Ok(y + t * z)
}
