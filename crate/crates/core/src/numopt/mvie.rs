//! Maximum-volume inscribed ellipsoid of an H-polytope.
//!
//! Maximizes `log det C` over symmetric `C` and center `d` subject to
//! `‖C aᵢ‖ + aᵢᵀd ≤ bᵢ`, using a log-barrier path with damped Newton steps.
//! The barrier gap after the outer loop is `m / t`, which bounds the relative
//! volume error.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{Ellipsoid, HPolytope};
use crate::{Error, Result};

const BARRIER_GROWTH: f64 = 10.0;
const NEWTON_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 200;

pub fn max_volume_inscribed_ellipsoid(p: &HPolytope, rel_tol: f64) -> Result<Ellipsoid> {
    let p = p.normalized();
    let n = p.dim();
    let m = p.num_faces();
    let (center, radius) = p
        .chebyshev_center()?
        .ok_or_else(|| Error::Empty("polytope for inscribed ellipsoid".into()))?;
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("polytope has empty interior".into()));
    }

    let sym: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let np = sym.len();
    let nv = np + n;
    // B_i: columns E_k aᵢ, so that C aᵢ = B_i c.
    let bmats: Vec<DMatrix<f64>> = (0..m)
        .map(|i| {
            let a = p.a().row(i);
            let mut b = DMatrix::zeros(n, np);
            for (k, &(r, s)) in sym.iter().enumerate() {
                b[(r, k)] += a[s];
                if r != s {
                    b[(s, k)] += a[r];
                }
            }
            b
        })
        .collect();

    let to_matrix = |v: &DVector<f64>| {
        let mut c = DMatrix::zeros(n, n);
        for (k, &(r, s)) in sym.iter().enumerate() {
            c[(r, s)] = v[k];
            c[(s, r)] = v[k];
        }
        c
    };

    let mut v = DVector::zeros(nv);
    for (k, &(r, s)) in sym.iter().enumerate() {
        if r == s {
            v[k] = 0.5 * radius;
        }
    }
    v.rows_mut(np, n).copy_from(&center);

    // Barrier objective; None when infeasible.
    let objective = |v: &DVector<f64>, t: f64| -> Option<f64> {
        let c = to_matrix(v);
        let chol = c.cholesky()?;
        let logdet = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
        let d = v.rows(np, n);
        let mut f = -t * logdet;
        for i in 0..m {
            let y = &bmats[i] * v.rows(0, np);
            let g = p.b()[i] - p.a().row(i).dot(&d.transpose()) - y.norm();
            if !(g > 0.0) {
                return None;
            }
            f -= g.ln();
        }
        Some(f)
    };

    let mut t = 1.0;
    loop {
        for _ in 0..MAX_NEWTON {
            let c = to_matrix(&v);
            let cinv = c
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("inscribed ellipsoid shape became singular".into()))?;
            let mut grad = DVector::zeros(nv);
            let mut hess = DMatrix::zeros(nv, nv);
            // −t log det C.
            let units: Vec<DMatrix<f64>> = sym
                .iter()
                .map(|&(r, s)| {
                    let mut e = DMatrix::zeros(n, n);
                    e[(r, s)] = 1.0;
                    e[(s, r)] = 1.0;
                    &cinv * e
                })
                .collect();
            for k in 0..np {
                grad[k] -= t * units[k].trace();
                for l in k..np {
                    let h = t * (&units[k] * &units[l]).trace();
                    hess[(k, l)] += h;
                    if l != k {
                        hess[(l, k)] += h;
                    }
                }
            }
            // −Σ log gᵢ.
            let d = v.rows(np, n).into_owned();
            for i in 0..m {
                let a = p.a().row(i).transpose();
                let y = &bmats[i] * v.rows(0, np);
                let r = y.norm();
                let g = p.b()[i] - a.dot(&d) - r;
                let btyr = bmats[i].transpose() * &y / r;
                let mut dg = DVector::zeros(nv);
                dg.rows_mut(0, np).copy_from(&(-&btyr));
                dg.rows_mut(np, n).copy_from(&(-&a));
                grad -= &dg / g;
                hess.ger(1.0 / (g * g), &dg, &dg, 1.0);
                let btb = bmats[i].transpose() * &bmats[i];
                let curv = (btb - &btyr * btyr.transpose()) / (r * g);
                let mut block = hess.view_mut((0, 0), (np, np));
                block += curv;
            }
            let step = match hess.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    let ridge = 1e-12 * hess.diagonal().amax().max(1.0);
                    let reg = &hess + DMatrix::identity(nv, nv) * ridge;
                    reg.cholesky()
                        .ok_or_else(|| Error::Numerical("inscribed ellipsoid Hessian is indefinite".into()))?
                        .solve(&(-&grad))
                }
            };
            let decrement = -grad.dot(&step);
            if decrement / 2.0 <= NEWTON_TOL {
                break;
            }
            let f0 = objective(&v, t).ok_or_else(|| Error::Numerical("barrier iterate infeasible".into()))?;
            let mut s = 1.0;
            loop {
                let cand = &v + &step * s;
                if let Some(f) = objective(&cand, t) {
                    if f <= f0 - 0.25 * s * decrement {
                        v = cand;
                        break;
                    }
                }
                s *= 0.5;
                if s < 1e-14 {
                    break;
                }
            }
            if s < 1e-14 {
                break;
            }
        }
        if m as f64 / t <= rel_tol {
            break;
        }
        t *= BARRIER_GROWTH;
    }
    Ellipsoid::new(to_matrix(&v), v.rows(np, n).into_owned())
}
