//! Strict separation of a point from the convex hull of a point set.

use nalgebra::{DMatrix, DVector};

use super::lp::{lp_solve, LpOutcome, LpProblem};
use crate::geometry::{Hyperplane, Point};
use crate::{Error, Result, SOLVER_TOL};

/// Returns `H = {x : aᵀx ≤ b}` with `aᵀs ≤ b` for every `s ∈ S` and
/// `aᵀq − b ≥ 1`, or `None` when `q ∈ conv(S)`.
///
/// The LP maximizes the margin `δ` of `cᵀq + d ≥ δ, cᵀs + d ≤ 0` with the
/// normal boxed to `−1 ≤ cᵢ ≤ 1`; a positive margin is rescaled to one.
pub fn separating_hyperplane(q: &Point, s: &[Point]) -> Result<Option<Hyperplane>> {
    if s.is_empty() {
        return Err(Error::InvalidInput("separation needs a nonempty point set".into()));
    }
    let n = q.len();
    for p in s {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
    }
    // Variables: c (n), d, δ.
    let k = n + 2;
    let m = s.len() + 1;
    let mut a = DMatrix::zeros(m, k);
    for (i, p) in s.iter().enumerate() {
        for j in 0..n {
            a[(i, j)] = p[j];
        }
        a[(i, n)] = 1.0;
    }
    for j in 0..n {
        a[(m - 1, j)] = -q[j];
    }
    a[(m - 1, n)] = -1.0;
    a[(m - 1, n + 1)] = 1.0;
    let mut c = DVector::zeros(k);
    c[n + 1] = -1.0;
    let mut lower = vec![-1.0; k];
    let mut upper = vec![1.0; k];
    lower[n] = f64::NEG_INFINITY;
    upper[n] = f64::INFINITY;
    lower[n + 1] = 0.0;
    let problem = LpProblem::new(c, a, DVector::zeros(m)).with_bounds(lower, upper);
    let (x, _) = match lp_solve(&problem)? {
        LpOutcome::Optimal { x, value } => (x, value),
        other => return Err(Error::Numerical(format!("separation LP ended as {other:?}"))),
    };
    let margin = x[n + 1];
    if margin <= SOLVER_TOL {
        return Ok(None);
    }
    let normal = x.rows(0, n) / margin;
    let offset = -x[n] / margin;
    Ok(Some(Hyperplane::new(normal, offset)?))
}

/// Convex-combination weights expressing `q` through `S`, or `None` if `q`
/// lies outside `conv(S)`. The LP returns a basic solution, so at most
/// `n + 1` weights are nonzero.
pub fn hull_weights(q: &Point, s: &[Point]) -> Result<Option<Vec<(usize, f64)>>> {
    if s.is_empty() {
        return Ok(None);
    }
    let n = q.len();
    let count = s.len();
    // Σλ s = q and Σλ = 1, each written as a pair of inequalities.
    let rows = n + 1;
    let mut a = DMatrix::zeros(2 * rows, count);
    let mut b = DVector::zeros(2 * rows);
    for (j, p) in s.iter().enumerate() {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        for i in 0..n {
            a[(i, j)] = p[i];
            a[(rows + i, j)] = -p[i];
        }
        a[(n, j)] = 1.0;
        a[(rows + n, j)] = -1.0;
    }
    for i in 0..n {
        b[i] = q[i];
        b[rows + i] = -q[i];
    }
    b[n] = 1.0;
    b[rows + n] = -1.0;
    let problem = LpProblem::new(DVector::zeros(count), a, b).with_bounds(vec![0.0; count], vec![f64::INFINITY; count]);
    match lp_solve(&problem)? {
        LpOutcome::Optimal { x, .. } => {
            Ok(Some(x.iter().enumerate().filter(|(_, &w)| w > 1e-12).map(|(j, &w)| (j, w)).collect()))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Numerical("hull membership LP unbounded".into())),
    }
}
