//! Dense two-phase tableau simplex.
//!
//! Problems are `min cᵀx s.t. Ax ≤ b, lower ≤ x ≤ upper` with optional
//! (infinite) bounds. Sizes in this crate stay below a few hundred rows, so a
//! dense tableau is plenty. Pivoting uses Dantzig's rule and falls back to
//! Bland's rule after a run of degenerate pivots, which rules out cycling.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, SOLVER_TOL};

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const DEGENERATE_STREAK: usize = 50;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct LpProblem {
    /// Minimized objective; a zero vector asks for feasibility only.
    pub objective: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Problem over free variables.
    pub fn new(objective: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        let k = objective.len();
        Self {
            objective,
            a,
            b,
            lower: vec![f64::NEG_INFINITY; k],
            upper: vec![f64::INFINITY; k],
        }
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let k = self.num_vars();
        if k == 0 {
            return Err(Error::InvalidInput("LP needs at least one variable".into()));
        }
        if self.a.ncols() != k || self.a.nrows() != self.b.len() {
            return Err(Error::InvalidInput(format!(
                "LP shape mismatch: A is {}x{}, b has {}, c has {}",
                self.a.nrows(),
                self.a.ncols(),
                self.b.len(),
                k
            )));
        }
        if self.lower.len() != k || self.upper.len() != k {
            return Err(Error::InvalidInput("LP bound vectors have wrong length".into()));
        }
        let finite = self.objective.iter().chain(self.a.iter()).chain(self.b.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("LP data contains NaN or infinity".into()));
        }
        for j in 0..k {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::InvalidInput(format!("LP bounds of variable {j} are inconsistent")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn optimal(self) -> Option<(DVector<f64>, f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

/// How an original variable is expressed through nonnegative tableau columns.
#[derive(Clone, Copy)]
enum VarMap {
    /// x = offset + z
    Shifted { col: usize, offset: f64 },
    /// x = offset - z
    Mirrored { col: usize, offset: f64 },
    /// x = z⁺ - z⁻
    Split { pos: usize, neg: usize },
}

pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    p.validate()?;
    let k = p.num_vars();

    // Map variables to nonnegative columns.
    let mut maps = Vec::with_capacity(k);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..k {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if lo.is_finite() {
            maps.push(VarMap::Shifted { col: ncols, offset: lo });
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            ncols += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Mirrored { col: ncols, offset: hi });
            ncols += 1;
        } else {
            maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }

    // Rows in terms of the structural columns: G z ≤ h.
    let m_orig = p.a.nrows();
    let m = m_orig + bound_rows.len();
    let mut g = DMatrix::<f64>::zeros(m, ncols);
    let mut h = DVector::<f64>::zeros(m);
    for i in 0..m_orig {
        let mut rhs = p.b[i];
        for (j, map) in maps.iter().enumerate() {
            let aij = p.a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shifted { col, offset } => {
                    g[(i, col)] += aij;
                    rhs -= aij * offset;
                }
                VarMap::Mirrored { col, offset } => {
                    g[(i, col)] -= aij;
                    rhs -= aij * offset;
                }
                VarMap::Split { pos, neg } => {
                    g[(i, pos)] += aij;
                    g[(i, neg)] -= aij;
                }
            }
        }
        h[i] = rhs;
    }
    for (r, &(col, ub)) in bound_rows.iter().enumerate() {
        g[(m_orig + r, col)] = 1.0;
        h[m_orig + r] = ub;
    }
    let mut cost = DVector::<f64>::zeros(ncols);
    for (j, map) in maps.iter().enumerate() {
        let cj = p.objective[j];
        match *map {
            VarMap::Shifted { col, .. } => cost[col] += cj,
            VarMap::Mirrored { col, .. } => cost[col] -= cj,
            VarMap::Split { pos, neg } => {
                cost[pos] += cj;
                cost[neg] -= cj;
            }
        }
    }

    // Row equilibration.
    for i in 0..m {
        let scale = g.row(i).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale > 0.0 {
            g.row_mut(i).scale_mut(1.0 / scale);
            h[i] /= scale;
        } else if h[i] < -SOLVER_TOL {
            // 0 ≤ negative: trivially infeasible row.
            return Ok(LpOutcome::Infeasible);
        }
    }

    let z = match Tableau::solve(&g, &h, &cost)? {
        TableauOutcome::Optimal(z) => z,
        TableauOutcome::Infeasible => return Ok(LpOutcome::Infeasible),
        TableauOutcome::Unbounded => return Ok(LpOutcome::Unbounded),
    };

    let x = DVector::from_iterator(
        k,
        maps.iter().map(|map| match *map {
            VarMap::Shifted { col, offset } => offset + z[col],
            VarMap::Mirrored { col, offset } => offset - z[col],
            VarMap::Split { pos, neg } => z[pos] - z[neg],
        }),
    );
    let value = p.objective.dot(&x);

    // Verify primal feasibility against the unscaled data.
    let ax = &p.a * &x;
    for i in 0..m_orig {
        let slack = SOLVER_TOL * (1.0 + p.b[i].abs().max(row_norm_inf(&p.a, i) * x.amax()));
        if ax[i] > p.b[i] + slack {
            return Err(Error::Numerical(format!(
                "simplex returned a point violating row {i} by {:.3e}",
                ax[i] - p.b[i]
            )));
        }
    }
    Ok(LpOutcome::Optimal { x, value })
}

fn row_norm_inf(a: &DMatrix<f64>, i: usize) -> f64 {
    a.row(i).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

enum TableauOutcome {
    Optimal(DVector<f64>),
    Infeasible,
    Unbounded,
}

/// Tableau for `min cᵀz s.t. Gz + s = h, z, s ≥ 0` plus artificials.
struct Tableau {
    /// Row-major, `rows x (cols + 1)`; last column is the right-hand side.
    t: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    /// Columns at or above this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.cols + 1) + self.cols]
    }

    fn solve(g: &DMatrix<f64>, h: &DVector<f64>, cost: &DVector<f64>) -> Result<TableauOutcome> {
        let m = g.nrows();
        let nz = g.ncols();
        let negative_rows: Vec<usize> = (0..m).filter(|&i| h[i] < 0.0).collect();
        let n_art = negative_rows.len();
        let cols = nz + m + n_art;
        let width = cols + 1;
        let mut t = vec![0.0; m * width];
        let mut basis = vec![0usize; m];
        let mut art = nz + m;
        for i in 0..m {
            let sign = if h[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..nz {
                t[i * width + j] = sign * g[(i, j)];
            }
            t[i * width + nz + i] = sign;
            t[i * width + cols] = sign * h[i];
            if sign < 0.0 {
                t[i * width + art] = 1.0;
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = nz + i;
            }
        }
        let mut tab = Tableau { t, rows: m, cols, basis, first_artificial: nz + m };

        if n_art > 0 {
            let mut phase1 = vec![0.0; cols];
            for c in phase1.iter_mut().skip(nz + m) {
                *c = 1.0;
            }
            match tab.run(&phase1, cols)? {
                true => {}
                false => return Err(Error::Numerical("phase-one LP reported unbounded".into())),
            }
            let infeas: f64 = (0..tab.rows)
                .filter(|&i| tab.basis[i] >= tab.first_artificial)
                .map(|i| tab.rhs(i))
                .sum();
            let scale = 1.0 + h.amax();
            if infeas > SOLVER_TOL * scale {
                return Ok(TableauOutcome::Infeasible);
            }
            tab.drive_out_artificials();
        }

        let mut phase2 = vec![0.0; cols];
        phase2[..nz].copy_from_slice(cost.as_slice());
        let limit = tab.first_artificial;
        if !tab.run(&phase2, limit)? {
            return Ok(TableauOutcome::Unbounded);
        }
        let mut z = DVector::zeros(nz);
        for i in 0..tab.rows {
            if tab.basis[i] < nz {
                z[tab.basis[i]] = tab.rhs(i).max(0.0);
            }
        }
        Ok(TableauOutcome::Optimal(z))
    }

    /// Minimize `cost` over columns `< col_limit`. Returns false on unboundedness.
    fn run(&mut self, cost: &[f64], col_limit: usize) -> Result<bool> {
        let mut degenerate = 0usize;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate >= DEGENERATE_STREAK;
            let reduced = self.reduced_costs(cost, col_limit);
            let entering = if bland {
                (0..col_limit).find(|&j| reduced[j] < -COST_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (j, &r) in reduced.iter().enumerate().take(col_limit) {
                    if r < -COST_TOL && best.is_none_or(|(_, br)| r < br) {
                        best = Some((j, r));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(e) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aie = self.at(i, e);
                if aie > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / aie;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
        }
        Err(Error::Numerical(format!("simplex exceeded {MAX_PIVOTS} pivots")))
    }

    fn reduced_costs(&self, cost: &[f64], col_limit: usize) -> Vec<f64> {
        let mut red = cost[..col_limit].to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * (self.cols + 1)..i * (self.cols + 1) + col_limit];
                for (r, a) in red.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
        red
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let width = self.cols + 1;
        let piv = self.t[r * width + e];
        for j in 0..width {
            self.t[r * width + j] /= piv;
        }
        let pivot_row: Vec<f64> = self.t[r * width..(r + 1) * width].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * width + e];
            if f != 0.0 {
                let row = &mut self.t[i * width..(i + 1) * width];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
                row[e] = 0.0;
            }
        }
        self.basis[r] = e;
    }

    /// After phase one, pivot remaining zero-level artificials out of the
    /// basis, dropping rows that turn out to be redundant.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > 1e-9);
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        let width = self.cols + 1;
                        self.t.drain(i * width..(i + 1) * width);
                        self.basis.remove(i);
                        self.rows -= 1;
                    }
                }
            } else {
                i += 1;
            }
        }
    }
}
