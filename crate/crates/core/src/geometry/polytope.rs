use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Point;
use crate::numopt::lp::{lp_solve, LpOutcome, LpProblem};
use crate::{Error, Result, GEOM_TOL};

/// Half-space `{q : aᵀq ≤ b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(normal: DVector<f64>, offset: f64) -> Result<Self> {
        if !(normal.norm() > 0.0) || !offset.is_finite() {
            return Err(Error::InvalidInput("hyperplane normal must be nonzero and finite".into()));
        }
        Ok(Self { normal, offset })
    }

    /// Signed value `aᵀq − b`; nonpositive inside the half-space.
    pub fn eval(&self, q: &Point) -> f64 {
        self.normal.dot(q) - self.offset
    }
}

/// Polytope `{q : Aq ≤ b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl HPolytope {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
        }
        if a.ncols() == 0 {
            return Err(Error::InvalidInput("polytope of dimension zero".into()));
        }
        if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("polytope data contains NaN or infinity".into()));
        }
        for (i, row) in a.row_iter().enumerate() {
            if !(row.norm() > 0.0) {
                return Err(Error::InvalidInput(format!("polytope row {i} has zero normal")));
            }
        }
        Ok(Self { a, b })
    }

    pub fn from_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        let n = lower.len();
        if upper.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: upper.len() });
        }
        let mut a = DMatrix::zeros(2 * n, n);
        let mut b = DVector::zeros(2 * n);
        for i in 0..n {
            a[(i, i)] = 1.0;
            b[i] = upper[i];
            a[(n + i, i)] = -1.0;
            b[n + i] = -lower[i];
        }
        Self::new(a, b)
    }

    pub fn from_hyperplanes(dim: usize, planes: &[Hyperplane]) -> Result<Self> {
        let mut a = DMatrix::zeros(planes.len(), dim);
        let mut b = DVector::zeros(planes.len());
        for (i, h) in planes.iter().enumerate() {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: h.normal.len() });
            }
            a.row_mut(i).copy_from(&h.normal.transpose());
            b[i] = h.offset;
        }
        Self::new(a, b)
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_faces(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn face(&self, i: usize) -> Hyperplane {
        Hyperplane { normal: self.a.row(i).transpose(), offset: self.b[i] }
    }

    fn check_dim(&self, q: &Point) -> Result<()> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: q.len() });
        }
        Ok(())
    }

    /// `Aq ≤ b + 1e-9` componentwise.
    pub fn contains(&self, q: &Point) -> Result<bool> {
        self.check_dim(q)?;
        Ok(self.contains_with_tol(q, GEOM_TOL))
    }

    /// Unchecked membership with an explicit tolerance.
    pub fn contains_with_tol(&self, q: &Point, tol: f64) -> bool {
        let n = self.dim();
        (0..self.num_faces()).all(|i| {
            let mut s = 0.0;
            for j in 0..n {
                s += self.a[(i, j)] * q[j];
            }
            s <= self.b[i] + tol
        })
    }

    /// Copy with every row scaled to a unit normal.
    pub fn normalized(&self) -> Self {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        for i in 0..a.nrows() {
            let norm = a.row(i).norm();
            a.row_mut(i).scale_mut(1.0 / norm);
            b[i] /= norm;
        }
        Self { a, b }
    }

    /// Stacked inequalities of both polytopes.
    pub fn intersect(&self, other: &HPolytope) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let m = self.num_faces() + other.num_faces();
        let mut a = DMatrix::zeros(m, self.dim());
        a.view_mut((0, 0), (self.num_faces(), self.dim())).copy_from(&self.a);
        a.view_mut((self.num_faces(), 0), (other.num_faces(), self.dim())).copy_from(&other.a);
        let b = DVector::from_iterator(m, self.b.iter().chain(other.b.iter()).copied());
        Ok(Self { a, b })
    }

    /// `min cᵀx` over the polytope.
    pub fn minimize(&self, c: &DVector<f64>) -> Result<LpOutcome> {
        lp_solve(&LpProblem::new(c.clone(), self.a.clone(), self.b.clone()))
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(!self.minimize(&DVector::zeros(self.dim()))?.is_feasible())
    }

    /// Bounded iff every coordinate is bounded above and below.
    pub fn is_bounded(&self) -> Result<bool> {
        let n = self.dim();
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut c = DVector::zeros(n);
                c[i] = sign;
                if self.minimize(&c)? == LpOutcome::Unbounded {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> Result<(Point, Point)> {
        let n = self.dim();
        let mut lo = DVector::zeros(n);
        let mut hi = DVector::zeros(n);
        for i in 0..n {
            for (sign, out) in [(1.0, &mut lo), (-1.0, &mut hi)] {
                let mut c = DVector::zeros(n);
                c[i] = sign;
                match self.minimize(&c)? {
                    LpOutcome::Optimal { value, .. } => out[i] = sign * value,
                    LpOutcome::Infeasible => return Err(Error::Empty("polytope".into())),
                    LpOutcome::Unbounded => return Err(Error::Unbounded("polytope".into())),
                }
            }
        }
        Ok((lo, hi))
    }

    /// Center and radius of the largest inscribed Euclidean ball.
    pub fn chebyshev_center(&self) -> Result<Option<(Point, f64)>> {
        let n = self.dim();
        let m = self.num_faces();
        let mut a = DMatrix::zeros(m, n + 1);
        a.view_mut((0, 0), (m, n)).copy_from(&self.a);
        for i in 0..m {
            a[(i, n)] = self.a.row(i).norm();
        }
        let mut c = DVector::zeros(n + 1);
        c[n] = -1.0;
        let mut lower = vec![f64::NEG_INFINITY; n + 1];
        lower[n] = 0.0;
        let upper = vec![f64::INFINITY; n + 1];
        let p = LpProblem::new(c, a, self.b.clone()).with_bounds(lower, upper);
        match lp_solve(&p)? {
            LpOutcome::Optimal { x, .. } => Ok(Some((x.rows(0, n).into_owned(), x[n]))),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::Unbounded("polytope has unbounded inradius".into())),
        }
    }

    pub fn translate(&self, shift: &Point) -> Self {
        let b = &self.b + &self.a * shift;
        Self { a: self.a.clone(), b }
    }
}

#[derive(Serialize, Deserialize)]
struct HPolytopeRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl HPolytope {
    pub fn rows_as_vecs(&self) -> Vec<Vec<f64>> {
        self.a.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ragged polytope matrix".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(m, n, &data), DVector::from_column_slice(b))
    }
}

impl Serialize for HPolytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HPolytopeRepr { a: self.rows_as_vecs(), b: self.b.iter().copied().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = HPolytopeRepr::deserialize(d)?;
        HPolytope::from_rows(&r.a, &r.b).map_err(serde::de::Error::custom)
    }
}
