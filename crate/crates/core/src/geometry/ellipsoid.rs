use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Point;
use crate::{Error, Result};

/// Volume of the unit ball in `n` dimensions.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `{Cu + d : ‖u‖ ≤ 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    shape: DMatrix<f64>,
    center: DVector<f64>,
}

impl Ellipsoid {
    pub const MIN_ABS_DET: f64 = 1e-12;

    pub fn new(shape: DMatrix<f64>, center: DVector<f64>) -> Result<Self> {
        let n = center.len();
        if shape.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: shape.nrows() });
        }
        if !shape.iter().chain(center.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("ellipsoid data contains NaN or infinity".into()));
        }
        let det = shape.determinant();
        if det.abs() < Self::MIN_ABS_DET {
            return Err(Error::InvalidInput(format!("ellipsoid shape is singular (|det| = {:.3e})", det.abs())));
        }
        Ok(Self { shape, center })
    }

    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self> {
        let n = center.len();
        Self::new(DMatrix::identity(n, n) * radius, center)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn volume(&self) -> f64 {
        self.shape.determinant().abs() * unit_ball_volume(self.dim())
    }

    pub fn with_center(&self, center: DVector<f64>) -> Result<Self> {
        Self::new(self.shape.clone(), center)
    }

    /// Uniform scaling about the center.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(&self.shape * s, self.center.clone())
    }

    pub fn shape_inverse(&self) -> DMatrix<f64> {
        // Nonsingularity is an invariant of the type.
        self.shape.clone().try_inverse().expect("ellipsoid shape is nonsingular")
    }

    /// Metric `W = C⁻ᵀC⁻¹`; the ellipsoid is `{x : (x−d)ᵀW(x−d) ≤ 1}`.
    pub fn metric(&self) -> DMatrix<f64> {
        let inv = self.shape_inverse();
        inv.transpose() * inv
    }

    /// `‖C⁻¹(p − d)‖`; at most one for points inside.
    pub fn normalized_distance(&self, p: &Point) -> f64 {
        let lu = self.shape.clone().lu();
        lu.solve(&(p - &self.center)).map(|u| u.norm()).unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.normalized_distance(p) <= 1.0 + tol
    }

    /// Image of a unit-sphere direction.
    pub fn boundary_point(&self, direction: &DVector<f64>) -> Point {
        let u = direction / direction.norm();
        &self.shape * u + &self.center
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct EllipsoidRepr {
    pub shape: Vec<Vec<f64>>,
    pub center: Vec<f64>,
}

impl From<&Ellipsoid> for EllipsoidRepr {
    fn from(e: &Ellipsoid) -> Self {
        Self {
            shape: e.shape.row_iter().map(|r| r.iter().copied().collect()).collect(),
            center: e.center.iter().copied().collect(),
        }
    }
}

impl Serialize for Ellipsoid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EllipsoidRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ellipsoid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = EllipsoidRepr::deserialize(d)?;
        let n = r.center.len();
        if r.shape.len() != n || r.shape.iter().any(|row| row.len() != n) {
            return Err(serde::de::Error::custom("ellipsoid shape must be n x n"));
        }
        let data: Vec<f64> = r.shape.iter().flatten().copied().collect();
        Ellipsoid::new(DMatrix::from_row_slice(n, n, &data), DVector::from_vec(r.center)).map_err(serde::de::Error::custom)
    }
}
