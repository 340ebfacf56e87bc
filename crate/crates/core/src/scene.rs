//! JSON scene files.
//!
//! ```json
//! {
//!   "name": "slabs",
//!   "dimension": 2,
//!   "domain": {"lower": [0, 0], "upper": [4, 4]},
//!   "obstacles": [
//!     {"type": "box", "lower": [2, 0], "upper": [3, 4]},
//!     {"type": "sphere", "center": [1, 1], "radius": 0.2},
//!     {"type": "polytope", "A": [[1, 0], [-1, 0], [0, 1], [0, -1]], "b": [1, 0, 1, 0]}
//!   ],
//!   "vcc": {"alpha": 0.8, "K": 500}
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexObstacle, Environment, HPolytope, Point};
use crate::pipeline::VccConfig;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleSpec {
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Polytope {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub domain: DomainSpec,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vcc: Option<VccConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ios: Option<VccConfig>,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{field}: {msg}"))
}

fn check_len(field: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(field_error(field, format!("expected {n} coordinates, found {}", v.len())));
    }
    Ok(())
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scene: {e}")))?;
        scene.environment()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::InvalidInput(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn name_or(&self, fallback: &str) -> String {
        self.name.clone().unwrap_or_else(|| fallback.to_string())
    }

    /// Validated environment; errors name the offending field.
    pub fn environment(&self) -> Result<Environment> {
        let n = self.dimension;
        if n == 0 {
            return Err(field_error("dimension", "must be positive"));
        }
        check_len("domain.lower", &self.domain.lower, n)?;
        check_len("domain.upper", &self.domain.upper, n)?;
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, o) in self.obstacles.iter().enumerate() {
            let at = |f: &str| format!("obstacles[{i}].{f}");
            let built = match o {
                ObstacleSpec::Box { lower, upper } => {
                    check_len(&at("lower"), lower, n)?;
                    check_len(&at("upper"), upper, n)?;
                    if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                        return Err(field_error(&at("upper"), "must exceed lower in every coordinate"));
                    }
                    ConvexObstacle::aabb(lower, upper)
                }
                ObstacleSpec::Polytope { a, b } => {
                    for (r, row) in a.iter().enumerate() {
                        check_len(&at(&format!("A[{r}]")), row, n)?;
                    }
                    if a.len() != b.len() {
                        return Err(field_error(&at("b"), format!("expected {} entries, found {}", a.len(), b.len())));
                    }
                    HPolytope::from_rows(a, b).map(ConvexObstacle::Polytope)
                }
                ObstacleSpec::Sphere { center, radius } => {
                    check_len(&at("center"), center, n)?;
                    ConvexObstacle::sphere(Point::from_column_slice(center), *radius)
                }
            }
            .map_err(|e| field_error(&format!("obstacles[{i}]"), e))?;
            obstacles.push(built);
        }
        Environment::new(
            Point::from_column_slice(&self.domain.lower),
            Point::from_column_slice(&self.domain.upper),
            obstacles,
        )
        .map_err(|e| match e {
            Error::InvalidInput(msg) => Error::InvalidInput(format!("scene: {msg}")),
            other => other,
        })
    }

    /// Scene describing an existing environment.
    pub fn from_environment(name: Option<String>, env: &Environment) -> Self {
        let obstacles = env
            .obstacles()
            .iter()
            .map(|o| match o {
                ConvexObstacle::Polytope(p) => ObstacleSpec::Polytope { a: p.rows_as_vecs(), b: p.b().iter().copied().collect() },
                ConvexObstacle::Sphere { center, radius } => {
                    ObstacleSpec::Sphere { center: center.iter().copied().collect(), radius: *radius }
                }
            })
            .collect();
        Scene {
            name,
            dimension: env.dimension(),
            domain: DomainSpec { lower: env.lower().iter().copied().collect(), upper: env.upper().iter().copied().collect() },
            obstacles,
            vcc: None,
            ios: None,
        }
    }
}
