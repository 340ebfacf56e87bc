use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConvexObstacle, HPolytope, Point};
use crate::{Error, Result};

/// Draws used by the positive-free-volume check at construction.
pub const FREE_VOLUME_PROBES: usize = 10_000;

/// How visibility along a segment is decided.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum SegmentCheck {
    /// Exact per-obstacle tests.
    #[default]
    Exact,
    /// Point checks every `step` along the segment.
    Sampled { step: f64 },
}

/// Axis-aligned box domain minus convex obstacles.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    lower: Point,
    upper: Point,
    obstacles: Vec<ConvexObstacle>,
    domain: HPolytope,
    boxes: Vec<(Point, Point)>,
}

/// Padding on cached obstacle bounding boxes, well above LP round-off.
const BOX_PAD: f64 = 1e-7;

impl Environment {
    pub fn new(lower: Point, upper: Point, obstacles: Vec<ConvexObstacle>) -> Result<Self> {
        let n = lower.len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if upper.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: upper.len() });
        }
        for i in 0..n {
            if !(lower[i] < upper[i]) || !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(Error::InvalidInput(format!(
                    "domain lower bound must be below upper bound in coordinate {i}"
                )));
            }
        }
        for (k, o) in obstacles.iter().enumerate() {
            if o.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: o.dim() });
            }
            if let ConvexObstacle::Polytope(p) = o {
                if p.is_empty()? {
                    return Err(Error::InvalidInput(format!("obstacle {k} is empty")));
                }
                if !p.is_bounded()? {
                    return Err(Error::InvalidInput(format!("obstacle {k} is unbounded")));
                }
            }
        }
        let domain = HPolytope::from_box(lower.as_slice(), upper.as_slice())?;
        let boxes = obstacles
            .iter()
            .map(|o| o.bounding_box().map(|(lo, hi)| (lo.add_scalar(-BOX_PAD), hi.add_scalar(BOX_PAD))))
            .collect::<Result<_>>()?;
        let env = Self { lower, upper, obstacles, domain, boxes };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f4ee);
        if !(0..FREE_VOLUME_PROBES).any(|_| env.is_free(&env.sample_domain(&mut rng))) {
            return Err(Error::InvalidInput(format!(
                "no collision-free sample among {FREE_VOLUME_PROBES} draws; free space looks empty"
            )));
        }
        Ok(env)
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    pub fn obstacles(&self) -> &[ConvexObstacle] {
        &self.obstacles
    }

    /// Padded axis-aligned bounding box of each obstacle.
    pub fn obstacle_boxes(&self) -> &[(Point, Point)] {
        &self.boxes
    }

    pub fn domain(&self) -> &HPolytope {
        &self.domain
    }

    pub fn domain_volume(&self) -> f64 {
        (&self.upper - &self.lower).iter().product()
    }

    pub fn diagonal(&self) -> f64 {
        (&self.upper - &self.lower).norm()
    }

    /// Default step of the sampled segment checker.
    pub fn default_sampling_step(&self) -> f64 {
        1e-3 * self.diagonal()
    }

    fn check_dim(&self, q: &Point) -> Result<()> {
        if q.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), found: q.len() });
        }
        Ok(())
    }

    /// Uniform sample from the domain box.
    pub fn sample_domain<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        DVector::from_iterator(
            self.dimension(),
            (0..self.dimension()).map(|i| rng.random_range(self.lower[i]..self.upper[i])),
        )
    }

    /// Unchecked membership in the free space.
    pub fn is_free(&self, q: &Point) -> bool {
        let in_domain = (0..self.dimension()).all(|i| q[i] >= self.lower[i] && q[i] <= self.upper[i]);
        in_domain
            && !self.obstacles.iter().zip(&self.boxes).any(|(o, (lo, hi))| {
                (0..q.len()).all(|i| q[i] >= lo[i] && q[i] <= hi[i]) && o.contains(q)
            })
    }

    pub fn point_in_free_space(&self, q: &Point) -> Result<bool> {
        self.check_dim(q)?;
        Ok(self.is_free(q))
    }

    /// Exact visibility between two free points.
    pub fn segment_in_free_space(&self, q: &Point, q2: &Point) -> Result<bool> {
        self.segment_free_with(q, q2, SegmentCheck::Exact)
    }

    pub fn segment_free_with(&self, q: &Point, q2: &Point, mode: SegmentCheck) -> Result<bool> {
        self.check_dim(q)?;
        self.check_dim(q2)?;
        if !self.is_free(q) || !self.is_free(q2) {
            return Err(Error::InCollision("segment endpoint is not collision-free".into()));
        }
        Ok(self.segment_free_unchecked(q, q2, mode))
    }

    /// Visibility for endpoints already known to be free. The box domain is
    /// convex, so only obstacles need checking.
    pub fn segment_free_unchecked(&self, q: &Point, q2: &Point, mode: SegmentCheck) -> bool {
        match mode {
            SegmentCheck::Exact => !self.obstacles.iter().any(|o| o.segment_hits(q, q2)),
            SegmentCheck::Sampled { step } => {
                let len = (q2 - q).norm();
                let steps = ((len / step.max(f64::MIN_POSITIVE)).ceil() as usize).max(1);
                (0..=steps).all(|k| {
                    let t = k as f64 / steps as f64;
                    self.is_free(&(q + (q2 - q) * t))
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn sphere_env() -> Environment {
        Environment::new(
            dvector![0.0, 0.0],
            dvector![3.0, 3.0],
            vec![ConvexObstacle::sphere(dvector![1.5, 1.5], 0.5).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn point_membership() {
        let env = sphere_env();
        assert!(env.point_in_free_space(&dvector![0.2, 0.2]).unwrap());
        assert!(!env.point_in_free_space(&dvector![1.5, 1.5]).unwrap());
        assert!(!env.point_in_free_space(&dvector![3.5, 0.5]).unwrap());
        // Domain boundary is free.
        assert!(env.point_in_free_space(&dvector![3.0, 0.0]).unwrap());
    }

    #[test]
    fn segments() {
        let env = sphere_env();
        assert!(!env.segment_in_free_space(&dvector![0.2, 1.5], &dvector![2.8, 1.5]).unwrap());
        assert!(env.segment_in_free_space(&dvector![0.2, 0.2], &dvector![2.8, 0.2]).unwrap());
        let boxed = Environment::new(
            dvector![0.0, 0.0],
            dvector![3.0, 3.0],
            vec![ConvexObstacle::aabb(&[1.0, 0.0], &[2.0, 3.0]).unwrap()],
        )
        .unwrap();
        assert!(!boxed.segment_in_free_space(&dvector![0.5, 0.5], &dvector![2.5, 0.5]).unwrap());
    }

    #[test]
    fn segment_endpoint_in_collision_errors() {
        let env = sphere_env();
        assert!(matches!(
            env.segment_in_free_space(&dvector![1.5, 1.5], &dvector![0.2, 0.2]),
            Err(Error::InCollision(_))
        ));
    }

    #[test]
    fn sampled_mode_agrees_on_clear_cases() {
        let env = sphere_env();
        let step = SegmentCheck::Sampled { step: env.default_sampling_step() };
        assert!(!env.segment_free_with(&dvector![0.2, 1.5], &dvector![2.8, 1.5], step).unwrap());
        assert!(env.segment_free_with(&dvector![0.2, 0.2], &dvector![2.8, 0.2], step).unwrap());
    }

    #[test]
    fn invalid_domain_and_full_obstacle() {
        assert!(Environment::new(dvector![1.0], dvector![0.0], vec![]).is_err());
        let full = ConvexObstacle::aabb(&[-1.0, -1.0], &[2.0, 2.0]).unwrap();
        assert!(Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], vec![full]).is_err());
        let unbounded = ConvexObstacle::Polytope(
            HPolytope::new(nalgebra::DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), dvector![0.5]).unwrap(),
        );
        assert!(Environment::new(dvector![0.0, 0.0], dvector![1.0, 1.0], vec![unbounded]).is_err());
    }
}
