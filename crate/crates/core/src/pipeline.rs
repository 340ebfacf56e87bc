//! Visibility Clique Cover, the IRIS-only baseline and Monte Carlo coverage.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliques::truncated_clique_cover_with_budget;
use crate::geometry::{region_obstacle_disjoint, Ellipsoid, Environment, HPolytope, Point};
use crate::inflation::{clique_to_ellipsoid, inflate_polytope_one_iteration, iris_full, InflationConfig, SeedEllipsoid};
use crate::visibility::{
    build_visibility_graph, covered, sample_free_uncovered_with, seeded_rng, REJECTIONS_PER_SAMPLE,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VccConfig {
    pub alpha: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub s_min: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub max_outer_iterations: usize,
    /// Region cap for the IRIS-only baseline, which adds one region per
    /// outer iteration.
    pub ios_max_regions: usize,
    pub boundary_backoff: f64,
    pub clique_time_budget_s: f64,
    pub ios_max_iterations: usize,
    pub ios_termination_threshold: f64,
}

impl Default for VccConfig {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            k: 500,
            s_min: 10,
            m: 5000,
            seed: 0,
            max_outer_iterations: 50,
            ios_max_regions: 1000,
            boundary_backoff: 1e-6,
            clique_time_budget_s: 60.0,
            ios_max_iterations: 10,
            ios_termination_threshold: 0.02,
        }
    }
}

impl VccConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidInput(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.s_min == 0 || self.k < self.s_min {
            return Err(Error::InvalidInput(format!("need K ≥ s_min ≥ 1, got K={} s_min={}", self.k, self.s_min)));
        }
        if self.m == 0 {
            return Err(Error::InvalidInput("M must be positive".into()));
        }
        if self.max_outer_iterations == 0 || self.ios_max_regions == 0 {
            return Err(Error::InvalidInput("iteration and region caps must be positive".into()));
        }
        if !(self.clique_time_budget_s > 0.0 && self.clique_time_budget_s.is_finite()) {
            return Err(Error::InvalidInput("clique time budget must be positive".into()));
        }
        self.inflation().validate()
    }

    pub fn inflation(&self) -> InflationConfig {
        InflationConfig {
            max_hyperplanes: None,
            boundary_backoff: self.boundary_backoff,
            ios_max_iterations: self.ios_max_iterations,
            ios_termination_threshold: self.ios_termination_threshold,
        }
    }

    fn clique_budget(&self) -> Duration {
        Duration::from_secs_f64(self.clique_time_budget_s)
    }
}

/// How a region was seeded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSeed {
    Clique { clique_size: usize, recentered: bool, ellipsoid: Ellipsoid },
    Point { point: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    #[serde(flatten)]
    pub polytope: HPolytope,
    pub seed: RegionSeed,
    pub iteration: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    pub regions: Vec<Region>,
    /// Coverage estimate taken at the start of each outer iteration and once
    /// after the last one.
    pub coverage: Vec<f64>,
}

impl RegionSet {
    pub fn polytopes(&self) -> Vec<HPolytope> {
        self.regions.iter().map(|r| r.polytope.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ThresholdMet,
    IterationCap,
    RegionCap,
    CoverageSaturated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub coverage_before: f64,
    pub samples: usize,
    pub cliques: usize,
    pub s_min: usize,
    pub regions_added: usize,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algo: String,
    pub env: String,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n_regions: usize,
    pub runtime_s: f64,
    pub coverage: f64,
    pub alpha: f64,
    pub threshold_met: bool,
    pub stop_reason: StopReason,
    pub iterations: Vec<IterationLog>,
}

pub const CSV_HEADER: &str = "algo,env,seed,N,runtime_s,coverage";

impl RunReport {
    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        write!(s, "{},{},{},{},{:.6},{:.6}", self.algo, self.env, self.seed, self.n_regions, self.runtime_s, self.coverage)
            .expect("writing to a String");
        s
    }
}

/// Fraction of `m` uniform free samples inside some region.
pub fn check_coverage(env: &Environment, regions: &[HPolytope], m: usize, seed: u64) -> Result<f64> {
    check_coverage_with(env, regions, m, &mut seeded_rng(seed, 0))
}

pub fn check_coverage_with<R: Rng + ?Sized>(
    env: &Environment,
    regions: &[HPolytope],
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("coverage sample count must be positive".into()));
    }
    let budget = REJECTIONS_PER_SAMPLE * m as u64;
    let mut samples: Vec<Point> = Vec::with_capacity(m);
    let mut rejections = 0u64;
    while samples.len() < m {
        let q = env.sample_domain(rng);
        if env.is_free(&q) {
            samples.push(q);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= budget {
                return Err(Error::Numerical("cannot draw collision-free samples".into()));
            }
        }
    }
    let hits = samples.par_iter().filter(|q| covered(regions, q)).count();
    Ok(hits as f64 / m as f64)
}

fn coverage_stream(iteration: usize) -> u64 {
    2 * iteration as u64 + 1
}

fn sampling_stream(iteration: usize) -> u64 {
    2 * iteration as u64
}

fn verify_region(env: &Environment, p: &HPolytope) -> Result<()> {
    for (j, o) in env.obstacles().iter().enumerate() {
        if !region_obstacle_disjoint(p, o)? {
            return Err(Error::Numerical(format!("inflated region intersects obstacle {j}")));
        }
    }
    Ok(())
}

fn seed_for_clique(env: &Environment, points: &[Point]) -> Result<SeedEllipsoid> {
    if let [single] = points {
        return Ok(SeedEllipsoid { ellipsoid: Ellipsoid::ball(single.clone(), 1.0)?, source_size: 1, recentered: false });
    }
    clique_to_ellipsoid(env, points)
}

struct Run<'a> {
    env: &'a Environment,
    cfg: &'a VccConfig,
    start: Instant,
    set: RegionSet,
    polys: Vec<HPolytope>,
    log: Vec<IterationLog>,
}

impl<'a> Run<'a> {
    fn new(env: &'a Environment, cfg: &'a VccConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { env, cfg, start: Instant::now(), set: RegionSet::default(), polys: vec![], log: vec![] })
    }

    fn coverage(&mut self, iteration: usize) -> Result<f64> {
        let c = if self.polys.is_empty() {
            0.0
        } else {
            check_coverage_with(self.env, &self.polys, self.cfg.m, &mut seeded_rng(self.cfg.seed, coverage_stream(iteration)))?
        };
        self.set.coverage.push(c);
        Ok(c)
    }

    fn sample(&self, iteration: usize, k: usize) -> Result<Option<Vec<Point>>> {
        let mut rng = seeded_rng(self.cfg.seed, sampling_stream(iteration));
        match sample_free_uncovered_with(self.env, &self.polys, k, &mut rng) {
            Ok(s) => Ok(Some(s)),
            Err(Error::CoverageSaturated { rejections }) => {
                log::info!("uncovered free space saturated after {rejections} rejections");
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn push(&mut self, polytope: HPolytope, seed: RegionSeed, iteration: usize) {
        self.polys.push(polytope.clone());
        self.set.regions.push(Region { polytope, seed, iteration });
    }

    fn finish(self, algo: &str, env_name: &str, stop: StopReason) -> (RegionSet, RunReport) {
        let coverage = self.set.coverage.last().copied().unwrap_or(0.0);
        let report = RunReport {
            algo: algo.into(),
            env: env_name.into(),
            seed: self.cfg.seed,
            n_regions: self.set.len(),
            runtime_s: self.start.elapsed().as_secs_f64(),
            coverage,
            alpha: self.cfg.alpha,
            threshold_met: coverage > self.cfg.alpha,
            stop_reason: stop,
            iterations: self.log,
        };
        (self.set, report)
    }
}

/// Visibility Clique Cover.
pub fn vcc(env: &Environment, cfg: &VccConfig) -> Result<(RegionSet, RunReport)> {
    vcc_named(env, cfg, "env")
}

pub fn vcc_named(env: &Environment, cfg: &VccConfig, env_name: &str) -> Result<(RegionSet, RunReport)> {
    let mut run = Run::new(env, cfg)?;
    let inflation = cfg.inflation();
    let mut s_min = cfg.s_min;
    let mut iteration = 0;
    let stop = loop {
        let coverage = run.coverage(iteration)?;
        if coverage > cfg.alpha {
            break StopReason::ThresholdMet;
        }
        if iteration == cfg.max_outer_iterations {
            break StopReason::IterationCap;
        }
        let Some(samples) = run.sample(iteration, cfg.k)? else {
            break StopReason::CoverageSaturated;
        };
        let graph = build_visibility_graph(env, &samples)?;
        let cover = truncated_clique_cover_with_budget(&graph, s_min, cfg.clique_budget())?;
        let used_s_min = s_min;
        if cover.cliques.is_empty() {
            s_min = (s_min / 2).max(2).min(s_min);
        }
        let built: Vec<(SeedEllipsoid, HPolytope)> = cover
            .cliques
            .par_iter()
            .map(|c| {
                let pts: Vec<Point> = c.vertices().iter().map(|&v| samples[v].clone()).collect();
                let seed = seed_for_clique(env, &pts)?;
                let region = inflate_polytope_one_iteration(env, &seed.ellipsoid, &inflation, &[])?;
                verify_region(env, &region)?;
                Ok((seed, region))
            })
            .collect::<Result<_>>()?;
        let added = built.len();
        for (seed, region) in built {
            let provenance = RegionSeed::Clique {
                clique_size: seed.source_size,
                recentered: seed.recentered,
                ellipsoid: seed.ellipsoid,
            };
            run.push(region, provenance, iteration);
        }
        log::info!("vcc iteration {iteration}: coverage {coverage:.4}, {added} regions, s_min {used_s_min}");
        run.log.push(IterationLog {
            iteration,
            coverage_before: coverage,
            samples: samples.len(),
            cliques: cover.cliques.len(),
            s_min: used_s_min,
            regions_added: added,
            elapsed_s: run.start.elapsed().as_secs_f64(),
        });
        iteration += 1;
    };
    Ok(run.finish("vcc", env_name, stop))
}

/// IRIS-only baseline: grow one region at a time from an uncovered sample,
/// treating earlier regions as obstacles.
pub fn ios(env: &Environment, cfg: &VccConfig) -> Result<(RegionSet, RunReport)> {
    ios_named(env, cfg, "env")
}

pub fn ios_named(env: &Environment, cfg: &VccConfig, env_name: &str) -> Result<(RegionSet, RunReport)> {
    let mut run = Run::new(env, cfg)?;
    let inflation = cfg.inflation();
    let mut iteration = 0;
    let stop = loop {
        let coverage = run.coverage(iteration)?;
        if coverage > cfg.alpha {
            break StopReason::ThresholdMet;
        }
        if run.set.len() >= cfg.ios_max_regions {
            break StopReason::RegionCap;
        }
        let Some(samples) = run.sample(iteration, 1)? else {
            break StopReason::CoverageSaturated;
        };
        let seed = &samples[0];
        let region = iris_full(env, seed, &inflation, &run.polys)?;
        verify_region(env, &region)?;
        run.push(region, RegionSeed::Point { point: seed.iter().copied().collect() }, iteration);
        run.log.push(IterationLog {
            iteration,
            coverage_before: coverage,
            samples: 1,
            cliques: 0,
            s_min: 0,
            regions_added: 1,
            elapsed_s: run.start.elapsed().as_secs_f64(),
        });
        iteration += 1;
    };
    Ok(run.finish("ios", env_name, stop))
}
