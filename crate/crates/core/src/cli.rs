//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when a run fails, 2 for invalid input.

use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::cliques::{max_clique_with_budget, max_clique_no_holes_with, NoHolesOptions};
use crate::demo::triangle_demo;
use crate::pipeline::{ios_named, vcc_named, RegionSet, RunReport, VccConfig, CSV_HEADER};
use crate::render::{render_cover, SvgCanvas};
use crate::scene::Scene;
use crate::visibility::{build_visibility_graph, sample_free_uncovered, GraphDump, VisibilityGraph};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "vcc", version, about = "Approximate convex covers of collision-free space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Vcc,
    Ios,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Vcc => "vcc",
            Algo::Ios => "ios",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cover a scene's free space with convex regions.
    Cover {
        scene: PathBuf,
        algo: Algo,
        /// Coverage threshold.
        #[arg(long)]
        alpha: Option<f64>,
        /// Visibility-graph samples per iteration.
        #[arg(long)]
        samples_k: Option<usize>,
        /// Minimum clique size.
        #[arg(long)]
        smin: Option<usize>,
        /// Monte Carlo samples for the coverage estimate.
        #[arg(long)]
        coverage_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Repeat with seeds `seed..seed+N`.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw a 2D scene and its regions as SVG.
    Render {
        scene: PathBuf,
        regions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overlay a visibility graph dump with vertex coordinates.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Sample a visibility graph and write it as JSON.
    Graph {
        scene: PathBuf,
        #[arg(long, default_value_t = 500)]
        samples_k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximum clique of a graph dump, printed as a JSON index list.
    Clique {
        graph: PathBuf,
        /// Require the clique's hull to contain no other vertex.
        #[arg(long)]
        no_holes: bool,
        #[arg(long, default_value_t = 60.0)]
        time_budget_s: f64,
    },
    /// Maximum cliques with and without the hull constraint in the triangle
    /// with a central hole.
    TriangleDemo {
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Json(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_scene(path: &Path) -> CliResult<Scene> {
    let text = read_input(path)?;
    Scene::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Applies `VCC_THREADS` to the global rayon pool; 0 or unset means one
/// thread per core.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("VCC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Failure::Usage(format!("VCC_THREADS: not a count: {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = configure_threads().and_then(|()| dispatch(cli.command));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Cover { scene, algo, alpha, samples_k, smin, coverage_samples, seed, trials, out } => {
            let overrides = Overrides { alpha, samples_k, smin, coverage_samples, seed };
            cmd_cover(&scene, algo, &overrides, trials, &out)
        }
        Command::Render { scene, regions, out, graph } => cmd_render(&scene, &regions, &out, graph.as_deref()),
        Command::Graph { scene, samples_k, seed, out } => cmd_graph(&scene, samples_k, seed, &out),
        Command::Clique { graph, no_holes, time_budget_s } => cmd_clique(&graph, no_holes, time_budget_s),
        Command::TriangleDemo { epsilon, samples, seed, out } => cmd_triangle_demo(epsilon, samples, seed, &out),
    }
}

struct Overrides {
    alpha: Option<f64>,
    samples_k: Option<usize>,
    smin: Option<usize>,
    coverage_samples: Option<usize>,
    seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut VccConfig) {
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(k) = self.samples_k {
            cfg.k = k;
        }
        if let Some(s) = self.smin {
            cfg.s_min = s;
        }
        if let Some(m) = self.coverage_samples {
            cfg.m = m;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

#[derive(Serialize)]
struct Summary {
    trials: usize,
    n_mean: f64,
    n_std: f64,
    runtime_mean_s: f64,
    runtime_std_s: f64,
    coverage_mean: f64,
    coverage_std: f64,
}

#[derive(Serialize)]
struct CoverReport<'a> {
    runs: &'a [RunReport],
    summary: Summary,
}

/// Mean and sample standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(runs: &[RunReport]) -> Summary {
    let col = |f: fn(&RunReport) -> f64| mean_std(&runs.iter().map(f).collect::<Vec<_>>());
    let (n_mean, n_std) = col(|r| r.n_regions as f64);
    let (runtime_mean_s, runtime_std_s) = col(|r| r.runtime_s);
    let (coverage_mean, coverage_std) = col(|r| r.coverage);
    Summary { trials: runs.len(), n_mean, n_std, runtime_mean_s, runtime_std_s, coverage_mean, coverage_std }
}

fn cmd_cover(scene_path: &Path, algo: Algo, overrides: &Overrides, trials: usize, out: &Path) -> CliResult<()> {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let scene = load_scene(scene_path)?;
    let env = scene.environment()?;
    let stem = scene_path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
    let name = scene.name_or(stem);
    let mut cfg = match algo {
        Algo::Vcc => scene.vcc.clone(),
        Algo::Ios => scene.ios.clone().or_else(|| scene.vcc.clone()),
    }
    .unwrap_or_default();
    overrides.apply(&mut cfg);
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;

    let seeds: Vec<u64> = (0..trials as u64).map(|t| cfg.seed + t).collect();
    let results: Vec<crate::Result<(RegionSet, RunReport)>> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = VccConfig { seed, ..cfg.clone() };
            match algo {
                Algo::Vcc => vcc_named(&env, &cfg, &name),
                Algo::Ios => ios_named(&env, &cfg, &name),
            }
        })
        .collect();
    let mut runs = Vec::with_capacity(trials);
    for (i, r) in results.into_iter().enumerate() {
        let (regions, report) = r.map_err(|e| Failure::Runtime(format!("trial with seed {}: {e}", seeds[i])))?;
        let file = if i == 0 { "regions.json".to_string() } else { format!("regions-seed{}.json", seeds[i]) };
        write_output(&out.join(file), &to_json(&regions)?)?;
        runs.push(report);
    }
    let summary = summarize(&runs);

    let mut rows: Vec<String> = runs.iter().map(RunReport::csv_row).collect();
    if trials > 1 {
        rows.push(format!(
            "{},{},summary,{:.3}±{:.3},{:.6}±{:.6},{:.6}±{:.6}",
            algo.name(),
            name,
            summary.n_mean,
            summary.n_std,
            summary.runtime_mean_s,
            summary.runtime_std_s,
            summary.coverage_mean,
            summary.coverage_std
        ));
    }
    write_output(&out.join("report.json"), &to_json(&CoverReport { runs: &runs, summary })?)?;

    let csv_path = out.join("results.csv");
    let fresh = !csv_path.exists();
    let mut csv = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&csv_path)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", csv_path.display())))?;
    let mut text = String::new();
    if fresh {
        text.push_str(CSV_HEADER);
        text.push('\n');
    }
    for row in &rows {
        text.push_str(row);
        text.push('\n');
    }
    csv.write_all(text.as_bytes()).map_err(|e| Failure::Runtime(format!("{}: {e}", csv_path.display())))?;

    println!("{CSV_HEADER}");
    for row in &rows {
        println!("{row}");
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))
}

fn load_graph(path: &Path) -> CliResult<VisibilityGraph> {
    let dump: GraphDump = parse_json(path)?;
    Ok(VisibilityGraph::from_dump(&dump)?)
}

fn cmd_render(scene_path: &Path, regions_path: &Path, out: &Path, graph: Option<&Path>) -> CliResult<()> {
    let scene = load_scene(scene_path)?;
    let env = scene.environment()?;
    // Fails with a usage error for anything but 2D before reading more input.
    SvgCanvas::new(&env)?;
    let regions: RegionSet = parse_json(regions_path)?;
    for (i, r) in regions.regions.iter().enumerate() {
        if r.polytope.dim() != env.dimension() {
            return Err(Failure::Usage(format!(
                "{}: regions[{i}] has dimension {}, scene has {}",
                regions_path.display(),
                r.polytope.dim(),
                env.dimension()
            )));
        }
    }
    let graph = graph.map(load_graph).transpose()?;
    let svg = render_cover(&env, &regions.polytopes(), graph.as_ref())?;
    write_output(out, &svg)
}

fn cmd_graph(scene_path: &Path, k: usize, seed: u64, out: &Path) -> CliResult<()> {
    let scene = load_scene(scene_path)?;
    let env = scene.environment()?;
    let points = sample_free_uncovered(&env, &[], k, seed)?;
    let graph = build_visibility_graph(&env, &points)?;
    write_output(out, &to_json(&graph.to_dump())?)
}

fn cmd_clique(graph_path: &Path, no_holes: bool, budget_s: f64) -> CliResult<()> {
    if !(budget_s > 0.0 && budget_s.is_finite()) {
        return Err(Failure::Usage(format!("--time-budget-s must be positive, got {budget_s}")));
    }
    let graph = load_graph(graph_path)?;
    let budget = Duration::from_secs_f64(budget_s);
    let clique = if no_holes {
        max_clique_no_holes_with(&graph, &NoHolesOptions { time_budget: budget, ..NoHolesOptions::default() })?.clique
    } else {
        max_clique_with_budget(&graph, budget)?
    };
    println!("{}", serde_json::to_string(clique.vertices()).map_err(|e| Failure::Runtime(e.to_string()))?);
    Ok(())
}

fn cmd_triangle_demo(epsilon: f64, samples: usize, seed: u64, out: &Path) -> CliResult<()> {
    let demo = triangle_demo(epsilon, samples, seed)?;
    fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    write_output(&out.join("triangle.svg"), &demo.to_svg()?)?;
    write_output(&out.join("triangle.json"), &to_json(&demo)?)?;
    println!("epsilon {epsilon}, {samples} samples, seed {seed}");
    if demo.enclosure_guaranteed {
        println!("hole enclosure is guaranteed for dense samples (epsilon <= 1 - sqrt(5/6))");
    } else {
        println!("hole enclosure is NOT guaranteed (epsilon > 1 - sqrt(5/6))");
    }
    println!(
        "unconstrained clique: {} vertices, hull contains hole centroid: {}",
        demo.unconstrained.len(),
        demo.unconstrained_encloses_hole
    );
    println!(
        "hole-free clique: {} vertices, hull contains hole centroid: {}",
        demo.constrained.len(),
        demo.constrained_encloses_hole
    );
    Ok(())
}
