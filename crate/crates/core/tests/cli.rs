use std::path::Path;
use std::process::{Command, Output};

use vcc::pipeline::{vcc, RegionSet, VccConfig};
use vcc::scene::Scene;

const SLABS: &str = r#"{
    "name": "slabs",
    "dimension": 2,
    "domain": {"lower": [0, 0], "upper": [4, 4]},
    "obstacles": [
        {"type": "box", "lower": [1, 0], "upper": [1.5, 3]},
        {"type": "box", "lower": [2.5, 1], "upper": [3, 4]}
    ]
}"#;

fn vcc_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcc")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn cover_writes_artifacts_that_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "slabs.json", SLABS);
    let out = dir.path().join("out");
    let o = vcc_bin(&["cover", &scene, "vcc", "--alpha", "0.8", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = std::fs::read_to_string(out.join("regions.json")).unwrap();
    let loaded: RegionSet = serde_json::from_str(&text).unwrap();
    assert!(*loaded.coverage.last().unwrap() > 0.8);

    // The same run in-process yields bit-identical matrices.
    let env = Scene::from_json(SLABS).unwrap().environment().unwrap();
    let (direct, _) = vcc(&env, &VccConfig { seed: 7, ..VccConfig::default() }).unwrap();
    assert_eq!(loaded.polytopes(), direct.polytopes());

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["runs"][0]["N"], loaded.regions.len());
}

#[test]
fn trials_append_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "slabs.json", SLABS);
    let out = dir.path().join("out");
    let o = vcc_bin(&["cover", &scene, "ios", "--trials", "10", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "algo,env,seed,N,runtime_s,coverage");
    assert_eq!(lines.len(), 12);
    for (i, row) in lines[1..11].iter().enumerate() {
        assert!(row.starts_with(&format!("ios,slabs,{},", 3 + i)), "{row}");
    }
    assert!(lines[11].starts_with("ios,slabs,summary,") && lines[11].contains('±'));
    assert!(out.join("regions-seed12.json").exists());
}

#[test]
fn schema_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dimension": 2, "domain": {"lower": [0, 0], "upper": [1, 1]},
            "obstacles": [{"type": "box", "lower": [0.2, 0.2], "upper": [0.1, 0.4]}]}"#,
    );
    let o = vcc_bin(&["cover", &bad, "vcc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("obstacles[0].upper"));

    let o = vcc_bin(&["cover", dir.path().join("missing.json").to_str().unwrap(), "vcc"]);
    assert_eq!(o.status.code(), Some(2));

    let scene = write(dir.path(), "slabs.json", SLABS);
    let o = vcc_bin(&["cover", &scene, "vcc", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = vcc_bin(&["cover", &scene, "greedy"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn render_draws_regions_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "slabs.json", SLABS);
    let out = dir.path().join("out");
    let o = vcc_bin(&["cover", &scene, "vcc", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let regions = out.join("regions.json");
    let n = serde_json::from_str::<RegionSet>(&std::fs::read_to_string(&regions).unwrap()).unwrap().len();

    let graph = dir.path().join("graph.json");
    let o = vcc_bin(&["graph", &scene, "--samples-k", "30", "--out", graph.to_str().unwrap()]);
    assert!(o.status.success());
    let svg_path = dir.path().join("cover.svg");
    let o = vcc_bin(&[
        "render",
        &scene,
        regions.to_str().unwrap(),
        "--out",
        svg_path.to_str().unwrap(),
        "--graph",
        graph.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(svg_path).unwrap();
    assert_eq!(svg.matches("fill-opacity=\"0.3\"").count(), n);
    let lines = svg.matches("<line").count();
    assert!(lines > 0 && lines <= 30 * 29 / 2);

    let o = vcc_bin(&["clique", graph.to_str().unwrap(), "--no-holes"]);
    assert!(o.status.success());
    let members: Vec<usize> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!members.is_empty());
}

#[test]
fn render_rejects_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "cube.json", r#"{"dimension": 3, "domain": {"lower": [0, 0, 0], "upper": [1, 1, 1]}}"#);
    let regions = write(dir.path(), "regions.json", r#"{"regions": [], "coverage": []}"#);
    let o = vcc_bin(&["render", &scene, &regions, "--out", dir.path().join("x.svg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("render supports 2D only"));
}

#[test]
fn triangle_demo_reports_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = vcc_bin(&["triangle-demo", "--epsilon", "0.05", "--samples", "100", "--seed", "0", "--out", out]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("unconstrained clique") && text.contains("hole-free clique"));
    let svg = std::fs::read_to_string(dir.path().join("triangle.svg")).unwrap();
    assert!(svg.contains("#d02020") && svg.contains("#20a040"));

    let o = vcc_bin(&["triangle-demo", "--epsilon", "0.3", "--samples", "40", "--out", out]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("NOT guaranteed"));

    let o = vcc_bin(&["triangle-demo", "--epsilon", "0.4", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_vcc"))
        .args(["triangle-demo", "--samples", "10"])
        .env("VCC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
