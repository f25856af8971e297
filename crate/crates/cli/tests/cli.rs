use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pmdnav_core::graph::serialize_graph;
use pmdnav_core::shortest_path;
use pmdnav_core::synthetic::{grid_graph, two_route_fixture, GridSpec};
use serde_json::Value;
use tempfile::TempDir;

fn pmdnav(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmdnav")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// The stderr of a failed run is exactly one JSON line.
fn error_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    serde_json::from_str(text.trim_end()).unwrap()
}

fn fixture_files(dir: &Path) {
    let (g, zones) = two_route_fixture(1150.0);
    fs::write(dir.join("g.json"), serialize_graph(&g)).unwrap();
    fs::write(dir.join("z.json"), serde_json::to_vec(&zones).unwrap()).unwrap();
}

fn read_json(path: impl AsRef<Path>) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn assert_geojson(v: &Value) {
    assert_eq!(v["type"], "FeatureCollection");
    let features = v["features"].as_array().unwrap();
    assert!(!features.is_empty());
    for f in features {
        assert_eq!(f["type"], "Feature");
        assert_eq!(f["geometry"]["type"], "LineString");
        let coords = f["geometry"]["coordinates"].as_array().unwrap();
        assert!(coords.len() >= 2);
        for c in coords {
            let c = c.as_array().unwrap();
            assert_eq!(c.len(), 2);
            assert!(c[0].as_f64().unwrap().abs() <= 180.0 && c[1].as_f64().unwrap().abs() <= 90.0);
        }
        assert!(f["properties"].is_object());
    }
}

#[test]
fn plan_with_zero_hazards_follows_shortest_path() {
    let dir = TempDir::new().unwrap();
    let spec = GridSpec { length_jitter: 0.3, jitter_seed: 2, ..GridSpec::new(8, 8, 100.0) };
    let (g, _) = grid_graph(&spec);
    fs::write(dir.path().join("grid.json"), serialize_graph(&g)).unwrap();
    fs::write(dir.path().join("z.json"), r#"{"meso_zones": [{"lat": 28.553, "lon": 77.153}]}"#).unwrap();
    let o = pmdnav(
        dir.path(),
        &[
            "plan", "--graph", "grid.json", "--zones", "z.json", "--from", "r0c0", "--to", "r7c6", "--haz", "0,0,0",
            "--pa", "0", "--bc-max", "0", "--ic-max", "0", "--out", "route.geojson",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let route = read_json(dir.path().join("route.geojson"));
    assert_geojson(&route);
    let (path, len) = shortest_path(&g, "r0c0", "r7c6").unwrap();
    let expect: Vec<Value> = path
        .nodes
        .iter()
        .map(|&n| {
            let p = g.location(n);
            serde_json::json!([p.lon, p.lat])
        })
        .collect();
    assert_eq!(route["features"][0]["geometry"]["coordinates"].as_array().unwrap(), &expect);
    let stats = read_json(dir.path().join("route.stats.json"));
    assert_eq!(stats["length_m"].as_f64().unwrap(), len);
    assert_eq!(stats["increment_pct"].as_f64().unwrap(), 0.0);
}

#[test]
fn plan_takes_the_clean_detour() {
    let dir = TempDir::new().unwrap();
    fixture_files(dir.path());
    let args = [
        "plan", "--graph", "g.json", "--zones", "z.json", "--from", "o", "--to", "d", "--haz", "0.2,0,0", "--pa", "0",
        "--bc-max", "0", "--ic-max", "0", "--out", "r.geojson", "--stats", "r.json",
    ];
    let o = pmdnav(dir.path(), &args);
    assert_eq!(code(&o), 0);
    let stats = read_json(dir.path().join("r.json"));
    assert_eq!(stats["edge_path"], serde_json::json!(["oa", "ab", "bc", "cd"]));
    let edges = &read_json(dir.path().join("r.geojson"))["features"];
    assert_eq!(edges.as_array().unwrap().len(), 5);
    assert_eq!(edges[1]["properties"]["edge_id"], "oa");
}

#[test]
fn disconnected_query_exits_2() {
    let dir = TempDir::new().unwrap();
    fixture_files(dir.path());
    let o = pmdnav(dir.path(), &["plan", "--graph", "g.json", "--from", "d", "--to", "o", "--out", "r.geojson"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["exit_code"], 2);
}

#[test]
fn validation_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    fixture_files(dir.path());
    let cases: [&[&str]; 6] = [
        &["batch", "--graph", "g.json", "--pairs", "0", "--out", "b.json"],
        &["plan", "--graph", "missing.json", "--from", "o", "--to", "d", "--out", "r.geojson"],
        &["plan", "--graph", "g.json", "--from", "o", "--to", "nowhere", "--out", "r.geojson"],
        &["plan", "--graph", "g.json", "--from", "o", "--to", "d", "--haz", "0.1,0.2,0.3", "--out", "r.geojson"],
        &["simulate", "--kind", "plaza", "--out", "t.csv"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = pmdnav(dir.path(), args);
        assert_eq!(code(&o), 1, "{args:?}");
        let e = error_json(&o);
        assert_eq!(e["exit_code"], 1);
        assert!(e["message"].is_string());
    }
    // No output is written when validation fails.
    assert!(!dir.path().join("b.json").exists());
}

#[test]
fn help_exits_0() {
    let dir = TempDir::new().unwrap();
    let o = pmdnav(dir.path(), &["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("simulate"));
}

#[test]
fn compare_table_shape() {
    let dir = TempDir::new().unwrap();
    let o = pmdnav(dir.path(), &["-q", "compare", "--kind", "all", "--seeds", "0:9", "--out", "t3.csv", "--summary", "s.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("t3.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,seed,pmd_type,end_time_s,censored,arrived,agents"));
    assert_eq!(lines.count(), 3 * 10 * 2);
    let summary = read_json(dir.path().join("s.json"));
    assert_eq!(summary["kinds"].as_array().unwrap().len(), 3);
}

#[test]
fn outputs_ignore_thread_count() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let run = |jobs: &str, tag: &str| {
        let batch = pmdnav(
            d,
            &[
                "--jobs", jobs, "--seed", "4", "-q", "batch", "--synthetic-city", "2", "--pairs", "4", "--dist-km",
                "0.8:1.5", "--min-side-km", "1", "--out", &format!("b{tag}.json"),
            ],
        );
        assert_eq!(code(&batch), 0, "{}", String::from_utf8_lossy(&batch.stderr));
        let cmp = pmdnav(d, &["--jobs", jobs, "-q", "compare", "--seeds", "0:2", "--out", &format!("c{tag}.csv")]);
        assert_eq!(code(&cmp), 0);
    };
    run("1", "1");
    run("8", "8");
    run("8", "8b");
    for (a, b) in [("b1.json", "b8.json"), ("b1.pairs.csv", "b8.pairs.csv"), ("c1.csv", "c8.csv"), ("b8.json", "b8b.json")] {
        assert_eq!(fs::read(d.join(a)).unwrap(), fs::read(d.join(b)).unwrap(), "{a} vs {b}");
    }
    let stats = read_json(d.join("b1.json"));
    assert_eq!(stats["n_pairs"], 4);
    assert_eq!(stats["seed"], 4);
}

#[test]
fn simulate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for tag in ["a", "b"] {
        let o = pmdnav(
            d,
            &[
                "--seed", "3", "simulate", "--kind", "street_heavy", "--type", "type2", "--dt", "0.1", "--max-time",
                "300", "--out", &format!("{tag}.csv"), "--meta", &format!("{tag}.json"),
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());
    assert_eq!(fs::read(d.join("a.json")).unwrap(), fs::read(d.join("b.json")).unwrap());
    let meta = read_json(d.join("a.json"));
    assert_eq!(meta["agents"], 20);
    assert_eq!(meta["scene"]["kind"], "street_heavy");
    assert_eq!(meta["scene"]["geometry"]["street_length_m"], 30.0);
    assert!(meta["min_consecutive_displacement_m"].as_f64().unwrap() > 0.0);
    assert!(meta["resolvable_at_0_2_m"].is_boolean());
}

#[test]
fn censored_simulation_exits_2_with_output() {
    let dir = TempDir::new().unwrap();
    let o = pmdnav(dir.path(), &["simulate", "--kind", "gate_low", "--max-time", "2", "--out", "t.csv", "--meta", "m.json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"], "censored");
    assert!(read_json(dir.path().join("m.json"))["censored"].as_bool().unwrap());
    assert!(dir.path().join("t.csv").exists());
}

#[test]
fn simulate_presets_and_files() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let o = pmdnav(d, &["simulate", "--preset", "fig6a", "--out", "p.csv"]);
    assert_eq!(code(&o), 0);
    let scene = r#"{"agents": [{"position": [0, 0], "goal": [4, 0]}, {"position": [4, 0.5], "goal": [0, 0.5], "type": "type2"}],
                   "walls": [{"kind": "segment", "a": [-1, -1], "b": [5, -1]}], "max_time": 60}"#;
    fs::write(d.join("s.json"), scene).unwrap();
    let v = pmdnav(d, &["validate", "--scenario", "s.json"]);
    assert_eq!(code(&v), 0);
    let report: Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(report["scenario"]["agents"], 2);
    let o = pmdnav(d, &["simulate", "--scenario", "s.json", "--type", "type1", "--out", "s.csv", "--meta", "s.meta.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(d.join("s.meta.json"))["max_time_s"], 60.0);
    fs::write(d.join("bad.json"), r#"{"agents": [{"position": [0, 0]}]}"#).unwrap();
    assert_eq!(code(&pmdnav(d, &["validate", "--scenario", "bad.json"])), 1);
}

#[test]
fn centrality_export() {
    let dir = TempDir::new().unwrap();
    fixture_files(dir.path());
    let o = pmdnav(dir.path(), &["centrality", "--graph", "g.json", "--out", "bc.csv"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("bc.csv")).unwrap();
    assert!(text.starts_with("edge_id,value\n"));
    assert_eq!(text.lines().count(), 7);
    let o = pmdnav(dir.path(), &["centrality", "--graph", "g.json", "--scale-max", "0.06", "--out", "s.csv"]);
    assert_eq!(code(&o), 0);
    let max = fs::read_to_string(dir.path().join("s.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((max - 0.06).abs() < 1e-15);
    // The exported field round-trips as a usage-density layer.
    let v = pmdnav(dir.path(), &["validate", "--graph", "g.json", "--ic", "bc.csv"]);
    assert_eq!(code(&v), 0);
}
