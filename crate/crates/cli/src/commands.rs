use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use pmdnav_core::centrality::{edge_betweenness_with, minmax_scale, EdgeScalarField, PathMetric};
use pmdnav_core::graph::{load_graph, subnetwork_bbox, StreetGraph};
use pmdnav_core::router::{
    batch_experiment, plan_social_route, route_geojson, write_pairs_csv, BatchConfig, BcCache, HazardWeights,
    RouteQuery,
};
use pmdnav_core::scenarios::{
    build_scenario, compare_table, load_scenario_file, preset, run_scenario, summarize, write_trajectory_csv, Geometry,
    PmdMix, ScenarioKind, ScenarioSpec, SimulationResult,
};
use pmdnav_core::sfm::{PmdTypeParams, SfmConstants, World};
use pmdnav_core::synthetic::{grid_city, CitySpec};
use pmdnav_core::zones::{load_zones, SharedZoneSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{
    BatchArgs, CentralityArgs, Cli, Command, CompareArgs, NetworkArgs, PlanArgs, SimulateArgs, ValidateArgs,
    WeightArgs,
};

const DEFAULT_MAX_TIME_S: f64 = 300.0;

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Plan(a) => plan(cli, a),
        Command::Batch(a) => batch(cli, a),
        Command::Centrality(a) => centrality(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Compare(a) => compare(cli, a),
        Command::Validate(a) => validate(cli, a),
    }
}

/// Fails before any work if a referenced input file is missing.
fn require_inputs<'a>(paths: impl IntoIterator<Item = Option<&'a PathBuf>>) -> Result<(), CliError> {
    for p in paths.into_iter().flatten() {
        if !p.is_file() {
            return Err(CliError::invalid(format!("input file {} does not exist", p.display())));
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::invalid(e.to_string()))?;
    text.push('\n');
    write(path, text.as_bytes())
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|e| CliError::io(path, e))
}

/// `route.geojson` -> `route.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn say(cli: &Cli, line: impl AsRef<str>) {
    if !cli.quiet {
        println!("{}", line.as_ref());
    }
}

fn json_from<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn load_network(n: &NetworkArgs) -> Result<(StreetGraph, SharedZoneSet), CliError> {
    if let Some(seed) = n.synthetic_city {
        return Ok(grid_city(&CitySpec::standard(seed)));
    }
    let path = n.graph.as_ref().expect("clap requires --graph without --synthetic-city");
    let g = load_graph(&read(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let zones = match &n.zones {
        Some(p) => load_zones(&read(p)?).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?,
        None => SharedZoneSet::default(),
    };
    Ok((g, zones))
}

fn weights(a: &WeightArgs) -> Result<HazardWeights, CliError> {
    let mut w = HazardWeights::column(a.column as usize);
    if let Some(h) = &a.haz {
        w.haz_ring_scores = h
            .as_slice()
            .try_into()
            .map_err(|_| CliError::invalid(format!("--haz takes three scores, got {}", h.len())))?;
    }
    w.pa_score = a.pa.unwrap_or(w.pa_score);
    w.bc_max = a.bc_max.unwrap_or(w.bc_max);
    w.ic_max = a.ic_max.unwrap_or(w.ic_max);
    w.validate()?;
    Ok(w)
}

fn load_field(path: &Path, g: &StreetGraph) -> Result<EdgeScalarField, CliError> {
    let pairs = EdgeScalarField::read_csv(read(path)?.as_slice())
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    EdgeScalarField::from_pairs(g, pairs).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn plan(cli: &Cli, a: &PlanArgs) -> Result<(), CliError> {
    require_inputs([a.network.graph.as_ref(), a.network.zones.as_ref(), a.ic.as_ref()])?;
    let (g, zones) = load_network(&a.network)?;
    let w = weights(&a.weights)?;
    let ic_layer = match &a.ic {
        Some(p) => Some(Arc::new(load_field(p, &g)?)),
        None => None,
    };
    let q = RouteQuery { ic_layer, min_side_km: a.weights.min_side_km, ..RouteQuery::new(&a.from, &a.to).with_weights(w) };
    let r = plan_social_route(&g, &zones, &q, None)?;
    write_json(&a.out, &route_geojson(&g, &r, &w))?;
    let stats = json!({
        "origin": r.origin,
        "destination": r.destination,
        "length_m": r.length_m,
        "weighted_cost": r.weighted_cost,
        "shortest_length_m": r.shortest_length_m,
        "increment_pct": r.increment_pct,
        "edge_path": r.edge_path,
        "shortest_edge_path": r.shortest_edge_path,
        "box_side_km": r.box_side_km,
        "weights": w,
        "min_side_km": a.weights.min_side_km,
        "ic_layer": a.ic.as_ref().map(|p| p.display().to_string()),
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&a.stats.clone().unwrap_or_else(|| sibling(&a.out, "stats.json")), &stats)?;
    say(
        cli,
        format!(
            "{} -> {}: {:.1} m vs shortest {:.1} m (+{:.2}%), {} edges",
            r.origin,
            r.destination,
            r.length_m,
            r.shortest_length_m,
            r.increment_pct,
            r.edge_path.len()
        ),
    );
    Ok(())
}

fn parse_band(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::invalid(format!("--dist-km expects lo:hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn batch(cli: &Cli, a: &BatchArgs) -> Result<(), CliError> {
    require_inputs([a.network.graph.as_ref(), a.network.zones.as_ref()])?;
    let dist_range_km = parse_band(&a.dist_km)?;
    let cfg = BatchConfig {
        dist_range_km,
        min_side_km: a.weights.min_side_km,
        ..BatchConfig::new(a.pairs, weights(&a.weights)?, cli.seed)
    };
    if cfg.n_pairs == 0 {
        return Err(CliError::invalid("--pairs must be at least 1"));
    }
    let (g, zones) = load_network(&a.network)?;
    let stats = batch_experiment(&g, &zones, &cfg, &BcCache::new())?;
    write_json(&a.out, &stats)?;
    let csv_path = a.pairs_csv.clone().unwrap_or_else(|| sibling(&a.out, "pairs.csv"));
    write_pairs_csv(&stats, create(&csv_path)?)?;
    say(
        cli,
        format!(
            "{} pairs: avg shortest {:.1} m, avg new {:.1} m, increment {:.2}% ({} skipped)",
            stats.n_pairs, stats.avg_shortest_m, stats.avg_new_m, stats.increment_pct, stats.skipped_infeasible
        ),
    );
    Ok(())
}

fn centrality(cli: &Cli, a: &CentralityArgs) -> Result<(), CliError> {
    require_inputs([a.network.graph.as_ref(), a.network.zones.as_ref()])?;
    let (g, _) = load_network(&a.network)?;
    let metric = if a.hops { PathMetric::Hops } else { PathMetric::Length };
    let field = match (&a.from, &a.to) {
        (Some(o), Some(d)) => {
            let sub = subnetwork_bbox(&g, o, d, a.min_side_km).map_err(pmdnav_core::router::RouteError::from)?;
            edge_betweenness_with(&sub.graph, metric)
        }
        _ => edge_betweenness_with(&g, metric),
    };
    let field = match a.scale_max {
        Some(m) => minmax_scale(&field, m).map_err(|e| CliError::invalid(e.to_string()))?,
        None => field,
    };
    field.write_csv(create(&a.out)?)?;
    let max = field.values().iter().copied().fold(0.0, f64::max);
    say(cli, format!("{} edges, max {max:.6}", field.len()));
    Ok(())
}

/// Replaces the device factors of every agent; `Mixed` alternates by index.
fn retype(world: &mut World, mix: PmdMix) {
    for (i, a) in world.agents.iter_mut().enumerate() {
        a.params = match mix {
            PmdMix::Type1 => PmdTypeParams::TYPE1,
            PmdMix::Type2 => PmdTypeParams::TYPE2,
            PmdMix::Mixed if i % 2 == 0 => PmdTypeParams::TYPE1,
            PmdMix::Mixed => PmdTypeParams::TYPE2,
        };
    }
}

fn parse_mix(s: &str) -> Result<PmdMix, CliError> {
    s.parse().map_err(CliError::invalid)
}

fn parse_kind(s: &str) -> Result<ScenarioKind, CliError> {
    s.parse().map_err(CliError::invalid)
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), CliError> {
    require_inputs([a.scenario.as_ref(), a.geometry.as_ref(), a.constants.as_ref()])?;
    let mix = a.pmd_type.as_deref().map(parse_mix).transpose()?;
    let mut constants: SfmConstants = match &a.constants {
        Some(p) => json_from(p)?,
        None => SfmConstants::default(),
    };
    if let Some(dt) = a.dt {
        constants.dt_s = dt;
    }
    let mut max_time = a.max_time;
    let mut scene = json!({});
    let world = if let Some(kind) = &a.kind {
        let geometry: Geometry = match &a.geometry {
            Some(p) => json_from(p)?,
            None => Geometry::default(),
        };
        let spec = ScenarioSpec {
            geometry,
            constants,
            ..ScenarioSpec::new(parse_kind(kind)?, mix.unwrap_or(PmdMix::Mixed), cli.seed)
        };
        scene = json!({ "kind": spec.kind, "pmd_type": spec.pmd_type, "geometry": spec.geometry });
        build_scenario(&spec)?
    } else {
        let mut world = if let Some(name) = &a.preset {
            scene = json!({ "preset": name });
            let mut w = preset(name).ok_or_else(|| CliError::invalid(format!("unknown preset {name:?}")))?;
            if a.constants.is_some() {
                w.constants = constants;
            }
            if let Some(dt) = a.dt {
                w.constants.dt_s = dt;
            }
            w
        } else {
            let path = a.scenario.as_ref().expect("clap requires a scene");
            let mut file = load_scenario_file(&read(path)?)?;
            scene = json!({ "scenario": path.display().to_string() });
            if a.constants.is_some() {
                file.constants = constants;
            }
            if a.dt.is_some() {
                file.dt = a.dt;
            }
            max_time = max_time.or(file.max_time);
            file.to_world()?
        };
        if let Some(m) = mix {
            retype(&mut world, m);
            scene["pmd_type"] = json!(m);
        }
        world.validate().map_err(pmdnav_core::scenarios::ScenarioError::from)?;
        world
    };
    let max_time = max_time.unwrap_or(DEFAULT_MAX_TIME_S);
    let effective = world.constants;
    let result = run_scenario(world, max_time)?;
    write_trajectory_csv(&result, create(&a.out)?)?;
    if let Some(meta) = &a.meta {
        write_json(meta, &simulation_meta(cli, scene, effective, max_time, &result))?;
    }
    say(
        cli,
        format!(
            "end {:.1} s, {}/{} arrived{}, min consecutive displacement {}",
            result.end_time_s,
            result.arrived_count,
            result.agent_count,
            if result.censored { " (censored)" } else { "" },
            result.min_consecutive_displacement_m.map_or("n/a".into(), |m| format!("{m:.4} m")),
        ),
    );
    if result.censored {
        return Err(CliError::infeasible(
            "censored",
            format!("{} of {} agents arrived before the {max_time} s cap", result.arrived_count, result.agent_count),
        ));
    }
    Ok(())
}

fn simulation_meta(cli: &Cli, scene: Value, constants: SfmConstants, max_time: f64, r: &SimulationResult) -> Value {
    json!({
        "scene": scene,
        "seed": cli.seed,
        "constants": constants,
        "max_time_s": max_time,
        "end_time_s": r.end_time_s,
        "censored": r.censored,
        "arrived": r.arrived_count,
        "agents": r.agent_count,
        "samples_per_agent": r.trajectories.first().map_or(0, |t| t.samples.len()),
        "min_consecutive_displacement_m": r.min_consecutive_displacement_m,
        "resolvable_at_0_2_m": r.resolvable_at(0.2),
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::invalid(format!("--seeds expects a:b or a comma list, got {s:?}"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once(':') {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

fn compare(cli: &Cli, a: &CompareArgs) -> Result<(), CliError> {
    require_inputs([a.geometry.as_ref(), a.constants.as_ref()])?;
    let kinds = if a.kind == "all" { ScenarioKind::ALL.to_vec() } else { vec![parse_kind(&a.kind)?] };
    let seeds = parse_seeds(&a.seeds)?;
    let mut base = ScenarioSpec::new(kinds[0], PmdMix::Type1, 0);
    if let Some(p) = &a.geometry {
        base.geometry = json_from(p)?;
    }
    if let Some(p) = &a.constants {
        base.constants = json_from(p)?;
    }
    let rows = compare_table(&kinds, &seeds, &base, a.max_time)?;
    let mut w = csv::Writer::from_writer(create(&a.out)?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(&a.out, e))?;
    let summary = summarize(&rows);
    if let Some(p) = &a.summary {
        write_json(p, &json!({ "seeds": seeds, "max_time_s": a.max_time, "kinds": summary }))?;
    }
    say(cli, "kind           median_t1  median_t2  ratio  censored");
    let fmt = |v: Option<f64>, digits: usize| v.map_or("-".to_string(), |x| format!("{x:.digits$}"));
    for s in &summary {
        say(
            cli,
            format!(
                "{:<14} {:>9} {:>10} {:>6}  {}/{}",
                s.kind.as_str(),
                fmt(s.median_t1, 1),
                fmt(s.median_t2, 1),
                fmt(s.ratio, 2),
                s.censored,
                s.runs
            ),
        );
    }
    Ok(())
}

fn validate(cli: &Cli, a: &ValidateArgs) -> Result<(), CliError> {
    let inputs = [a.graph.as_ref(), a.zones.as_ref(), a.ic.as_ref(), a.scenario.as_ref()];
    if inputs.iter().all(Option::is_none) {
        return Err(CliError::invalid("nothing to validate; pass --graph, --zones, --ic or --scenario"));
    }
    require_inputs(inputs)?;
    let mut report = serde_json::Map::new();
    let graph = match &a.graph {
        Some(p) => {
            let g = load_graph(&read(p)?).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?;
            report.insert("graph".into(), json!({ "nodes": g.node_count(), "edges": g.edge_count() }));
            Some(g)
        }
        None => None,
    };
    if let Some(p) = &a.zones {
        let z = load_zones(&read(p)?).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?;
        report.insert("zones".into(), json!({ "meso_zones": z.meso_zones.len(), "micro_points": z.micro_points.len() }));
    }
    if let Some(p) = &a.ic {
        let n = match &graph {
            Some(g) => load_field(p, g)?.len(),
            None => EdgeScalarField::read_csv(read(p)?.as_slice())
                .map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?
                .len(),
        };
        report.insert("ic".into(), json!({ "edges": n }));
    }
    if let Some(p) = &a.scenario {
        let f = load_scenario_file(&read(p)?)?;
        report.insert("scenario".into(), json!({ "agents": f.agents.len(), "obstacles": f.obstacles.len(), "walls": f.walls.len() }));
    }
    say(cli, Value::Object(report).to_string());
    Ok(())
}
