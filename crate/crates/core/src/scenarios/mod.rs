//! Corridor and gate scenes, the Type-1 vs Type-2 end-time comparison, and
//! trajectory resolution analysis.

mod file;

pub use file::{load_scenario_file, AgentSpec, ScenarioFile};

use std::fmt;
use std::str::FromStr;

use glam::{dvec2, DVec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sfm::{AgentState, Obstacle, PmdType, PmdTypeParams, SfmConstants, SfmError, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("could not place {wanted} agents without overlap")]
    Crowded { wanted: usize },
    #[error(transparent)]
    Sfm(#[from] SfmError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("no moving samples")]
    NoMovingSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    GateLow,
    StreetLow,
    StreetHeavy,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::GateLow, ScenarioKind::StreetLow, ScenarioKind::StreetHeavy];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::GateLow => "gate_low",
            ScenarioKind::StreetLow => "street_low",
            ScenarioKind::StreetHeavy => "street_heavy",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown scenario kind {s:?}"))
    }
}

/// Device types assigned to the agents of a built scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmdMix {
    Type1,
    Type2,
    /// Alternating Type-1 and Type-2 within each flow direction.
    Mixed,
}

impl FromStr for PmdMix {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "type1" => Ok(PmdMix::Type1),
            "type2" => Ok(PmdMix::Type2),
            "mixed" => Ok(PmdMix::Mixed),
            _ => Err(format!("unknown pmd type {s:?}")),
        }
    }
}

/// Scene dimensions in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub street_length_m: f64,
    pub street_width_m: f64,
    /// Bollards placed a third and two thirds along the street.
    pub bollards: bool,
    pub room_width_m: f64,
    pub room_depth_m: f64,
    pub gate_opening_m: f64,
    pub low_crowd: usize,
    pub heavy_crowd: usize,
    /// Minimum spacing between spawned agents.
    pub spawn_gap_m: f64,
    /// Minimum spacing between goals, so agents frozen on arrival leave
    /// room for the rest.
    pub goal_gap_m: f64,
    /// Open plazas beyond each street end hold the goals.
    pub plaza_depth_m: f64,
    pub plaza_width_m: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            street_length_m: 30.0,
            street_width_m: 4.0,
            bollards: true,
            room_width_m: 8.0,
            room_depth_m: 10.0,
            gate_opening_m: 1.2,
            low_crowd: 5,
            heavy_crowd: 20,
            spawn_gap_m: 0.7,
            goal_gap_m: 1.2,
            plaza_depth_m: 8.0,
            plaza_width_m: 12.0,
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let dims = [
            ("street_length_m", self.street_length_m),
            ("street_width_m", self.street_width_m),
            ("room_width_m", self.room_width_m),
            ("room_depth_m", self.room_depth_m),
            ("gate_opening_m", self.gate_opening_m),
            ("spawn_gap_m", self.spawn_gap_m),
            ("goal_gap_m", self.goal_gap_m),
            ("plaza_depth_m", self.plaza_depth_m),
            ("plaza_width_m", self.plaza_width_m),
        ];
        for (name, v) in dims {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ScenarioError::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        if self.street_width_m < 1.5 || self.street_length_m < 6.0 {
            return Err(ScenarioError::Geometry("street must be at least 6 m long and 1.5 m wide".into()));
        }
        if self.plaza_width_m < self.street_width_m || self.plaza_depth_m < 2.0 {
            return Err(ScenarioError::Geometry("plazas must be at least 2 m deep and as wide as the street".into()));
        }
        if self.room_width_m < 4.0 || self.room_depth_m < 2.0 {
            return Err(ScenarioError::Geometry("rooms must be at least 4 m wide and 2 m deep".into()));
        }
        if self.gate_opening_m >= self.room_depth_m {
            return Err(ScenarioError::Geometry("gate opening must be narrower than the room depth".into()));
        }
        if self.low_crowd == 0 || self.heavy_crowd == 0 {
            return Err(ScenarioError::Geometry("crowd sizes must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub pmd_type: PmdMix,
    pub seed: u64,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub constants: SfmConstants,
    /// Replaces the built-in factors for every Type-1 and Type-2 agent.
    #[serde(default)]
    pub type1_params: Option<PmdTypeParams>,
    #[serde(default)]
    pub type2_params: Option<PmdTypeParams>,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, pmd_type: PmdMix, seed: u64) -> Self {
        ScenarioSpec {
            kind,
            pmd_type,
            seed,
            geometry: Geometry::default(),
            constants: SfmConstants::default(),
            type1_params: None,
            type2_params: None,
        }
    }

    fn params(&self, t: PmdType) -> PmdTypeParams {
        match t {
            PmdType::Type1 => self.type1_params.unwrap_or(PmdTypeParams::TYPE1),
            PmdType::Type2 => self.type2_params.unwrap_or(PmdTypeParams::TYPE2),
            PmdType::Pedestrian => PmdTypeParams::PEDESTRIAN,
        }
    }

    fn type_of(&self, flow_rank: usize) -> PmdType {
        match self.pmd_type {
            PmdMix::Type1 => PmdType::Type1,
            PmdMix::Type2 => PmdType::Type2,
            PmdMix::Mixed if flow_rank % 2 == 0 => PmdType::Type1,
            PmdMix::Mixed => PmdType::Type2,
        }
    }

    pub fn crowd(&self) -> usize {
        match self.kind {
            ScenarioKind::StreetHeavy => self.geometry.heavy_crowd,
            _ => self.geometry.low_crowd,
        }
    }
}

/// Axis-aligned spawn or goal area.
#[derive(Debug, Clone, Copy)]
struct Area {
    min: DVec2,
    max: DVec2,
}

impl Area {
    fn sample(&self, rng: &mut ChaCha8Rng) -> DVec2 {
        dvec2(rng.random_range(self.min.x..=self.max.x), rng.random_range(self.min.y..=self.max.y))
    }
}

/// Draws a point in `area` at least `gap` from every point in `taken`.
fn place(area: Area, taken: &[DVec2], gap: f64, rng: &mut ChaCha8Rng) -> Option<DVec2> {
    (0..10_000)
        .map(|_| area.sample(rng))
        .find(|p| taken.iter().all(|q| q.distance(*p) >= gap))
}

fn rectangle(min: DVec2, max: DVec2) -> [Obstacle; 4] {
    [
        Obstacle::segment(min, dvec2(max.x, min.y)),
        Obstacle::segment(dvec2(max.x, min.y), max),
        Obstacle::segment(max, dvec2(min.x, max.y)),
        Obstacle::segment(dvec2(min.x, max.y), min),
    ]
}

/// Corridor from `x = 0` to `x = street_length_m`, `y = 0` to
/// `y = street_width_m`, opening at both ends into a plaza centered on it.
pub fn street_walls(g: &Geometry) -> Vec<Obstacle> {
    let (len, wid, pd) = (g.street_length_m, g.street_width_m, g.plaza_depth_m);
    let (lo, hi) = (wid / 2.0 - g.plaza_width_m / 2.0, wid / 2.0 + g.plaza_width_m / 2.0);
    let mut walls = vec![
        Obstacle::segment(dvec2(0.0, 0.0), dvec2(len, 0.0)),
        Obstacle::segment(dvec2(0.0, wid), dvec2(len, wid)),
    ];
    for (mouth, outer) in [(0.0, -pd), (len, len + pd)] {
        if lo < 0.0 {
            walls.push(Obstacle::segment(dvec2(mouth, lo), dvec2(mouth, 0.0)));
            walls.push(Obstacle::segment(dvec2(mouth, wid), dvec2(mouth, hi)));
        }
        walls.push(Obstacle::segment(dvec2(mouth, lo), dvec2(outer, lo)));
        walls.push(Obstacle::segment(dvec2(outer, lo), dvec2(outer, hi)));
        walls.push(Obstacle::segment(dvec2(outer, hi), dvec2(mouth, hi)));
    }
    walls
}

/// Clearance kept between spawn/goal areas and the walls.
const CLEAR_M: f64 = 0.6;

/// Builds the scene described by `spec`; identical specs give identical
/// worlds.
///
/// Streets are closed corridors with two opposing flows, alternating by
/// agent index. The gate scene is two rooms side by side joined by an
/// opening in the shared wall; even agents go left to right, odd agents
/// right to left, each passing two waypoints that keep them to the right
/// half of the opening.
pub fn build_scenario(spec: &ScenarioSpec) -> Result<World, ScenarioError> {
    spec.geometry.validate()?;
    spec.constants.validate()?;
    let g = &spec.geometry;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.crowd();
    let mut starts = Vec::with_capacity(n);
    let mut goals = Vec::with_capacity(n);
    let mut agents = Vec::with_capacity(n);
    let (walls, obstacles) = match spec.kind {
        ScenarioKind::StreetLow | ScenarioKind::StreetHeavy => {
            let (len, wid) = (g.street_length_m, g.street_width_m);
            let zone = (len / 3.0).min(8.0);
            let lanes = (CLEAR_M, wid - CLEAR_M);
            let west = Area { min: dvec2(CLEAR_M, lanes.0), max: dvec2(zone, lanes.1) };
            let east = Area { min: dvec2(len - zone, lanes.0), max: dvec2(len - CLEAR_M, lanes.1) };
            let (pd, half_pw) = (g.plaza_depth_m, g.plaza_width_m / 2.0);
            let (plo, phi) = (wid / 2.0 - half_pw + CLEAR_M, wid / 2.0 + half_pw - CLEAR_M);
            let west_goal = Area { min: dvec2(-pd + CLEAR_M, plo), max: dvec2(-1.0, phi) };
            let east_goal = Area { min: dvec2(len + 1.0, plo), max: dvec2(len + pd - CLEAR_M, phi) };
            for k in 0..n {
                let eastbound = k % 2 == 0;
                let (from, to) = if eastbound { (west, east_goal) } else { (east, west_goal) };
                let p = place(from, &starts, g.spawn_gap_m, &mut rng).ok_or(ScenarioError::Crowded { wanted: n })?;
                starts.push(p);
                let goal = place(to, &goals, g.goal_gap_m, &mut rng).ok_or(ScenarioError::Crowded { wanted: n })?;
                goals.push(goal);
                let t = spec.type_of(k / 2);
                agents.push(AgentState {
                    desired_speed: spec.constants.v0_mps,
                    ..AgentState::new(k as u32, p, goal, spec.params(t))
                });
            }
            let bollards = if g.bollards {
                vec![
                    Obstacle::point(dvec2(len / 3.0, wid * 0.4)),
                    Obstacle::point(dvec2(2.0 * len / 3.0, wid * 0.6)),
                ]
            } else {
                Vec::new()
            };
            (street_walls(g), bollards)
        }
        ScenarioKind::GateLow => {
            let (w, d, half) = (g.room_width_m, g.room_depth_m, g.gate_opening_m / 2.0);
            let mid = d / 2.0;
            let mut walls = rectangle(DVec2::ZERO, dvec2(2.0 * w, d)).to_vec();
            walls.push(Obstacle::segment(dvec2(w, 0.0), dvec2(w, mid - half)));
            walls.push(Obstacle::segment(dvec2(w, mid + half), dvec2(w, d)));
            let left = Area { min: dvec2(CLEAR_M, CLEAR_M), max: dvec2(w - 2.0, d - CLEAR_M) };
            let right = Area { min: dvec2(w + 2.0, CLEAR_M), max: dvec2(2.0 * w - CLEAR_M, d - CLEAR_M) };
            let lane = half / 2.0;
            for k in 0..n {
                let rightward = k % 2 == 0;
                let (from, to, y, dir) = if rightward {
                    (left, right, mid - lane, 1.0)
                } else {
                    (right, left, mid + lane, -1.0)
                };
                let p = place(from, &starts, g.spawn_gap_m, &mut rng).ok_or(ScenarioError::Crowded { wanted: n })?;
                starts.push(p);
                let goal = place(to, &goals, g.goal_gap_m, &mut rng).ok_or(ScenarioError::Crowded { wanted: n })?;
                goals.push(goal);
                let t = spec.type_of(k / 2);
                agents.push(AgentState {
                    desired_speed: spec.constants.v0_mps,
                    waypoints: vec![dvec2(w - dir, y), dvec2(w + dir, y)],
                    ..AgentState::new(k as u32, p, goal, spec.params(t))
                });
            }
            (walls, Vec::new())
        }
    };
    let world = World::new(agents, obstacles, walls, spec.constants);
    world.validate()?;
    Ok(world)
}

/// Two agents crossing in opposite directions past two obstacles.
pub fn fig6a() -> World {
    let t1 = PmdTypeParams::TYPE1;
    let agents = vec![
        AgentState::new(0, dvec2(0.0, 0.15), dvec2(14.0, 0.15), t1),
        AgentState::new(1, dvec2(14.0, -0.15), dvec2(0.0, -0.15), t1),
    ];
    let obstacles = vec![Obstacle::point(dvec2(4.5, 0.9)), Obstacle::point(dvec2(9.5, -0.9))];
    World::new(agents, obstacles, Vec::new(), SfmConstants::default())
}

/// Five agents heading to separate targets, two of them walking as a group.
/// The gaze term counts only head turns beyond a 90 degree vision field;
/// with the full angle a side-by-side pair brakes to a crawl.
pub fn fig6b() -> World {
    let t1 = PmdTypeParams::TYPE1;
    let grouped = |id, from, to| AgentState { group: Some(1), ..AgentState::new(id, from, to, t1) };
    let agents = vec![
        grouped(0, dvec2(0.0, 0.4), dvec2(14.0, 0.8)),
        grouped(1, dvec2(0.0, -0.4), dvec2(14.0, -0.8)),
        AgentState::new(2, dvec2(14.0, 2.0), dvec2(0.0, 2.5), t1),
        AgentState::new(3, dvec2(6.8, -6.0), dvec2(7.3, 6.0), t1),
        AgentState::new(4, dvec2(7.4, 6.0), dvec2(6.6, -6.0), t1),
    ];
    let obstacles = vec![Obstacle::point(dvec2(4.5, 0.9)), Obstacle::point(dvec2(9.5, -0.9))];
    let constants = SfmConstants { gaze_vision_rad: std::f64::consts::FRAC_PI_2, ..SfmConstants::default() };
    World::new(agents, obstacles, Vec::new(), constants)
}

pub fn preset(name: &str) -> Option<World> {
    match name {
        "fig6a" => Some(fig6a()),
        "fig6b" => Some(fig6b()),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub position: DVec2,
    pub velocity: DVec2,
    pub arrived: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub agent_id: u32,
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Time of the last arrival, or the cap when `censored`.
    pub end_time_s: f64,
    pub censored: bool,
    pub arrived_count: usize,
    pub agent_count: usize,
    pub dt_s: f64,
    pub trajectories: Vec<Trajectory>,
    pub min_consecutive_displacement_m: Option<f64>,
}

impl SimulationResult {
    pub fn resolvable_at(&self, res_m: f64) -> Option<bool> {
        self.min_consecutive_displacement_m.map(|m| m >= res_m)
    }
}

/// Steps `world` until every agent has arrived or `max_time_s` is reached,
/// sampling every agent at every step (time zero included).
pub fn run_scenario(mut world: World, max_time_s: f64) -> Result<SimulationResult, ScenarioError> {
    if !(max_time_s > 0.0 && max_time_s.is_finite()) {
        return Err(ScenarioError::Invalid(format!("max_time must be positive, got {max_time_s}")));
    }
    world.validate()?;
    let dt = world.constants.dt_s;
    let t0 = world.time_s;
    let max_steps = (max_time_s / dt - 1e-9).ceil() as usize;
    let mut trajectories: Vec<Trajectory> = world
        .agents
        .iter()
        .map(|a| Trajectory { agent_id: a.id, samples: Vec::with_capacity(64) })
        .collect();
    let record = |w: &World, t: f64, tr: &mut [Trajectory]| {
        for (a, traj) in w.agents.iter().zip(tr.iter_mut()) {
            traj.samples.push(Sample { t, position: a.position, velocity: a.velocity, arrived: a.arrived });
        }
    };
    record(&world, t0, &mut trajectories);
    let mut last_arrival = 0.0;
    let mut steps = 0;
    while !world.all_arrived() && steps < max_steps {
        let before = world.agents.iter().filter(|a| a.arrived).count();
        world.step();
        steps += 1;
        let t = steps as f64 * dt;
        if world.agents.iter().filter(|a| a.arrived).count() > before {
            last_arrival = t;
        }
        record(&world, t0 + t, &mut trajectories);
    }
    let censored = !world.all_arrived();
    let mut result = SimulationResult {
        end_time_s: if censored { max_time_s } else { last_arrival },
        censored,
        arrived_count: world.agents.iter().filter(|a| a.arrived).count(),
        agent_count: world.agents.len(),
        dt_s: dt,
        trajectories,
        min_consecutive_displacement_m: None,
    };
    result.min_consecutive_displacement_m = min_consecutive_displacement(&result).ok();
    Ok(result)
}

/// Smallest displacement between consecutive samples while agents are still
/// moving. Pairs involving an arrived sample are skipped.
pub fn min_consecutive_displacement(result: &SimulationResult) -> Result<f64, ScenarioError> {
    result
        .trajectories
        .iter()
        .flat_map(|tr| tr.samples.windows(2))
        .filter(|w| !w[0].arrived && !w[1].arrived)
        .map(|w| w[0].position.distance(w[1].position))
        .min_by(f64::total_cmp)
        .ok_or(ScenarioError::NoMovingSamples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeComparison {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub t1: f64,
    pub t2: f64,
    pub censored1: bool,
    pub censored2: bool,
}

impl TypeComparison {
    pub fn censored(&self) -> bool {
        self.censored1 || self.censored2
    }
}

/// Runs the scene with every agent Type-1, then with every agent Type-2.
pub fn compare_types(spec: &ScenarioSpec, max_time_s: f64) -> Result<TypeComparison, ScenarioError> {
    let run = |mix| -> Result<SimulationResult, ScenarioError> {
        let s = ScenarioSpec { pmd_type: mix, ..spec.clone() };
        run_scenario(build_scenario(&s)?, max_time_s)
    };
    let (a, b) = (run(PmdMix::Type1)?, run(PmdMix::Type2)?);
    Ok(TypeComparison {
        kind: spec.kind,
        seed: spec.seed,
        t1: a.end_time_s,
        t2: b.end_time_s,
        censored1: a.censored,
        censored2: b.censored,
    })
}

/// One row of the end-time table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub pmd_type: PmdType,
    pub end_time_s: f64,
    pub censored: bool,
    pub arrived: usize,
    pub agents: usize,
}

/// Runs every `kinds x seeds x {type1, type2}` scene in parallel. Rows come
/// back in enumeration order whatever the thread count.
pub fn compare_table(
    kinds: &[ScenarioKind],
    seeds: &[u64],
    base: &ScenarioSpec,
    max_time_s: f64,
) -> Result<Vec<CompareRow>, ScenarioError> {
    let mut jobs = Vec::new();
    for &kind in kinds {
        for &seed in seeds {
            for (mix, t) in [(PmdMix::Type1, PmdType::Type1), (PmdMix::Type2, PmdType::Type2)] {
                jobs.push((ScenarioSpec { kind, seed, pmd_type: mix, ..base.clone() }, t));
            }
        }
    }
    jobs.par_iter()
        .map(|(spec, t)| {
            let r = run_scenario(build_scenario(spec)?, max_time_s)?;
            Ok(CompareRow {
                kind: spec.kind,
                seed: spec.seed,
                pmd_type: *t,
                end_time_s: r.end_time_s,
                censored: r.censored,
                arrived: r.arrived_count,
                agents: r.agent_count,
            })
        })
        .collect()
}

/// Median end times per kind over uncensored runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindSummary {
    pub kind: ScenarioKind,
    pub median_t1: Option<f64>,
    pub median_t2: Option<f64>,
    pub ratio: Option<f64>,
    pub runs: usize,
    pub censored: usize,
}

pub fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) })
}

pub fn summarize(rows: &[CompareRow]) -> Vec<KindSummary> {
    let mut kinds: Vec<_> = rows.iter().map(|r| r.kind).collect();
    kinds.sort();
    kinds.dedup();
    kinds
        .into_iter()
        .map(|kind| {
            let of = |t: PmdType| -> Vec<f64> {
                rows.iter()
                    .filter(|r| r.kind == kind && r.pmd_type == t && !r.censored)
                    .map(|r| r.end_time_s)
                    .collect()
            };
            let median_t1 = median(&mut of(PmdType::Type1));
            let median_t2 = median(&mut of(PmdType::Type2));
            KindSummary {
                kind,
                median_t1,
                median_t2,
                ratio: median_t1.zip(median_t2).map(|(a, b)| b / a),
                runs: rows.iter().filter(|r| r.kind == kind).count(),
                censored: rows.iter().filter(|r| r.kind == kind && r.censored).count(),
            }
        })
        .collect()
}

/// Trajectory CSV: `t,agent_id,x,y,vx,vy,arrived`, one row per sample,
/// ordered by time then agent.
pub fn write_trajectory_csv<W: std::io::Write>(result: &SimulationResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "agent_id", "x", "y", "vx", "vy", "arrived"])?;
    let steps = result.trajectories.first().map_or(0, |t| t.samples.len());
    for k in 0..steps {
        for tr in &result.trajectories {
            let s = &tr.samples[k];
            w.serialize((s.t, tr.agent_id, s.position.x, s.position.y, s.velocity.x, s.velocity.y, s.arrived))?;
        }
    }
    w.flush()?;
    Ok(())
}
