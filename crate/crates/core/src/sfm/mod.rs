//! Social force model with group terms and per-device-type force factors.
//!
//! Simulations run in a flat local frame in meters. Every force function
//! returns an acceleration in m/s².

mod forces;

pub use forces::{
    boundary_force, ellipse_b, gaze_rate, goal_force, group_coherence, group_gaze, group_repulsion,
    pair_potential, pair_repulsion, total_force, wall_force, ForceTerms,
};

use glam::DVec2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SfmError {
    #[error("invalid constants: {0}")]
    Constants(String),
    #[error("invalid agent {0}: {1}")]
    Agent(u32, String),
    #[error("invalid obstacle {0}: {1}")]
    Obstacle(usize, String),
    #[error("duplicate agent id {0}")]
    DuplicateAgent(u32),
    #[error("group {0} has a single member")]
    LoneGroup(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SfmConstants {
    pub tau_s: f64,
    pub v0_mps: f64,
    pub wall_a: f64,
    pub wall_b: f64,
    pub v0_rep: f64,
    pub sigma_m: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    /// Coherence gate on the distance to the group center of mass. `None`
    /// means `(members - 1) / 2` meters.
    pub qa_threshold_m: Option<f64>,
    pub qr_threshold_m: f64,
    /// Half-width of the vision field for the gaze term. The head turn is
    /// the part of the heading-to-center angle beyond it; 0 uses the full
    /// angle.
    pub gaze_vision_rad: f64,
    pub dt_s: f64,
    /// Speed is clamped to this multiple of the desired speed.
    pub speed_cap_factor: f64,
    pub goal_tolerance_m: f64,
    /// Radius within which an intermediate waypoint counts as reached.
    pub waypoint_tolerance_m: f64,
}

impl Default for SfmConstants {
    fn default() -> Self {
        SfmConstants {
            tau_s: 0.5,
            v0_mps: 1.3,
            wall_a: 10.0,
            wall_b: 0.1,
            v0_rep: 2.1,
            sigma_m: 0.3,
            beta1: 4.0,
            beta2: 3.0,
            beta3: 2.0,
            qa_threshold_m: None,
            qr_threshold_m: 0.5,
            gaze_vision_rad: 0.0,
            dt_s: 0.1,
            speed_cap_factor: 1.3,
            goal_tolerance_m: 0.3,
            waypoint_tolerance_m: 0.5,
        }
    }
}

impl SfmConstants {
    pub fn validate(&self) -> Result<(), SfmError> {
        let positive = [
            ("tau_s", self.tau_s),
            ("v0_mps", self.v0_mps),
            ("wall_a", self.wall_a),
            ("wall_b", self.wall_b),
            ("v0_rep", self.v0_rep),
            ("sigma_m", self.sigma_m),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta3", self.beta3),
            ("qr_threshold_m", self.qr_threshold_m),
            ("dt_s", self.dt_s),
            ("speed_cap_factor", self.speed_cap_factor),
            ("goal_tolerance_m", self.goal_tolerance_m),
            ("waypoint_tolerance_m", self.waypoint_tolerance_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SfmError::Constants(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.gaze_vision_rad) {
            return Err(SfmError::Constants(format!("gaze_vision_rad must lie in [0, pi], got {}", self.gaze_vision_rad)));
        }
        if let Some(q) = self.qa_threshold_m {
            if !(q > 0.0 && q.is_finite()) {
                return Err(SfmError::Constants(format!("qa_threshold_m must be positive, got {q}")));
            }
        }
        if self.dt_s > self.tau_s / 5.0 {
            return Err(SfmError::Constants(format!(
                "dt_s {} exceeds tau_s / 5 = {}",
                self.dt_s,
                self.tau_s / 5.0
            )));
        }
        Ok(())
    }

    pub fn qa_threshold(&self, members: usize) -> f64 {
        self.qa_threshold_m
            .unwrap_or((members.saturating_sub(1)) as f64 / 2.0)
    }
}

/// Multipliers on the terms of the total force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmdTypeParams {
    pub goal_factor: f64,
    pub ped_repulse_factor: f64,
    pub space_repulse_factor: f64,
    pub social_factor: f64,
    pub obstacle_factor: f64,
}

impl PmdTypeParams {
    /// Low speed, small footprint.
    pub const TYPE1: PmdTypeParams = PmdTypeParams {
        goal_factor: 1.0,
        ped_repulse_factor: 1.5,
        space_repulse_factor: 1.0,
        social_factor: 5.1,
        obstacle_factor: 10.0,
    };
    /// High speed, large footprint.
    pub const TYPE2: PmdTypeParams = PmdTypeParams {
        goal_factor: 0.7,
        ped_repulse_factor: 3.0,
        space_repulse_factor: 2.1,
        social_factor: 6.6,
        obstacle_factor: 18.0,
    };
    pub const PEDESTRIAN: PmdTypeParams = PmdTypeParams {
        goal_factor: 1.0,
        ped_repulse_factor: 1.0,
        space_repulse_factor: 1.0,
        social_factor: 1.0,
        obstacle_factor: 1.0,
    };

    pub fn validate(&self) -> Result<(), String> {
        let all = [
            self.goal_factor,
            self.ped_repulse_factor,
            self.space_repulse_factor,
            self.social_factor,
            self.obstacle_factor,
        ];
        if all.iter().all(|f| *f >= 0.0 && f.is_finite()) {
            Ok(())
        } else {
            Err(format!("force factors must be finite and non-negative: {all:?}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PmdType {
    Type1,
    Type2,
    Pedestrian,
}

impl PmdType {
    pub fn params(self) -> PmdTypeParams {
        match self {
            PmdType::Type1 => PmdTypeParams::TYPE1,
            PmdType::Type2 => PmdTypeParams::TYPE2,
            PmdType::Pedestrian => PmdTypeParams::PEDESTRIAN,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PmdType::Type1 => "type1",
            PmdType::Type2 => "type2",
            PmdType::Pedestrian => "pedestrian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub id: u32,
    pub position: DVec2,
    pub velocity: DVec2,
    pub desired_speed: f64,
    pub goal: DVec2,
    /// Intermediate targets visited in order before the goal.
    #[serde(default)]
    pub waypoints: Vec<DVec2>,
    pub params: PmdTypeParams,
    #[serde(default)]
    pub group: Option<u32>,
    #[serde(default)]
    pub arrived: bool,
}

impl AgentState {
    pub fn new(id: u32, position: DVec2, goal: DVec2, params: PmdTypeParams) -> Self {
        AgentState {
            id,
            position,
            velocity: DVec2::ZERO,
            desired_speed: SfmConstants::default().v0_mps,
            goal,
            waypoints: Vec::new(),
            params,
            group: None,
            arrived: false,
        }
    }

    /// Point the goal force currently steers toward.
    pub fn target(&self) -> DVec2 {
        self.waypoints.first().copied().unwrap_or(self.goal)
    }

    fn validate(&self) -> Result<(), SfmError> {
        let bad = |msg: String| SfmError::Agent(self.id, msg);
        if !(self.desired_speed > 0.0 && self.desired_speed.is_finite()) {
            return Err(bad(format!("desired speed {}", self.desired_speed)));
        }
        let finite = [self.position, self.velocity, self.goal]
            .iter()
            .chain(&self.waypoints)
            .all(|p| p.is_finite());
        if !finite {
            return Err(bad("non-finite coordinate".into()));
        }
        self.params.validate().map_err(bad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Obstacle {
    Point { at: DVec2 },
    Segment { a: DVec2, b: DVec2 },
}

impl Obstacle {
    pub fn segment(a: DVec2, b: DVec2) -> Self {
        Obstacle::Segment { a, b }
    }

    pub fn point(at: DVec2) -> Self {
        Obstacle::Point { at }
    }

    pub fn closest_point(&self, p: DVec2) -> DVec2 {
        match *self {
            Obstacle::Point { at } => at,
            Obstacle::Segment { a, b } => {
                let ab = b - a;
                let t = ((p - a).dot(ab) / ab.length_squared()).clamp(0.0, 1.0);
                a + ab * t
            }
        }
    }

    pub fn distance(&self, p: DVec2) -> f64 {
        p.distance(self.closest_point(p))
    }

    /// Direction used when an agent sits exactly on the obstacle.
    fn contact_normal(&self) -> DVec2 {
        match *self {
            Obstacle::Point { .. } => DVec2::X,
            Obstacle::Segment { a, b } => (b - a).perp().normalize(),
        }
    }

    pub fn rotated(&self, rot: DVec2) -> Self {
        match *self {
            Obstacle::Point { at } => Obstacle::Point { at: rot.rotate(at) },
            Obstacle::Segment { a, b } => Obstacle::Segment { a: rot.rotate(a), b: rot.rotate(b) },
        }
    }

    fn validate(&self) -> Result<(), String> {
        match *self {
            Obstacle::Point { at } if at.is_finite() => Ok(()),
            Obstacle::Segment { a, b } if a.is_finite() && b.is_finite() && a != b => Ok(()),
            Obstacle::Segment { .. } => Err("segment endpoints must be distinct and finite".into()),
            Obstacle::Point { .. } => Err("non-finite point".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub agents: Vec<AgentState>,
    pub obstacles: Vec<Obstacle>,
    pub walls: Vec<Obstacle>,
    pub constants: SfmConstants,
    #[serde(default)]
    pub time_s: f64,
}

impl World {
    pub fn new(agents: Vec<AgentState>, obstacles: Vec<Obstacle>, walls: Vec<Obstacle>, constants: SfmConstants) -> Self {
        World { agents, obstacles, walls, constants, time_s: 0.0 }
    }

    pub fn validate(&self) -> Result<(), SfmError> {
        self.constants.validate()?;
        let mut ids = std::collections::BTreeSet::new();
        let mut groups = std::collections::BTreeMap::<u32, usize>::new();
        for a in &self.agents {
            a.validate()?;
            if !ids.insert(a.id) {
                return Err(SfmError::DuplicateAgent(a.id));
            }
            if let Some(g) = a.group {
                *groups.entry(g).or_default() += 1;
            }
        }
        if let Some((&g, _)) = groups.iter().find(|(_, &n)| n < 2) {
            return Err(SfmError::LoneGroup(g));
        }
        for (i, o) in self.walls.iter().chain(&self.obstacles).enumerate() {
            o.validate().map_err(|m| SfmError::Obstacle(i, m))?;
        }
        Ok(())
    }

    pub fn all_arrived(&self) -> bool {
        self.agents.iter().all(|a| a.arrived)
    }

    /// Walls and obstacles together, walls first.
    pub fn boundaries(&self) -> impl Iterator<Item = &Obstacle> {
        self.walls.iter().chain(&self.obstacles)
    }

    /// Active members of agent `i`'s group, `i` included. Empty when `i` has
    /// no group or fewer than two members are still moving.
    pub fn active_group(&self, i: usize) -> Vec<&AgentState> {
        let Some(g) = self.agents[i].group else {
            return Vec::new();
        };
        let members: Vec<_> = self
            .agents
            .iter()
            .filter(|a| a.group == Some(g) && !a.arrived)
            .collect();
        if members.len() < 2 {
            Vec::new()
        } else {
            members
        }
    }

    /// Advances the world by one step.
    ///
    /// Forces are evaluated on the pre-step state for every agent, then
    /// applied together with semi-implicit Euler: velocity first (clamped to
    /// the speed cap), then position with the new velocity. Agents within
    /// the goal tolerance are frozen in place and marked arrived.
    pub fn step(&mut self) {
        let c = self.constants;
        let forces: Vec<Option<ForceTerms>> = (0..self.agents.len())
            .map(|i| (!self.agents[i].arrived).then(|| total_force(i, self)))
            .collect();
        for (a, f) in self.agents.iter_mut().zip(forces) {
            let Some(f) = f else { continue };
            if a.position.distance(a.goal) <= c.goal_tolerance_m {
                a.arrived = true;
                a.velocity = DVec2::ZERO;
                continue;
            }
            a.velocity = f.advance(&a.params, a.velocity, c.dt_s);
            let cap = c.speed_cap_factor * a.desired_speed;
            if a.velocity.length() > cap {
                a.velocity = a.velocity.normalize() * cap;
            }
            a.position += a.velocity * c.dt_s;
            while let Some(&w) = a.waypoints.first() {
                if a.position.distance(w) <= c.waypoint_tolerance_m {
                    a.waypoints.remove(0);
                } else {
                    break;
                }
            }
            if a.position.distance(a.goal) <= c.goal_tolerance_m {
                a.arrived = true;
                a.velocity = DVec2::ZERO;
            }
        }
        self.time_s += c.dt_s;
    }
}
