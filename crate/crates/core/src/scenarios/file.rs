use glam::DVec2;
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::sfm::{AgentState, Obstacle, PmdType, SfmConstants, World};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    /// Defaults to the agent's position in the list.
    #[serde(default)]
    pub id: Option<u32>,
    pub position: DVec2,
    pub goal: DVec2,
    #[serde(rename = "type", default = "default_type")]
    pub pmd_type: PmdType,
    #[serde(default)]
    pub group: Option<u32>,
    #[serde(default)]
    pub desired_speed: Option<f64>,
    #[serde(default)]
    pub velocity: Option<DVec2>,
    #[serde(default)]
    pub waypoints: Vec<DVec2>,
}

fn default_type() -> PmdType {
    PmdType::Type1
}

/// Hand-written scene. `constants` accepts a partial object; `dt` overrides
/// `constants.dt_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub walls: Vec<Obstacle>,
    #[serde(default)]
    pub constants: SfmConstants,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub max_time: Option<f64>,
}

impl ScenarioFile {
    pub fn to_world(&self) -> Result<World, ScenarioError> {
        let mut constants = self.constants;
        if let Some(dt) = self.dt {
            constants.dt_s = dt;
        }
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(k, a)| AgentState {
                velocity: a.velocity.unwrap_or(DVec2::ZERO),
                desired_speed: a.desired_speed.unwrap_or(constants.v0_mps),
                waypoints: a.waypoints.clone(),
                group: a.group,
                ..AgentState::new(a.id.unwrap_or(k as u32), a.position, a.goal, a.pmd_type.params())
            })
            .collect();
        let w = World::new(agents, self.obstacles.clone(), self.walls.clone(), constants);
        w.validate()?;
        Ok(w)
    }
}

pub fn load_scenario_file(bytes: &[u8]) -> Result<ScenarioFile, ScenarioError> {
    let f: ScenarioFile = serde_json::from_slice(bytes).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    if let Some(t) = f.max_time {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ScenarioError::Invalid(format!("max_time must be positive, got {t}")));
        }
    }
    f.to_world()?;
    Ok(f)
}
