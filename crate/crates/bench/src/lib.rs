//! Shared fixtures for the benchmarks.

use pmdnav_core::graph::{subnetwork_bbox, StreetGraph, Subnetwork};
use pmdnav_core::scenarios::{build_scenario, PmdMix, ScenarioKind, ScenarioSpec};
use pmdnav_core::sfm::World;
use pmdnav_core::synthetic::{grid_city, grid_graph, CitySpec, GridSpec};
use pmdnav_core::SharedZoneSet;

/// Square jittered grid with `side * side` nodes.
pub fn grid(side: usize) -> StreetGraph {
    grid_graph(&GridSpec { length_jitter: 0.3, jitter_seed: 1, ..GridSpec::new(side, side, 100.0) }).0
}

pub fn city() -> (StreetGraph, SharedZoneSet) {
    grid_city(&CitySpec::standard(1))
}

/// A 5 km query box in the middle of the synthetic city.
pub fn city_subnetwork(g: &StreetGraph) -> Subnetwork {
    subnetwork_bbox(g, "r15c15", "r45c40", 5.0).expect("city is connected")
}

pub fn heavy_street() -> World {
    build_scenario(&ScenarioSpec::new(ScenarioKind::StreetHeavy, PmdMix::Mixed, 0)).expect("default scene builds")
}
