//! Socially acceptable route planning for personal mobility devices and a
//! social-force micro-simulator for shared-space navigation.
//!
//! The routing half weights street edges by proximity to shared-space zones
//! and by normalized edge betweenness, then searches with A*. The
//! simulation half integrates a social force model with per-device-type
//! force factors over corridor and gate scenes.

pub mod centrality;
pub mod geo;
pub mod graph;
pub mod router;
pub mod scenarios;
pub mod sfm;
pub mod synthetic;
pub mod zones;

pub use centrality::{edge_betweenness, minmax_scale, EdgeScalarField};
pub use geo::{haversine_m, GeoPoint};
pub use graph::{load_graph, subnetwork_bbox, StreetGraph};
pub use router::{
    batch_experiment, plan_social_route, shortest_path, BatchConfig, BatchStats, BcCache, HazardWeights,
    RouteQuery, RouteResult,
};
pub use zones::{load_zones, SharedZoneSet};
