//! Shared-space zones: meso zone centers with concentric hazard rings and
//! micro points with a single proximity radius.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{haversine_m, GeoError, GeoPoint};
use crate::graph::StreetGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZoneError {
    #[error("malformed zone document: {0}")]
    Malformed(String),
    #[error("{list}[{index}]: {source}")]
    Coordinate {
        list: &'static str,
        index: usize,
        #[source]
        source: GeoError,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SharedZoneSet {
    #[serde(default)]
    pub meso_zones: Vec<GeoPoint>,
    #[serde(default)]
    pub micro_points: Vec<GeoPoint>,
}

impl SharedZoneSet {
    pub fn is_empty(&self) -> bool {
        self.meso_zones.is_empty() && self.micro_points.is_empty()
    }

    pub fn validate(&self) -> Result<(), ZoneError> {
        for (list, pts) in [("meso_zones", &self.meso_zones), ("micro_points", &self.micro_points)] {
            for (index, p) in pts.iter().enumerate() {
                p.validate()
                    .map_err(|source| ZoneError::Coordinate { list, index, source })?;
            }
        }
        Ok(())
    }
}

pub fn load_zones(bytes: &[u8]) -> Result<SharedZoneSet, ZoneError> {
    let zones: SharedZoneSet =
        serde_json::from_slice(bytes).map_err(|e| ZoneError::Malformed(e.to_string()))?;
    zones.validate()?;
    Ok(zones)
}

/// Ring radii around meso zone centers and the micro-point proximity radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneRadii {
    pub rings_m: [f64; 3],
    pub micro_m: f64,
}

impl Default for ZoneRadii {
    fn default() -> Self {
        ZoneRadii {
            rings_m: [100.0, 200.0, 300.0],
            micro_m: 100.0,
        }
    }
}

/// Zone classification of one edge, judged at the edge midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeZoneScore {
    /// Innermost ring (0 = inner) containing the midpoint, if any.
    pub ring: Option<usize>,
    pub near_micro: bool,
}

pub fn edge_zone_scores(
    g: &StreetGraph,
    edge: usize,
    zones: &SharedZoneSet,
    radii: &ZoneRadii,
) -> EdgeZoneScore {
    point_zone_scores(g.edge_midpoint(edge), zones, radii)
}

pub fn point_zone_scores(p: GeoPoint, zones: &SharedZoneSet, radii: &ZoneRadii) -> EdgeZoneScore {
    let nearest = zones
        .meso_zones
        .iter()
        .map(|&c| haversine_m(p, c))
        .fold(f64::INFINITY, f64::min);
    let ring = radii.rings_m.iter().position(|&r| nearest <= r);
    let near_micro = zones
        .micro_points
        .iter()
        .any(|&m| haversine_m(p, m) <= radii.micro_m);
    EdgeZoneScore { ring, near_micro }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    const BASE: GeoPoint = GeoPoint { lat: 28.6, lon: 77.2 };

    /// Single edge whose midpoint sits at `BASE`.
    fn edge_at_base() -> StreetGraph {
        let nodes = vec![
            Node { id: "a".into(), location: BASE.offset_m(-40.0, 0.0) },
            Node { id: "b".into(), location: BASE.offset_m(40.0, 0.0) },
        ];
        let edges = vec![Edge { id: "ab".into(), from: 0, to: 1, length_m: 80.0 }];
        StreetGraph::from_parts(nodes, edges).unwrap()
    }

    #[test]
    fn parses_documents() {
        let empty = load_zones(br#"{"meso_zones":[],"micro_points":[]}"#).unwrap();
        assert!(empty.is_empty());
        let z = load_zones(
            br#"{"meso_zones":[{"lat":1,"lon":2}],"micro_points":[{"lat":1,"lon":2},{"lat":3,"lon":4}]}"#,
        )
        .unwrap();
        assert_eq!((z.meso_zones.len(), z.micro_points.len()), (1, 2));
    }

    #[test]
    fn out_of_range_latitude() {
        let err = load_zones(br#"{"meso_zones":[{"lat":95,"lon":0}],"micro_points":[]}"#).unwrap_err();
        assert!(matches!(err, ZoneError::Coordinate { list: "meso_zones", index: 0, .. }));
        assert!(matches!(load_zones(b"\"nope\""), Err(ZoneError::Malformed(_))));
    }

    #[test]
    fn inner_ring() {
        let g = edge_at_base();
        let zones = SharedZoneSet {
            meso_zones: vec![BASE.offset_m(0.0, 50.0)],
            micro_points: vec![],
        };
        let s = edge_zone_scores(&g, 0, &zones, &ZoneRadii::default());
        assert_eq!(s, EdgeZoneScore { ring: Some(0), near_micro: false });
    }

    #[test]
    fn outer_ring_and_micro() {
        let g = edge_at_base();
        let zones = SharedZoneSet {
            meso_zones: vec![BASE.offset_m(0.0, 250.0), BASE.offset_m(900.0, 0.0)],
            micro_points: vec![BASE.offset_m(-40.0, 0.0)],
        };
        let s = edge_zone_scores(&g, 0, &zones, &ZoneRadii::default());
        assert_eq!(s, EdgeZoneScore { ring: Some(2), near_micro: true });
    }

    #[test]
    fn empty_set_scores_nothing() {
        let g = edge_at_base();
        let s = edge_zone_scores(&g, 0, &SharedZoneSet::default(), &ZoneRadii::default());
        assert_eq!(s, EdgeZoneScore { ring: None, near_micro: false });
    }

    #[test]
    fn ring_index_is_monotone_in_distance() {
        let radii = ZoneRadii::default();
        let rank = |r: Option<usize>| r.unwrap_or(3);
        let mut last = 0;
        for step in 0..400 {
            let zones = SharedZoneSet {
                meso_zones: vec![BASE.offset_m(step as f64, 0.0)],
                micro_points: vec![],
            };
            let r = rank(point_zone_scores(BASE, &zones, &radii).ring);
            assert!(r >= last, "ring decreased at {step} m");
            last = r;
        }
        assert_eq!(last, 3);
    }
}
