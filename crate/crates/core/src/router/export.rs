use serde_json::{json, Value};

use super::{BatchStats, HazardWeights, RouteResult};
use crate::graph::StreetGraph;

/// Route as a GeoJSON FeatureCollection: one LineString for the whole
/// route, then one LineString per edge carrying its penalty contributions.
/// Coordinates are `[lon, lat]`.
pub fn route_geojson(g: &StreetGraph, r: &RouteResult, weights: &HazardWeights) -> Value {
    let coord = |id: &str| {
        let p = g.location(g.node_ix(id).expect("route nodes belong to the graph"));
        json!([p.lon, p.lat])
    };
    let mut features = Vec::with_capacity(r.edge_path.len() + 1);
    features.push(json!({
        "type": "Feature",
        "geometry": {
            "type": "LineString",
            "coordinates": r.node_path.iter().map(|id| coord(id)).collect::<Vec<_>>(),
        },
        "properties": {
            "kind": "route",
            "origin": r.origin,
            "destination": r.destination,
            "length_m": r.length_m,
            "weighted_cost": r.weighted_cost,
            "shortest_length_m": r.shortest_length_m,
            "increment_pct": r.increment_pct,
            "weights": weights,
        },
    }));
    for (i, b) in r.per_edge_breakdown.iter().enumerate() {
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [coord(&r.node_path[i]), coord(&r.node_path[i + 1])],
            },
            "properties": {
                "kind": "edge",
                "seq": i,
                "edge_id": b.edge_id,
                "length_m": b.length_m,
                "haz": b.haz,
                "pa": b.pa,
                "bc": b.bc,
                "ic": b.ic,
            },
        }));
    }
    json!({ "type": "FeatureCollection", "features": features })
}

/// Per-pair CSV companion of a batch run.
pub fn write_pairs_csv<W: std::io::Write>(stats: &BatchStats, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for rec in &stats.per_pair_records {
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}
