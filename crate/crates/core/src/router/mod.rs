//! Socially acceptable routing.
//!
//! Each edge is weighted as its length plus the sum of its hazard scores
//! (meso ring, micro proximity, scaled betweenness, optional usage density)
//! times the raw shortest O-D length. The route is then the A* optimum under
//! those weights inside the query's bounding-box subnetwork.

mod batch;
mod export;
mod search;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{edge_betweenness, minmax_scale, EdgeScalarField, FieldError};
use crate::graph::{subnetwork_bbox, GraphError, StreetGraph, Subnetwork};
use crate::zones::{edge_zone_scores, SharedZoneSet, ZoneRadii};

pub use batch::{batch_experiment, BatchConfig, BatchStats, PairRecord};
pub use export::{route_geojson, write_pairs_csv};
pub use search::{astar, dijkstra, Path};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouteError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("no path from `{0}` to `{1}`")]
    NoPath(String, String),
    #[error("invalid hazard weights: {0}")]
    Weights(String),
    #[error("invalid batch configuration: {0}")]
    Config(String),
    #[error("found only {found} of {wanted} feasible O-D pairs after {attempts} draws")]
    TooFewPairs {
        found: usize,
        wanted: usize,
        attempts: usize,
    },
}

impl RouteError {
    /// Whether the error describes an infeasible query rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            RouteError::NoPath(..)
                | RouteError::Graph(GraphError::DisconnectedInBox { .. })
                | RouteError::TooFewPairs { .. }
        )
    }
}

/// Hazard score hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardWeights {
    /// Ring scores from the inner ring outwards.
    pub haz_ring_scores: [f64; 3],
    pub pa_score: f64,
    pub bc_max: f64,
    pub ic_max: f64,
}

impl Default for HazardWeights {
    fn default() -> Self {
        Self::column(2)
    }
}

impl HazardWeights {
    /// The three preset hyperparameter columns; column 2 is the default.
    ///
    /// # Panics
    /// If `column` is not 1, 2 or 3.
    pub fn column(column: usize) -> Self {
        let (haz, pa, bc) = match column {
            1 => ([0.5, 0.4, 0.3], 0.2, 0.15),
            2 => ([0.2, 0.16, 0.12], 0.08, 0.06),
            3 => ([0.3, 0.24, 0.18], 0.12, 0.09),
            _ => panic!("hyperparameter column must be 1, 2 or 3"),
        };
        HazardWeights { haz_ring_scores: haz, pa_score: pa, bc_max: bc, ic_max: 0.06 }
    }

    pub fn zero() -> Self {
        HazardWeights { haz_ring_scores: [0.0; 3], pa_score: 0.0, bc_max: 0.0, ic_max: 0.0 }
    }

    /// Every score multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        HazardWeights {
            haz_ring_scores: self.haz_ring_scores.map(|h| h * factor),
            pa_score: self.pa_score * factor,
            bc_max: self.bc_max * factor,
            ic_max: self.ic_max * factor,
        }
    }

    pub fn validate(&self) -> Result<(), RouteError> {
        let all = [
            self.haz_ring_scores[0],
            self.haz_ring_scores[1],
            self.haz_ring_scores[2],
            self.pa_score,
            self.bc_max,
            self.ic_max,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(RouteError::Weights("scores must be finite and >= 0".into()));
        }
        let [a, b, c] = self.haz_ring_scores;
        if a < b || b < c {
            return Err(RouteError::Weights(
                "ring scores must not increase from inner to outer ring".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RouteQuery {
    pub origin: String,
    pub destination: String,
    pub weights: HazardWeights,
    /// Usage-density layer over the full graph (raw values; rescaled per query).
    pub ic_layer: Option<Arc<EdgeScalarField>>,
    pub min_side_km: f64,
}

impl RouteQuery {
    pub fn new(origin: impl Into<String>, destination: impl Into<String>) -> Self {
        RouteQuery {
            origin: origin.into(),
            destination: destination.into(),
            weights: HazardWeights::default(),
            ic_layer: None,
            min_side_km: 5.0,
        }
    }

    pub fn with_weights(mut self, weights: HazardWeights) -> Self {
        self.weights = weights;
        self
    }
}

/// Per-edge penalty contributions in meters (score times the shortest
/// O-D length).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeBreakdown {
    pub edge_id: String,
    pub length_m: f64,
    pub haz: f64,
    pub pa: f64,
    pub bc: f64,
    pub ic: f64,
}

impl EdgeBreakdown {
    pub fn penalty(&self) -> f64 {
        self.haz + self.pa + self.bc + self.ic
    }
}

/// Edge weights for one query together with their decomposition.
#[derive(Debug, Clone)]
pub struct EdgeWeighting {
    pub weights: EdgeScalarField,
    pub breakdown: Vec<EdgeBreakdown>,
}

/// Assigns `length + (HAZ + PA + BC + IC) * shortest_len_m` to every edge of
/// `sub`. `bc` and `ic` must already be scaled and keyed by `sub`'s edges.
pub fn assign_edge_weights(
    sub: &StreetGraph,
    zones: &SharedZoneSet,
    bc: &EdgeScalarField,
    shortest_len_m: f64,
    w: &HazardWeights,
    ic: Option<&EdgeScalarField>,
) -> Result<EdgeWeighting, RouteError> {
    bc.check_keys(sub)?;
    if let Some(ic) = ic {
        ic.check_keys(sub)?;
    }
    let radii = ZoneRadii::default();
    let mut weights = Vec::with_capacity(sub.edge_count());
    let mut breakdown = Vec::with_capacity(sub.edge_count());
    for (ix, e) in sub.edges().iter().enumerate() {
        let zone = edge_zone_scores(sub, ix, zones, &radii);
        let haz = zone.ring.map_or(0.0, |r| w.haz_ring_scores[r]);
        let pa = if zone.near_micro { w.pa_score } else { 0.0 };
        let bc_score = bc.values()[ix];
        let ic_score = ic.map_or(0.0, |f| f.values()[ix]);
        let item = EdgeBreakdown {
            edge_id: e.id.clone(),
            length_m: e.length_m,
            haz: haz * shortest_len_m,
            pa: pa * shortest_len_m,
            bc: bc_score * shortest_len_m,
            ic: ic_score * shortest_len_m,
        };
        weights.push(e.length_m + (haz + pa + bc_score + ic_score) * shortest_len_m);
        breakdown.push(item);
    }
    Ok(EdgeWeighting {
        weights: EdgeScalarField::from_values(sub, weights),
        breakdown,
    })
}

/// Memoized raw subnetwork betweenness, keyed by the exact member node set.
#[derive(Debug, Default)]
pub struct BcCache {
    entries: Mutex<HashMap<Vec<usize>, Arc<EdgeScalarField>>>,
}

impl BcCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, sub: &Subnetwork) -> Arc<EdgeScalarField> {
        if let Some(hit) = self.entries.lock().unwrap().get(&sub.members) {
            return Arc::clone(hit);
        }
        let field = Arc::new(edge_betweenness(&sub.graph));
        self.entries
            .lock()
            .unwrap()
            .entry(sub.members.clone())
            .or_insert(field)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Raw shortest route between two nodes, by street length.
pub fn shortest_path(g: &StreetGraph, origin: &str, dest: &str) -> Result<(Path, f64), RouteError> {
    let o = g.node_ix(origin)?;
    let d = g.node_ix(dest)?;
    let path = astar(g, o, d, |e| g.edge(e).length_m)
        .ok_or_else(|| RouteError::NoPath(origin.into(), dest.into()))?;
    let len = path.length_m(g);
    Ok((path, len))
}

/// Everything needed to search one query: the subnetwork, its weights, and
/// the raw shortest route on the full graph.
#[derive(Debug, Clone)]
pub struct PreparedQuery {
    pub sub: Subnetwork,
    pub weighting: EdgeWeighting,
    pub shortest: Path,
    pub shortest_length_m: f64,
}

pub fn prepare_query(
    g: &StreetGraph,
    zones: &SharedZoneSet,
    q: &RouteQuery,
    cache: Option<&BcCache>,
) -> Result<PreparedQuery, RouteError> {
    q.weights.validate()?;
    let (shortest, shortest_length_m) = shortest_path(g, &q.origin, &q.destination)?;
    let sub = subnetwork_bbox(g, &q.origin, &q.destination, q.min_side_km)?;
    let bc = if q.weights.bc_max > 0.0 && sub.graph.edge_count() > 0 {
        let raw = match cache {
            Some(c) => c.get_or_compute(&sub),
            None => Arc::new(edge_betweenness(&sub.graph)),
        };
        minmax_scale(&raw, q.weights.bc_max)?
    } else {
        EdgeScalarField::zeros(&sub.graph)
    };
    let ic = match &q.ic_layer {
        Some(layer) if sub.graph.edge_count() > 0 => {
            Some(minmax_scale(&layer.restrict_to(&sub.graph)?, q.weights.ic_max)?)
        }
        _ => None,
    };
    let weighting = assign_edge_weights(&sub.graph, zones, &bc, shortest_length_m, &q.weights, ic.as_ref())?;
    Ok(PreparedQuery { sub, weighting, shortest, shortest_length_m })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub origin: String,
    pub destination: String,
    pub node_path: Vec<String>,
    pub edge_path: Vec<String>,
    pub length_m: f64,
    pub weighted_cost: f64,
    pub shortest_length_m: f64,
    pub shortest_edge_path: Vec<String>,
    pub increment_pct: f64,
    pub per_edge_breakdown: Vec<EdgeBreakdown>,
    pub box_side_km: f64,
}

/// Runs the full pipeline for one query.
///
/// Among routes of equal weighted cost the raw shortest route is preferred
/// when it lies inside the subnetwork, so zero hazards reproduce it exactly.
pub fn plan_social_route(
    g: &StreetGraph,
    zones: &SharedZoneSet,
    q: &RouteQuery,
    cache: Option<&BcCache>,
) -> Result<RouteResult, RouteError> {
    let prepared = prepare_query(g, zones, q, cache)?;
    Ok(search_prepared(g, &prepared))
}

pub fn search_prepared(g: &StreetGraph, p: &PreparedQuery) -> RouteResult {
    let sub = &p.sub.graph;
    let weights = p.weighting.weights.values();
    let found = astar(sub, p.sub.origin, p.sub.destination, |e| weights[e])
        .expect("subnetwork connectivity was checked");

    // The full-graph shortest route, mapped into the subnetwork if it fits.
    let shortest_in_sub: Option<Vec<usize>> = p
        .shortest
        .edges
        .iter()
        .map(|&e| sub.edge_ix(&g.edge(e).id))
        .collect();
    let (edges, cost) = match shortest_in_sub {
        Some(edges) => {
            let c = edges.iter().fold(0.0, |acc, &e| acc + weights[e]);
            if c <= found.cost {
                (edges, c)
            } else {
                (found.edges, found.cost)
            }
        }
        None => (found.edges, found.cost),
    };

    let mut node_path = vec![sub.node(p.sub.origin).id.clone()];
    node_path.extend(edges.iter().map(|&e| sub.node(sub.edge(e).to).id.clone()));
    let length_m: f64 = edges.iter().map(|&e| sub.edge(e).length_m).sum();
    let increment_pct = if p.shortest_length_m > 0.0 {
        100.0 * (length_m - p.shortest_length_m) / p.shortest_length_m
    } else {
        0.0
    };
    RouteResult {
        origin: sub.node(p.sub.origin).id.clone(),
        destination: sub.node(p.sub.destination).id.clone(),
        node_path,
        edge_path: edges.iter().map(|&e| sub.edge(e).id.clone()).collect(),
        length_m,
        weighted_cost: cost,
        shortest_length_m: p.shortest_length_m,
        shortest_edge_path: p.shortest.edges.iter().map(|&e| g.edge(e).id.clone()).collect(),
        increment_pct,
        per_edge_breakdown: edges.iter().map(|&e| p.weighting.breakdown[e].clone()).collect(),
        box_side_km: p.sub.bbox.side_km(),
    }
}

#[cfg(test)]
mod tests;
