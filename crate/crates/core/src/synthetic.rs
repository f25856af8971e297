//! Seeded synthetic street networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;
use crate::graph::{Edge, Node, StreetGraph};
use crate::zones::SharedZoneSet;

/// Regular grid of two-way streets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing_m: f64,
    /// South-west corner.
    pub origin: GeoPoint,
    /// Node coordinates are placed at `spacing_m * geometry_scale` so the
    /// great-circle distance between neighbors never exceeds the stored
    /// street length.
    pub geometry_scale: f64,
    /// Street lengths are `spacing_m * (1 + u)` with `u` uniform in
    /// `[0, length_jitter]`; 0 gives a uniform grid full of length ties.
    pub length_jitter: f64,
    pub jitter_seed: u64,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, spacing_m: f64) -> Self {
        GridSpec {
            rows,
            cols,
            spacing_m,
            origin: GeoPoint { lat: 28.55, lon: 77.15 },
            geometry_scale: 0.9999,
            length_jitter: 0.0,
            jitter_seed: 0,
        }
    }
}

pub fn node_id(row: usize, col: usize) -> String {
    format!("r{row}c{col}")
}

/// Builds the grid. Also returns the node index of each `(row, col)`,
/// row-major.
pub fn grid_graph(spec: &GridSpec) -> (StreetGraph, Vec<usize>) {
    let step = spec.spacing_m * spec.geometry_scale;
    let mut nodes = Vec::with_capacity(spec.rows * spec.cols);
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            nodes.push(Node {
                id: node_id(r, c),
                location: spec.origin.offset_m(c as f64 * step, r as f64 * step),
            });
        }
    }
    let ix = |r: usize, c: usize| r * spec.cols + c;
    let mut edges = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.jitter_seed);
    let mut two_way = |id: String, a: usize, b: usize| {
        let length_m = if spec.length_jitter > 0.0 {
            spec.spacing_m * (1.0 + rng.random_range(0.0..=spec.length_jitter))
        } else {
            spec.spacing_m
        };
        edges.push(Edge { id: id.clone(), from: a, to: b, length_m });
        edges.push(Edge { id: format!("{id}:r"), from: b, to: a, length_m });
    };
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            if c + 1 < spec.cols {
                two_way(format!("h{r}_{c}"), ix(r, c), ix(r, c + 1));
            }
            if r + 1 < spec.rows {
                two_way(format!("v{r}_{c}"), ix(r, c), ix(r + 1, c));
            }
        }
    }
    let g = StreetGraph::from_parts(nodes, edges).expect("grid is valid");
    let index = (0..spec.rows * spec.cols).collect();
    (g, index)
}

/// Grid city with randomly planted shared-space zones.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CitySpec {
    pub grid: GridSpec,
    pub meso_zones: usize,
    pub micro_points: usize,
    /// Keep zone centers at least this far inside the grid edge.
    pub margin_m: f64,
    pub seed: u64,
}

impl CitySpec {
    /// 60x60 grid at 100 m spacing with street lengths jittered up to 30%,
    /// 6 meso zones and 12 micro points.
    pub fn standard(seed: u64) -> Self {
        CitySpec {
            grid: GridSpec { length_jitter: 0.3, jitter_seed: seed, ..GridSpec::new(60, 60, 100.0) },
            meso_zones: 6,
            micro_points: 12,
            margin_m: 300.0,
            seed,
        }
    }
}

pub fn grid_city(spec: &CitySpec) -> (StreetGraph, SharedZoneSet) {
    let (g, _) = grid_graph(&spec.grid);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g_spec = &spec.grid;
    let width = (g_spec.cols - 1) as f64 * g_spec.spacing_m * g_spec.geometry_scale;
    let height = (g_spec.rows - 1) as f64 * g_spec.spacing_m * g_spec.geometry_scale;
    let margin = spec.margin_m.min(width / 2.0).min(height / 2.0);
    let place = |rng: &mut ChaCha8Rng| {
        let x = rng.random_range(margin..=width - margin);
        let y = rng.random_range(margin..=height - margin);
        g_spec.origin.offset_m(x, y)
    };
    let meso_zones = (0..spec.meso_zones).map(|_| place(&mut rng)).collect();
    let micro_points = (0..spec.micro_points).map(|_| place(&mut rng)).collect();
    (g, SharedZoneSet { meso_zones, micro_points })
}

/// Two routes between `o` and `d`: a direct 1000 m route whose first edge
/// runs through the inner ring of a zone at the local origin, and a
/// zone-free detour of `detour_len_m` (split over four edges, the last one
/// absorbing any change). Node placement keeps every chord below its street
/// length, and every detour midpoint and the second direct edge outside the
/// inner 100 m ring.
pub fn two_route_fixture(detour_len_m: f64) -> (StreetGraph, SharedZoneSet) {
    let zone = GeoPoint { lat: 1.0, lon: 1.0 };
    let at = |x: f64, y: f64| zone.offset_m(x, y);
    let named = [
        ("o", at(-240.0, 0.0)),
        ("p", at(240.0, 0.0)),
        ("d", at(240.0, 120.0)),
        ("a", at(-240.0, 150.0)),
        ("b", at(0.0, 250.0)),
        ("c", at(240.0, 250.0)),
    ];
    let nodes = named
        .iter()
        .map(|(id, p)| Node { id: (*id).into(), location: *p })
        .collect();
    let last = detour_len_m - 850.0;
    assert!(last >= 130.0, "detour too short for the fixture geometry");
    let spec = [
        ("op", 0, 1, 500.0),
        ("pd", 1, 2, 500.0),
        ("oa", 0, 3, 300.0),
        ("ab", 3, 4, 300.0),
        ("bc", 4, 5, 250.0),
        ("cd", 5, 2, last),
    ];
    let edges = spec
        .iter()
        .map(|&(id, from, to, length_m)| Edge { id: id.into(), from, to, length_m })
        .collect();
    let g = StreetGraph::from_parts(nodes, edges).expect("fixture is valid");
    (g, SharedZoneSet { meso_zones: vec![zone], micro_points: vec![] })
}
