use super::*;
use crate::geo::GeoPoint;
use crate::graph::{Edge, Node};
use crate::synthetic::{grid_city, grid_graph, two_route_fixture, CitySpec, GridSpec};

/// Only the inner ring carries a score, so the fixture's costs are exactly
/// length + 0.2 * L_sp on the zone edge and plain length elsewhere.
fn inner_ring_only() -> HazardWeights {
    HazardWeights { haz_ring_scores: [0.2, 0.0, 0.0], pa_score: 0.0, bc_max: 0.0, ic_max: 0.0 }
}

fn plan(g: &StreetGraph, z: &SharedZoneSet, o: &str, d: &str, w: HazardWeights) -> RouteResult {
    plan_social_route(g, z, &RouteQuery::new(o, d).with_weights(w), None).unwrap()
}

fn tiny_graph() -> StreetGraph {
    let base = GeoPoint { lat: 5.0, lon: 5.0 };
    let nodes = vec![
        Node { id: "a".into(), location: base },
        Node { id: "b".into(), location: base.offset_m(90.0, 0.0) },
    ];
    let edges = vec![Edge { id: "ab".into(), from: 0, to: 1, length_m: 100.0 }];
    StreetGraph::from_parts(nodes, edges).unwrap()
}

#[test]
fn columns() {
    assert_eq!(HazardWeights::default(), HazardWeights::column(2));
    let c1 = HazardWeights::column(1);
    assert_eq!(c1.haz_ring_scores, [0.5, 0.4, 0.3]);
    assert_eq!((c1.pa_score, c1.bc_max), (0.2, 0.15));
    let c3 = HazardWeights::column(3);
    assert_eq!(c3.haz_ring_scores, [0.3, 0.24, 0.18]);
    assert_eq!((c3.pa_score, c3.bc_max), (0.12, 0.09));
    for c in 1..=3 {
        HazardWeights::column(c).validate().unwrap();
    }
}

#[test]
fn weights_validation() {
    let mut w = HazardWeights::default();
    w.haz_ring_scores = [0.1, 0.2, 0.0];
    assert!(matches!(w.validate(), Err(RouteError::Weights(_))));
    let mut w = HazardWeights::default();
    w.pa_score = -0.1;
    assert!(w.validate().is_err());
}

#[test]
fn inner_ring_edge_weight() {
    let g = tiny_graph();
    let mid = g.edge_midpoint(0);
    let zones = SharedZoneSet { meso_zones: vec![mid.offset_m(0.0, 50.0)], micro_points: vec![] };
    let bc = EdgeScalarField::zeros(&g);
    let w = assign_edge_weights(&g, &zones, &bc, 1000.0, &HazardWeights::default(), None).unwrap();
    assert!((w.weights.values()[0] - 300.0).abs() < 1e-12);
    assert!((w.breakdown[0].haz - 200.0).abs() < 1e-12);
}

#[test]
fn zero_scores_leave_length() {
    let (g, zones) = grid_city(&CitySpec { grid: GridSpec::new(8, 8, 100.0), ..CitySpec::standard(1) });
    let bc = EdgeScalarField::zeros(&g);
    let w = assign_edge_weights(&g, &zones, &bc, 1234.0, &HazardWeights::zero(), None).unwrap();
    for (e, &v) in g.edges().iter().zip(w.weights.values()) {
        assert_eq!(v, e.length_m);
    }
}

#[test]
fn stacked_scores() {
    let g = tiny_graph();
    let mid = g.edge_midpoint(0);
    let zones = SharedZoneSet {
        meso_zones: vec![mid.offset_m(250.0, 0.0)],
        micro_points: vec![mid.offset_m(0.0, -30.0)],
    };
    let mut g150 = g.to_document();
    g150.edges[0].length_m = 150.0;
    let g150 = StreetGraph::from_document(&g150).unwrap();
    let bc = EdgeScalarField::from_values(&g150, vec![0.06]);
    let w = assign_edge_weights(&g150, &zones, &bc, 2000.0, &HazardWeights::default(), None).unwrap();
    assert!((w.weights.values()[0] - 670.0).abs() < 1e-9, "{}", w.weights.values()[0]);
}

#[test]
fn mismatched_bc_is_rejected() {
    let g = tiny_graph();
    let (other, _) = grid_graph(&GridSpec::new(2, 2, 100.0));
    let bc = EdgeScalarField::zeros(&other);
    let err = assign_edge_weights(&g, &SharedZoneSet::default(), &bc, 1.0, &HazardWeights::default(), None);
    assert!(matches!(err, Err(RouteError::Field(FieldError::Mismatch))));
}

#[test]
fn shortest_path_identity_and_errors() {
    let g = tiny_graph();
    let (p, len) = shortest_path(&g, "a", "a").unwrap();
    assert!(p.edges.is_empty());
    assert_eq!(len, 0.0);
    assert_eq!(shortest_path(&g, "b", "a").unwrap_err(), RouteError::NoPath("b".into(), "a".into()));
    assert!(shortest_path(&g, "a", "zz").unwrap_err().to_string().contains("zz"));
}

#[test]
fn empty_zones_follow_shortest_path() {
    let (g, _) = grid_graph(&GridSpec::new(12, 12, 100.0));
    let q = RouteQuery::new("r0c0", "r11c7").with_weights(HazardWeights {
        bc_max: 0.0,
        ..HazardWeights::default()
    });
    let r = plan_social_route(&g, &SharedZoneSet::default(), &q, None).unwrap();
    let (sp, len) = shortest_path(&g, "r0c0", "r11c7").unwrap();
    assert_eq!(r.length_m, len);
    assert_eq!(r.increment_pct, 0.0);
    let sp_ids: Vec<_> = sp.edges.iter().map(|&e| g.edge(e).id.clone()).collect();
    assert_eq!(r.edge_path, sp_ids);
}

#[test]
fn takes_clean_detour_when_cheaper() {
    let (g, zones) = two_route_fixture(1150.0);
    let r = plan(&g, &zones, "o", "d", inner_ring_only());
    assert_eq!(r.node_path, ["o", "a", "b", "c", "d"]);
    assert_eq!(r.shortest_length_m, 1000.0);
    assert_eq!(r.length_m, 1150.0);
    assert_eq!(r.weighted_cost, 1150.0);
    assert!((r.increment_pct - 15.0).abs() < 1e-12);
}

#[test]
fn keeps_zone_route_when_detour_too_long() {
    let (g, zones) = two_route_fixture(1250.0);
    let r = plan(&g, &zones, "o", "d", inner_ring_only());
    assert_eq!(r.node_path, ["o", "p", "d"]);
    assert!((r.weighted_cost - 1200.0).abs() < 1e-9);
    assert_eq!(r.increment_pct, 0.0);
    assert!((r.per_edge_breakdown[0].haz - 200.0).abs() < 1e-9);
}

#[test]
fn same_node_query_is_empty() {
    let (g, zones) = two_route_fixture(1150.0);
    let r = plan(&g, &zones, "o", "o", HazardWeights::default());
    assert_eq!(r.node_path, ["o"]);
    assert!(r.edge_path.is_empty());
    assert_eq!((r.length_m, r.weighted_cost, r.increment_pct), (0.0, 0.0, 0.0));
}

#[test]
fn disconnected_box_is_infeasible() {
    let g = tiny_graph();
    let err = plan_social_route(&g, &SharedZoneSet::default(), &RouteQuery::new("b", "a"), None).unwrap_err();
    assert!(err.is_infeasible());
}

#[test]
fn ic_layer_changes_weights() {
    let (g, zones) = two_route_fixture(1150.0);
    // Usage density concentrated on the detour's first street.
    let ic = EdgeScalarField::from_pairs(
        &g,
        g.edges().iter().map(|e| (e.id.clone(), if e.id == "oa" { 10.0 } else { 0.0 })),
    )
    .unwrap();
    let mut q = RouteQuery::new("o", "d").with_weights(HazardWeights { ic_max: 0.06, ..inner_ring_only() });
    q.ic_layer = Some(Arc::new(ic));
    let r = plan_social_route(&g, &zones, &q, None).unwrap();
    // Detour now costs 1150 + 0.06 * 1000 = 1210 > 1200.
    assert_eq!(r.node_path, ["o", "p", "d"]);
}

fn breakdown_audit(r: &RouteResult) {
    let total: f64 = r.per_edge_breakdown.iter().map(|b| b.penalty() + b.length_m).sum();
    assert!((total - r.weighted_cost).abs() <= 1e-9 * r.weighted_cost.max(1.0));
}

#[test]
fn route_invariants_on_city() {
    let spec = CitySpec { grid: GridSpec::new(25, 25, 100.0), ..CitySpec::standard(11) };
    let (g, zones) = grid_city(&spec);
    let cache = BcCache::new();
    for (o, d) in [("r0c0", "r24c24"), ("r3c20", "r22c1"), ("r12c0", "r12c24")] {
        let q = RouteQuery::new(o, d);
        let prepared = prepare_query(&g, &zones, &q, Some(&cache)).unwrap();
        let r = search_prepared(&g, &prepared);
        assert!(r.weighted_cost >= r.length_m);
        assert!(r.increment_pct >= -1e-9);
        breakdown_audit(&r);
        let w = prepared.weighting.weights.values();
        let reference = dijkstra(&prepared.sub.graph, prepared.sub.origin, prepared.sub.destination, |e| w[e])
            .unwrap();
        assert!((reference.cost - r.weighted_cost).abs() <= 1e-9 * reference.cost);
        let length_sum: f64 = r
            .edge_path
            .iter()
            .map(|id| g.edge(g.edge_ix(id).unwrap()).length_m)
            .sum();
        assert_eq!(length_sum, r.length_m);
    }
    // Every 5 km box covers the whole 2.5 km grid.
    assert_eq!(cache.len(), 1);
}

#[test]
fn hazard_scaling_never_shortens_route() {
    let spec = CitySpec { grid: GridSpec::new(20, 20, 100.0), ..CitySpec::standard(5) };
    let (g, zones) = grid_city(&spec);
    let cache = BcCache::new();
    for (o, d) in [("r0c0", "r19c19"), ("r2c17", "r18c3"), ("r9c0", "r9c19")] {
        let mut last = 0.0;
        for lambda in [1.0, 1.5, 2.5, 4.0, 8.0] {
            let w = HazardWeights::default().scaled(lambda);
            let r = plan_social_route(&g, &zones, &RouteQuery::new(o, d).with_weights(w), Some(&cache)).unwrap();
            assert!(r.length_m >= last, "{o}->{d} at {lambda}: {} < {last}", r.length_m);
            last = r.length_m;
        }
    }
    let (g, zones) = two_route_fixture(1150.0);
    let mut last = 0.0;
    for lambda in [0.1, 0.5, 0.74, 0.76, 1.0, 3.0] {
        let r = plan(&g, &zones, "o", "d", inner_ring_only().scaled(lambda));
        assert!(r.length_m >= last);
        last = r.length_m;
    }
    assert_eq!(last, 1150.0);
}
