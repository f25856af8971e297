//! A* and plain Dijkstra over a street graph with caller-supplied edge costs.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::geo::haversine_m;
use crate::graph::StreetGraph;

/// A route through a graph, as node and edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
    /// Sum of the search costs along `edges`, accumulated front to back.
    pub cost: f64,
}

impl Path {
    pub fn empty(at: usize) -> Self {
        Path { nodes: vec![at], edges: Vec::new(), cost: 0.0 }
    }

    pub fn length_m(&self, g: &StreetGraph) -> f64 {
        self.edges.iter().map(|&e| g.edge(e).length_m).sum()
    }

    /// Cost of this path under `cost`, accumulated in path order.
    pub fn cost_under(&self, cost: impl Fn(usize) -> f64) -> f64 {
        self.edges.iter().fold(0.0, |acc, &e| acc + cost(e))
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    f: f64,
    node: usize,
    g: f64,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f
            .total_cmp(&other.f)
            .then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* with the great-circle distance to `dest` as heuristic.
///
/// Costs must satisfy `cost(e) >= length_m(e)` and street lengths must not
/// undercut the great-circle distance between their endpoints for the
/// heuristic to be admissible. Nodes may be re-expanded when a cheaper
/// route to them appears, so mild inconsistency does not break optimality.
/// Equal-priority entries pop smaller node index first.
pub fn astar(
    g: &StreetGraph,
    origin: usize,
    dest: usize,
    cost: impl Fn(usize) -> f64,
) -> Option<Path> {
    if origin == dest {
        return Some(Path::empty(origin));
    }
    let n = g.node_count();
    let target = g.location(dest);
    let mut h = vec![f64::NAN; n];
    let mut heuristic = |v: usize| {
        if h[v].is_nan() {
            h[v] = haversine_m(g.location(v), target);
        }
        h[v]
    };
    let mut best = vec![f64::INFINITY; n];
    let mut via = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    best[origin] = 0.0;
    heap.push(Reverse(Entry { f: heuristic(origin), node: origin, g: 0.0 }));
    while let Some(Reverse(Entry { node: v, g: gv, .. })) = heap.pop() {
        if gv > best[v] {
            continue;
        }
        if v == dest {
            return Some(trace(g, origin, dest, &via, gv));
        }
        for &e in g.out_edges(v) {
            let w = g.edge(e).to;
            let nd = gv + cost(e);
            if nd < best[w] {
                best[w] = nd;
                via[w] = e;
                heap.push(Reverse(Entry { f: nd + heuristic(w), node: w, g: nd }));
            }
        }
    }
    None
}

/// Textbook Dijkstra; the reference the A* search is checked against.
pub fn dijkstra(
    g: &StreetGraph,
    origin: usize,
    dest: usize,
    cost: impl Fn(usize) -> f64,
) -> Option<Path> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut via = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[origin] = 0.0;
    heap.push(Reverse(Entry { f: 0.0, node: origin, g: 0.0 }));
    while let Some(Reverse(Entry { node: v, .. })) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if v == dest {
            return Some(trace(g, origin, dest, &via, dist[v]));
        }
        for &e in g.out_edges(v) {
            let w = g.edge(e).to;
            let nd = dist[v] + cost(e);
            if nd < dist[w] {
                dist[w] = nd;
                via[w] = e;
                heap.push(Reverse(Entry { f: nd, node: w, g: nd }));
            }
        }
    }
    None
}

fn trace(g: &StreetGraph, origin: usize, dest: usize, via: &[usize], cost: f64) -> Path {
    let mut edges = Vec::new();
    let mut v = dest;
    while v != origin {
        let e = via[v];
        edges.push(e);
        v = g.edge(e).from;
    }
    edges.reverse();
    let mut nodes = Vec::with_capacity(edges.len() + 1);
    nodes.push(origin);
    nodes.extend(edges.iter().map(|&e| g.edge(e).to));
    Path { nodes, edges, cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use crate::graph::{Edge, Node};
    use proptest::prelude::*;

    /// Nodes on a small circle so chords stay well below the edge lengths used.
    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> StreetGraph {
        let base = GeoPoint { lat: 10.0, lon: 10.0 };
        let nodes = (0..n)
            .map(|i| {
                let a = i as f64 / n as f64 * std::f64::consts::TAU;
                Node { id: format!("v{i}"), location: base.offset_m(5.0 * a.cos(), 5.0 * a.sin()) }
            })
            .collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b, l))| Edge { id: format!("e{i}"), from: a, to: b, length_m: l })
            .collect();
        StreetGraph::from_parts(nodes, edges).unwrap()
    }

    fn len(g: &StreetGraph) -> impl Fn(usize) -> f64 + '_ {
        |e| g.edge(e).length_m
    }

    #[test]
    fn trivial_query() {
        let g = graph(2, &[(0, 1, 10.0)]);
        let p = astar(&g, 0, 0, len(&g)).unwrap();
        assert!(p.edges.is_empty());
        assert_eq!(p.cost, 0.0);
    }

    #[test]
    fn prefers_two_short_hops() {
        let g = graph(3, &[(0, 1, 100.0), (1, 2, 100.0), (0, 2, 250.0)]);
        let p = astar(&g, 0, 2, len(&g)).unwrap();
        assert_eq!(p.nodes, vec![0, 1, 2]);
        assert_eq!(p.cost, 200.0);
    }

    #[test]
    fn unreachable() {
        let g = graph(3, &[(0, 1, 100.0)]);
        assert!(astar(&g, 0, 2, len(&g)).is_none());
        assert!(dijkstra(&g, 1, 0, len(&g)).is_none());
    }

    /// Exhaustive enumeration of simple paths.
    fn brute_force(g: &StreetGraph, o: usize, d: usize) -> Option<f64> {
        fn go(g: &StreetGraph, v: usize, d: usize, seen: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if v == d {
                *best = best.min(acc);
                return;
            }
            for &e in g.out_edges(v) {
                let w = g.edge(e).to;
                if !seen[w] {
                    seen[w] = true;
                    go(g, w, d, seen, acc + g.edge(e).length_m, best);
                    seen[w] = false;
                }
            }
        }
        let mut seen = vec![false; g.node_count()];
        seen[o] = true;
        let mut best = f64::INFINITY;
        go(g, o, d, &mut seen, 0.0, &mut best);
        best.is_finite().then_some(best)
    }

    proptest! {
        #[test]
        fn matches_enumeration_on_random_digraphs(
            raw in prop::collection::vec((0usize..8, 0usize..8, 10.0f64..500.0), 0..30),
            o in 0usize..8, d in 0usize..8,
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|(a, b, _)| a != b).collect();
            let g = graph(8, &edges);
            let expect = if o == d { Some(0.0) } else { brute_force(&g, o, d) };
            let got = astar(&g, o, d, len(&g));
            match (expect, got) {
                (None, None) => {}
                (Some(x), Some(p)) => {
                    prop_assert!((x - p.cost).abs() <= 1e-9 * x.max(1.0));
                    prop_assert!((p.length_m(&g) - p.cost).abs() <= 1e-9 * x.max(1.0));
                    let reference = dijkstra(&g, o, d, len(&g)).unwrap();
                    prop_assert!((reference.cost - p.cost).abs() <= 1e-9 * x.max(1.0));
                }
                (a, b) => prop_assert!(false, "mismatch {:?} vs {:?}", a, b.map(|p| p.cost)),
            }
        }
    }
}
