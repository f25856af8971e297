//! Directed, geocoded street graph.
//!
//! Nodes and edges are addressed internally by dense indices (their position
//! in document order); string ids are kept for I/O. An induced subgraph keeps
//! the relative order of the nodes and edges it retains, so index-based tie
//! breaking behaves the same on a subnetwork as on its parent graph.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{haversine_m, midpoint, BoundingBox, GeoError, GeoPoint};

/// Suffix appended to an undirected edge id for its reverse direction.
pub const REVERSE_SUFFIX: &str = ":r";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("node `{id}` has invalid coordinates: {source}")]
    Coordinate {
        id: String,
        #[source]
        source: GeoError,
    },
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references missing node `{node}`")]
    DanglingEndpoint { edge: String, node: String },
    #[error("edge `{0}` has non-positive or non-finite length {1}")]
    BadLength(String, f64),
    #[error("edge `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("min_side_km must be positive, got {0}")]
    BadBoxSide(f64),
    #[error(
        "`{origin}` and `{destination}` are disconnected inside the {side_km:.3} km box; \
         raise min_side_km to widen it"
    )]
    DisconnectedInBox {
        origin: String,
        destination: String,
        side_km: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub location: GeoPoint,
}

/// A directed edge; `from`/`to` are node indices into the owning graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NodeRecord {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length_m: f64,
}

/// On-disk JSON graph format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphDocument {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default = "default_directed")]
    pub directed: bool,
}

fn default_directed() -> bool {
    true
}

#[derive(Debug, Clone)]
pub struct StreetGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl PartialEq for StreetGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl StreetGraph {
    /// Builds a graph from validated parts. Edge endpoints must be valid
    /// indices; everything else is checked here.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            n.location.validate().map_err(|source| GraphError::Coordinate {
                id: n.id.clone(),
                source,
            })?;
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            for end in [e.from, e.to] {
                if end >= nodes.len() {
                    return Err(GraphError::DanglingEndpoint {
                        edge: e.id.clone(),
                        node: format!("#{end}"),
                    });
                }
            }
            if !(e.length_m > 0.0 && e.length_m.is_finite()) {
                return Err(GraphError::BadLength(e.id.clone(), e.length_m));
            }
            if e.from == e.to {
                return Err(GraphError::SelfLoop(e.id.clone()));
            }
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            out_edges[e.from].push(i);
            in_edges[e.to].push(i);
        }
        Ok(StreetGraph {
            nodes,
            edges,
            node_index,
            edge_index,
            out_edges,
            in_edges,
        })
    }

    pub fn from_document(doc: &GraphDocument) -> Result<Self, GraphError> {
        let nodes: Vec<Node> = doc
            .nodes
            .iter()
            .map(|r| Node {
                id: r.id.clone(),
                location: GeoPoint {
                    lat: r.lat,
                    lon: r.lon,
                },
            })
            .collect();
        let mut lookup = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if lookup.insert(n.id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let resolve = |edge: &str, node: &str| {
            lookup
                .get(node)
                .copied()
                .ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: edge.to_string(),
                    node: node.to_string(),
                })
        };
        let mut edges = Vec::with_capacity(doc.edges.len() * if doc.directed { 1 } else { 2 });
        for r in &doc.edges {
            let from = resolve(&r.id, &r.from)?;
            let to = resolve(&r.id, &r.to)?;
            edges.push(Edge {
                id: r.id.clone(),
                from,
                to,
                length_m: r.length_m,
            });
            if !doc.directed {
                edges.push(Edge {
                    id: format!("{}{REVERSE_SUFFIX}", r.id),
                    from: to,
                    to: from,
                    length_m: r.length_m,
                });
            }
        }
        Self::from_parts(nodes, edges)
    }

    /// Serializes to the directed form of the graph document.
    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id.clone(),
                    lat: n.location.lat,
                    lon: n.location.lon,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    from: self.nodes[e.from].id.clone(),
                    to: self.nodes[e.to].id.clone(),
                    length_m: e.length_m,
                })
                .collect(),
            directed: true,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, ix: usize) -> &Node {
        &self.nodes[ix]
    }

    pub fn edge(&self, ix: usize) -> &Edge {
        &self.edges[ix]
    }

    pub fn node_ix(&self, id: &str) -> Result<usize, GraphError> {
        self.node_index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    pub fn edge_ix(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    pub fn location(&self, node: usize) -> GeoPoint {
        self.nodes[node].location
    }

    /// Geographic midpoint of an edge's endpoints.
    pub fn edge_midpoint(&self, edge: usize) -> GeoPoint {
        let e = &self.edges[edge];
        midpoint(self.location(e.from), self.location(e.to))
    }

    /// Recomputes the adjacency index from the edge list and reports whether
    /// it matches the stored one.
    pub fn adjacency_consistent(&self) -> bool {
        let mut out = vec![Vec::new(); self.nodes.len()];
        let mut inc = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(i);
            inc[e.to].push(i);
        }
        out == self.out_edges && inc == self.in_edges
    }

    /// Induced subgraph on the nodes flagged in `keep`. Returns the subgraph
    /// and, for each of its nodes, the index of that node in `self`.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (StreetGraph, Vec<usize>) {
        assert_eq!(keep.len(), self.nodes.len());
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut members = Vec::new();
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if keep[i] {
                remap[i] = nodes.len();
                members.push(i);
                nodes.push(n.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.from] && keep[e.to])
            .map(|e| Edge {
                id: e.id.clone(),
                from: remap[e.from],
                to: remap[e.to],
                length_m: e.length_m,
            })
            .collect();
        let sub = StreetGraph::from_parts(nodes, edges)
            .expect("induced subgraph of a valid graph is valid");
        (sub, members)
    }

    /// Whether `to` is reachable from `from` along directed edges.
    pub fn reachable(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v] {
                let w = self.edges[e].to;
                if w == to {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }
}

/// Parses and validates a JSON graph document.
pub fn load_graph(bytes: &[u8]) -> Result<StreetGraph, GraphError> {
    let doc: GraphDocument =
        serde_json::from_slice(bytes).map_err(|e| GraphError::Malformed(e.to_string()))?;
    StreetGraph::from_document(&doc)
}

/// Serializes a graph to JSON bytes in the directed document form.
pub fn serialize_graph(g: &StreetGraph) -> Vec<u8> {
    serde_json::to_vec(&g.to_document()).expect("graph documents always serialize")
}

/// The query-local subnetwork around an origin/destination pair.
#[derive(Debug, Clone)]
pub struct Subnetwork {
    pub graph: StreetGraph,
    pub bbox: BoundingBox,
    /// Parent-graph index of each subnetwork node, ascending.
    pub members: Vec<usize>,
    pub origin: usize,
    pub destination: usize,
}

/// Buffer added to the origin/destination span when sizing the box.
pub const BOX_BUFFER_M: f64 = 1000.0;

/// The square box used for an O-D pair: centered on the geographic
/// midpoint, side `max(min_side, span + 1 km)`.
pub fn od_bbox(g: &StreetGraph, origin: usize, dest: usize, min_side_km: f64) -> BoundingBox {
    let o = g.location(origin);
    let d = g.location(dest);
    let side_m = (min_side_km * 1000.0).max(haversine_m(o, d) + BOX_BUFFER_M);
    BoundingBox::square(midpoint(o, d), side_m)
}

/// Extracts the induced subgraph inside the O-D box. Origin and destination
/// are always kept; the destination must stay reachable from the origin.
pub fn subnetwork_bbox(
    g: &StreetGraph,
    origin: &str,
    dest: &str,
    min_side_km: f64,
) -> Result<Subnetwork, GraphError> {
    if !(min_side_km > 0.0) {
        return Err(GraphError::BadBoxSide(min_side_km));
    }
    let o = g.node_ix(origin)?;
    let d = g.node_ix(dest)?;
    let bbox = od_bbox(g, o, d, min_side_km);
    let mut keep: Vec<bool> = g.nodes().iter().map(|n| bbox.contains(n.location)).collect();
    keep[o] = true;
    keep[d] = true;
    let (graph, members) = g.induced_subgraph(&keep);
    let so = members.binary_search(&o).expect("origin kept");
    let sd = members.binary_search(&d).expect("destination kept");
    if !graph.reachable(so, sd) {
        return Err(GraphError::DisconnectedInBox {
            origin: origin.to_string(),
            destination: dest.to_string(),
            side_km: bbox.side_km(),
        });
    }
    Ok(Subnetwork {
        graph,
        bbox,
        members,
        origin: so,
        destination: sd,
    })
}
