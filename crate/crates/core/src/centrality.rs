//! Edge betweenness centrality and min-max rescaling of edge layers.
//!
//! Betweenness follows Brandes' accumulation: one Dijkstra pass per source
//! yields distances and shortest-path counts, and a reverse sweep in
//! settlement order distributes pair dependencies onto edges. Path counts
//! are kept in `f64` since they overflow integers on grid graphs.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::StreetGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("edge field is empty")]
    Empty,
    #[error("edge field has no value for edge `{0}`")]
    Missing(String),
    #[error("edge field has a value for unknown edge `{0}`")]
    Unknown(String),
    #[error("edge `{0}` has invalid value {1}")]
    BadValue(String, f64),
    #[error("edge field was built for a different graph")]
    Mismatch,
}

/// A non-negative value per edge, aligned with the edge order of the graph
/// it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScalarField {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl EdgeScalarField {
    pub fn zeros(g: &StreetGraph) -> Self {
        Self::from_values(g, vec![0.0; g.edge_count()])
    }

    /// Field with one value per edge of `g`, in edge order.
    pub fn from_values(g: &StreetGraph, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), g.edge_count());
        EdgeScalarField {
            ids: g.edges().iter().map(|e| e.id.clone()).collect(),
            values,
        }
    }

    /// Field keyed by edge id; keys must match the edges of `g` exactly.
    pub fn from_pairs<I>(g: &StreetGraph, pairs: I) -> Result<Self, FieldError>
    where
        I: IntoIterator<Item = (String, f64)>,
    {
        let mut values = vec![f64::NAN; g.edge_count()];
        for (id, v) in pairs {
            let ix = g.edge_ix(&id).ok_or_else(|| FieldError::Unknown(id.clone()))?;
            if !(v >= 0.0 && v.is_finite()) {
                return Err(FieldError::BadValue(id, v));
            }
            values[ix] = v;
        }
        if let Some(ix) = values.iter().position(|v| v.is_nan()) {
            return Err(FieldError::Missing(g.edge(ix).id.clone()));
        }
        Ok(Self::from_values(g, values))
    }

    /// Parses `edge_id,value` CSV (header row required) into a map.
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<HashMap<String, f64>, FieldError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut out = HashMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| FieldError::Unknown(format!("csv: {e}")))?;
            let id = rec.get(0).unwrap_or_default().to_string();
            let raw = rec.get(1).unwrap_or_default();
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| FieldError::BadValue(id.clone(), f64::NAN))?;
            out.insert(id, v);
        }
        Ok(out)
    }

    /// Writes `edge_id,value` CSV.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["edge_id", "value"])?;
        for (id, v) in self.iter() {
            w.write_record([id, &v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Restricts a field to the edges of `sub`, matching by id.
    pub fn restrict_to(&self, sub: &StreetGraph) -> Result<Self, FieldError> {
        let lookup: HashMap<&str, f64> = self.iter().collect();
        let values = sub
            .edges()
            .iter()
            .map(|e| {
                lookup
                    .get(e.id.as_str())
                    .copied()
                    .ok_or_else(|| FieldError::Missing(e.id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_values(sub, values))
    }

    /// Checks that this field is keyed exactly by the edges of `g`.
    pub fn check_keys(&self, g: &StreetGraph) -> Result<(), FieldError> {
        if self.ids.len() != g.edge_count() {
            return Err(FieldError::Mismatch);
        }
        for (id, e) in self.ids.iter().zip(g.edges()) {
            if *id != e.id {
                return Err(FieldError::Mismatch);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.ids.iter().position(|x| x == id).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids.iter().map(String::as_str).zip(self.values.iter().copied())
    }
}

/// Shortest-path metric used inside the betweenness computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathMetric {
    #[default]
    Length,
    /// Every edge counts 1. Intended for tests.
    Hops,
}

/// Sources processed per work unit. Fixed so that the summation order, and
/// therefore every bit of the result, does not depend on the thread count.
const SOURCES_PER_CHUNK: usize = 32;

/// Normalized edge betweenness with length-weighted shortest paths.
pub fn edge_betweenness(g: &StreetGraph) -> EdgeScalarField {
    edge_betweenness_with(g, PathMetric::Length)
}

pub fn edge_betweenness_with(g: &StreetGraph, metric: PathMetric) -> EdgeScalarField {
    let raw = edge_betweenness_raw(g, metric);
    let n = g.node_count() as f64;
    let scale = if g.node_count() >= 2 { 1.0 / (n * (n - 1.0)) } else { 0.0 };
    let values = raw.into_iter().map(|v| v * scale).collect();
    EdgeScalarField::from_values(g, values)
}

/// Unnormalized pair-dependency sums, indexed by edge.
pub fn edge_betweenness_raw(g: &StreetGraph, metric: PathMetric) -> Vec<f64> {
    let csr = Csr::new(g, metric);
    let sources: Vec<usize> = (0..g.node_count()).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|chunk| {
            let mut scratch = Scratch::new(csr.n);
            let mut acc = vec![0.0; csr.m];
            for &s in chunk {
                single_source(&csr, s, &mut scratch, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; csr.m];
    for p in &partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Forward and reverse compressed adjacency with edge weights inlined.
struct Csr {
    n: usize,
    m: usize,
    out_start: Vec<usize>,
    out_to: Vec<usize>,
    out_w: Vec<f64>,
    in_start: Vec<usize>,
    in_from: Vec<usize>,
    in_w: Vec<f64>,
    in_edge: Vec<usize>,
}

impl Csr {
    fn new(g: &StreetGraph, metric: PathMetric) -> Self {
        let n = g.node_count();
        let weight = |e: usize| match metric {
            PathMetric::Length => g.edge(e).length_m,
            PathMetric::Hops => 1.0,
        };
        let mut csr = Csr {
            n,
            m: g.edge_count(),
            out_start: Vec::with_capacity(n + 1),
            out_to: Vec::with_capacity(g.edge_count()),
            out_w: Vec::with_capacity(g.edge_count()),
            in_start: Vec::with_capacity(n + 1),
            in_from: Vec::with_capacity(g.edge_count()),
            in_w: Vec::with_capacity(g.edge_count()),
            in_edge: Vec::with_capacity(g.edge_count()),
        };
        for v in 0..n {
            csr.out_start.push(csr.out_to.len());
            for &e in g.out_edges(v) {
                csr.out_to.push(g.edge(e).to);
                csr.out_w.push(weight(e));
            }
            csr.in_start.push(csr.in_from.len());
            for &e in g.in_edges(v) {
                csr.in_from.push(g.edge(e).from);
                csr.in_w.push(weight(e));
                csr.in_edge.push(e);
            }
        }
        csr.out_start.push(csr.out_to.len());
        csr.in_start.push(csr.in_from.len());
        csr
    }
}

struct Scratch {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<usize>,
    heap: BinaryHeap<Reverse<(u64, usize)>>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            heap: BinaryHeap::new(),
        }
    }
}

// Non-negative finite f64 values order the same as their bit patterns.
fn key(d: f64) -> u64 {
    d.to_bits()
}

fn single_source(csr: &Csr, s: usize, sc: &mut Scratch, acc: &mut [f64]) {
    for &v in &sc.order {
        sc.dist[v] = f64::INFINITY;
        sc.sigma[v] = 0.0;
        sc.delta[v] = 0.0;
    }
    sc.order.clear();
    sc.heap.clear();

    sc.dist[s] = 0.0;
    sc.heap.push(Reverse((key(0.0), s)));
    let mut settled_mark = std::mem::take(&mut sc.delta);
    // `delta` doubles as a settled flag during the forward pass (1.0 = settled).
    while let Some(Reverse((k, v))) = sc.heap.pop() {
        if k != key(sc.dist[v]) || settled_mark[v] != 0.0 {
            continue;
        }
        settled_mark[v] = 1.0;
        // Every predecessor on a shortest path has a strictly smaller
        // distance and is therefore already settled with a final count.
        let sigma_v = if v == s {
            1.0
        } else {
            let mut acc_sigma = 0.0;
            for j in csr.in_start[v]..csr.in_start[v + 1] {
                let u = csr.in_from[j];
                if sc.dist[u] + csr.in_w[j] == sc.dist[v] {
                    acc_sigma += sc.sigma[u];
                }
            }
            acc_sigma
        };
        sc.sigma[v] = sigma_v;
        sc.order.push(v);
        let dv = sc.dist[v];
        for j in csr.out_start[v]..csr.out_start[v + 1] {
            let w = csr.out_to[j];
            let nd = dv + csr.out_w[j];
            if nd < sc.dist[w] {
                sc.dist[w] = nd;
                sc.heap.push(Reverse((key(nd), w)));
            }
        }
    }
    for &v in &sc.order {
        settled_mark[v] = 0.0;
    }
    sc.delta = settled_mark;

    for idx in (0..sc.order.len()).rev() {
        let w = sc.order[idx];
        let coeff = (1.0 + sc.delta[w]) / sc.sigma[w];
        for j in csr.in_start[w]..csr.in_start[w + 1] {
            let v = csr.in_from[j];
            if sc.dist[v] + csr.in_w[j] == sc.dist[w] {
                let c = sc.sigma[v] * coeff;
                acc[csr.in_edge[j]] += c;
                sc.delta[v] += c;
            }
        }
    }
}

/// Maps values linearly onto `[0, target_max]`. A constant field maps to 0.
pub fn minmax_scale(field: &EdgeScalarField, target_max: f64) -> Result<EdgeScalarField, FieldError> {
    if field.is_empty() {
        return Err(FieldError::Empty);
    }
    if !(target_max >= 0.0 && target_max.is_finite()) {
        return Err(FieldError::BadValue("<target_max>".into(), target_max));
    }
    let (lo, hi) = field
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let values = field
        .values
        .iter()
        .map(|&v| {
            if span > 0.0 {
                (target_max * ((v - lo) / span)).clamp(0.0, target_max)
            } else {
                0.0
            }
        })
        .collect();
    Ok(EdgeScalarField {
        ids: field.ids.clone(),
        values,
    })
}
