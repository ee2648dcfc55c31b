//! Data model for compact metric graphs.
//!
//! A [`MetricGraph`] is a finite multigraph (loops and parallel edges allowed)
//! whose edges carry positive lengths and whose vertices carry one of three
//! condition types: natural (continuity + Kirchhoff), Dirichlet, or a
//! δ-coupling of nonzero strength γ. Graphs are immutable values: every
//! operation that "modifies" a graph returns a new one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a vertex. Opaque, unique within a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

/// Identifier of an edge. Opaque, unique within a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_owned())
    }
}

/// Vertex condition: natural (Kirchhoff), Dirichlet, or δ of strength γ.
///
/// Natural is semantically a δ-condition with γ = 0 and Dirichlet is the
/// γ = +∞ limit, but both are stored as their own kind so that no non-finite
/// arithmetic ever happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexCondition {
    Natural,
    Dirichlet,
    Delta { gamma: f64 },
}

impl VertexCondition {
    /// δ-strength seen by the quadratic form; `None` for Dirichlet.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            VertexCondition::Natural => Some(0.0),
            VertexCondition::Dirichlet => None,
            VertexCondition::Delta { gamma } => Some(*gamma),
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, VertexCondition::Dirichlet)
    }

    pub fn is_natural(&self) -> bool {
        matches!(self, VertexCondition::Natural)
    }

    /// Sum of δ-strengths under the usual conventions for ∞: any Dirichlet
    /// summand is absorbing, a finite sum of exactly 0 collapses to Natural.
    pub fn glued_with(&self, other: &VertexCondition) -> VertexCondition {
        match (self.gamma(), other.gamma()) {
            (Some(a), Some(b)) => VertexCondition::from_gamma(a + b),
            _ => VertexCondition::Dirichlet,
        }
    }

    /// δ-condition of strength `gamma`, collapsing γ = 0 to Natural.
    pub fn from_gamma(gamma: f64) -> VertexCondition {
        if gamma == 0.0 {
            VertexCondition::Natural
        } else {
            VertexCondition::Delta { gamma }
        }
    }
}

// The JSON form is "natural" | "dirichlet" | {"delta": γ}.
impl Serialize for VertexCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            VertexCondition::Natural => s.serialize_str("natural"),
            VertexCondition::Dirichlet => s.serialize_str("dirichlet"),
            VertexCondition::Delta { gamma } => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("delta", gamma)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for VertexCondition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Delta { delta: f64 },
        }
        match Raw::deserialize(d)? {
            Raw::Name(s) if s == "natural" => Ok(VertexCondition::Natural),
            Raw::Name(s) if s == "dirichlet" => Ok(VertexCondition::Dirichlet),
            Raw::Name(s) => Err(serde::de::Error::custom(format!(
                "unknown vertex condition `{s}`"
            ))),
            Raw::Delta { delta } => Ok(VertexCondition::Delta { gamma: delta }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub condition: VertexCondition,
}

/// An edge is identified with the interval `[0, length]`, oriented from
/// `from` (x = 0) to `to` (x = length). The orientation is an internal
/// bookkeeping convention only and never affects the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }

    /// The endpoint at the given end of the parametrising interval.
    pub fn endpoint(&self, end: End) -> &VertexId {
        match end {
            End::Src => &self.from,
            End::Dst => &self.to,
        }
    }
}

/// One of the two ends of an edge: `Src` is x = 0, `Dst` is x = length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    Src,
    Dst,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Src => End::Dst,
            End::Dst => End::Src,
        }
    }
}

/// A half-edge: addressing one specific edge end. Loops are incident to a
/// vertex twice, once per end, so half-edges disambiguate them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

impl EdgeEnd {
    pub fn new(edge: usize, end: End) -> Self {
        EdgeEnd { edge, end }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references missing vertex `{vertex}`")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("edge `{0}` has non-positive length {1}")]
    NonpositiveLength(EdgeId, f64),
    #[error("vertex `{0}` has non-finite delta strength")]
    NonfiniteGamma(VertexId),
    #[error("vertex `{0}` has delta strength 0; use a natural condition instead")]
    ZeroGammaDelta(VertexId),
    #[error("vertex `{0}` is isolated")]
    IsolatedVertex(VertexId),
    #[error("bad split point {s} for edge `{edge}` of length {length}")]
    BadSplitPoint { edge: EdgeId, s: f64, length: f64 },
    #[error("vertex `{0}` cannot be suppressed: {1}")]
    NotSuppressible(VertexId, String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
}

/// A single validation finding; `validate` returns all of them at once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

/// Compact metric multigraph with vertex conditions.
///
/// Vertices and edges keep their insertion order; every iteration in this
/// crate follows that order so results are reproducible run to run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    #[serde(skip)]
    vertex_index: HashMap<VertexId, usize>,
    #[serde(skip)]
    edge_index: HashMap<EdgeId, usize>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

/// Basic metric and combinatorial summary of a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub total_length: f64,
    pub num_edges: usize,
    pub num_vertices: usize,
    pub num_components: usize,
    /// Vertex id → degree; loops count twice.
    pub degree_map: Vec<(VertexId, usize)>,
}

impl MetricGraph {
    /// Builds and validates a graph. Fails on the first violated invariant.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let g = Self::new_unchecked(vertices, edges)?;
        for v in &g.vertices {
            match v.condition {
                VertexCondition::Delta { gamma } if !gamma.is_finite() => {
                    return Err(GraphError::NonfiniteGamma(v.id.clone()))
                }
                VertexCondition::Delta { gamma } if gamma == 0.0 => {
                    return Err(GraphError::ZeroGammaDelta(v.id.clone()))
                }
                _ => {}
            }
        }
        for e in &g.edges {
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(GraphError::NonpositiveLength(e.id.clone(), e.length));
            }
            for v in [&e.from, &e.to] {
                if !g.vertex_index.contains_key(v) {
                    return Err(GraphError::DanglingEndpoint {
                        edge: e.id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        for v in &g.vertices {
            if g.degree(&v.id) == 0 {
                return Err(GraphError::IsolatedVertex(v.id.clone()));
            }
        }
        Ok(g)
    }

    /// Builds a graph checking only id uniqueness (needed for the index
    /// maps); surgery internals use this and validate at the end.
    pub(crate) fn new_unchecked(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(v.id.0.clone()));
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(e.id.0.clone()));
            }
        }
        Ok(MetricGraph {
            vertices,
            edges,
            vertex_index,
            edge_index,
        })
    }

    /// Convenience constructor from `(id, condition)` and
    /// `(id, from, to, length)` tuples.
    pub fn from_parts<'a>(
        vertices: impl IntoIterator<Item = (&'a str, VertexCondition)>,
        edges: impl IntoIterator<Item = (&'a str, &'a str, &'a str, f64)>,
    ) -> Result<Self, GraphError> {
        let vs = vertices
            .into_iter()
            .map(|(id, condition)| Vertex {
                id: id.into(),
                condition,
            })
            .collect();
        let es = edges
            .into_iter()
            .map(|(id, from, to, length)| Edge {
                id: id.into(),
                from: from.into(),
                to: to.into(),
                length,
            })
            .collect();
        Self::new(vs, es)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_position(&self, id: &VertexId) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_position(&self, id: &EdgeId) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn vertex(&self, id: &VertexId) -> Result<&Vertex, GraphError> {
        self.vertex_position(id)
            .map(|i| &self.vertices[i])
            .ok_or_else(|| GraphError::UnknownVertex(id.clone()))
    }

    pub fn edge(&self, id: &EdgeId) -> Result<&Edge, GraphError> {
        self.edge_position(id)
            .map(|i| &self.edges[i])
            .ok_or_else(|| GraphError::UnknownEdge(id.clone()))
    }

    /// Total length |Γ| with compensated summation.
    pub fn total_length(&self) -> f64 {
        kahan_sum(self.edges.iter().map(|e| e.length))
    }

    /// Half-edges incident to the vertex, in edge insertion order; a loop
    /// contributes both ends.
    pub fn incident_ends(&self, v: &VertexId) -> Vec<EdgeEnd> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if &e.from == v {
                out.push(EdgeEnd::new(i, End::Src));
            }
            if &e.to == v {
                out.push(EdgeEnd::new(i, End::Dst));
            }
        }
        out
    }

    /// Degree of a vertex, loops counting twice.
    pub fn degree(&self, v: &VertexId) -> usize {
        self.incident_ends(v).len()
    }

    pub fn is_connected(&self) -> bool {
        self.stats().num_components <= 1
    }

    /// True when every vertex carries the natural condition.
    pub fn all_natural(&self) -> bool {
        self.vertices.iter().all(|v| v.condition.is_natural())
    }

    /// True when at least one vertex is Dirichlet or δ.
    pub fn has_dirichlet_or_delta(&self) -> bool {
        !self.all_natural()
    }

    pub fn stats(&self) -> GraphStats {
        let mut uf = UnionFind::new(self.vertices.len());
        let mut degrees = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            let a = self.vertex_index[&e.from];
            let b = self.vertex_index[&e.to];
            uf.union(a, b);
            degrees[a] += 1;
            degrees[b] += 1;
        }
        let mut roots: Vec<usize> = (0..self.vertices.len()).map(|i| uf.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        GraphStats {
            total_length: self.total_length(),
            num_edges: self.edges.len(),
            num_vertices: self.vertices.len(),
            num_components: roots.len(),
            degree_map: self
                .vertices
                .iter()
                .zip(&degrees)
                .map(|(v, d)| (v.id.clone(), *d))
                .collect(),
        }
    }

    /// Vertex index sets of the connected components, in first-seen order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(self.vertex_index[&e.from], self.vertex_index[&e.to]);
        }
        let mut by_root: Vec<(usize, Vec<usize>)> = Vec::new();
        for i in 0..self.vertices.len() {
            let r = uf.find(i);
            match by_root.iter_mut().find(|(root, _)| *root == r) {
                Some((_, members)) => members.push(i),
                None => by_root.push((r, vec![i])),
            }
        }
        by_root.into_iter().map(|(_, m)| m).collect()
    }

    /// Full invariant check; an empty report means the graph is valid.
    pub fn validate_report(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for v in &self.vertices {
            if seen.insert(v.id.0.as_str(), ()).is_some() {
                report.push(Violation {
                    code: "DuplicateId",
                    message: format!("duplicate vertex id `{}`", v.id),
                });
            }
            match v.condition {
                VertexCondition::Delta { gamma } if !gamma.is_finite() => report.push(Violation {
                    code: "NonfiniteGamma",
                    message: format!("vertex `{}` has non-finite gamma", v.id),
                }),
                VertexCondition::Delta { gamma } if gamma == 0.0 => report.push(Violation {
                    code: "ZeroGammaDelta",
                    message: format!("vertex `{}` has gamma = 0; use natural", v.id),
                }),
                _ => {}
            }
        }
        let mut seen_e: HashMap<&str, ()> = HashMap::new();
        for e in &self.edges {
            if seen_e.insert(e.id.0.as_str(), ()).is_some() || seen.contains_key(e.id.0.as_str()) {
                report.push(Violation {
                    code: "DuplicateId",
                    message: format!("duplicate edge id `{}`", e.id),
                });
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                report.push(Violation {
                    code: "NonpositiveLength",
                    message: format!("edge `{}` has length {}", e.id, e.length),
                });
            }
            for v in [&e.from, &e.to] {
                if !self.vertex_index.contains_key(v) {
                    report.push(Violation {
                        code: "DanglingEndpoint",
                        message: format!("edge `{}` references missing vertex `{}`", e.id, v),
                    });
                }
            }
        }
        for v in &self.vertices {
            if self.degree(&v.id) == 0 {
                report.push(Violation {
                    code: "IsolatedVertex",
                    message: format!("vertex `{}` is isolated", v.id),
                });
            }
        }
        report
    }

    /// Splits edge `e` at distance `s` from its source endpoint by a fresh
    /// degree-2 natural vertex. The spectrum is unchanged.
    pub fn insert_dummy_vertex(&self, e: &EdgeId, s: f64) -> Result<MetricGraph, GraphError> {
        let edge = self.edge(e)?.clone();
        if !(s > 0.0 && s < edge.length) {
            return Err(GraphError::BadSplitPoint {
                edge: e.clone(),
                s,
                length: edge.length,
            });
        }
        let dummy = self.fresh_vertex_id(&format!("{}+", edge.from.0));
        let mut vertices = self.vertices.clone();
        vertices.push(Vertex {
            id: dummy.clone(),
            condition: VertexCondition::Natural,
        });
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        for old in &self.edges {
            if old.id == *e {
                edges.push(Edge {
                    id: self.fresh_edge_id_among(&format!("{}a", e.0), &edges),
                    from: edge.from.clone(),
                    to: dummy.clone(),
                    length: s,
                });
                edges.push(Edge {
                    id: self.fresh_edge_id_among(&format!("{}b", e.0), &edges),
                    from: dummy.clone(),
                    to: edge.to.clone(),
                    length: edge.length - s,
                });
            } else {
                edges.push(old.clone());
            }
        }
        MetricGraph::new(vertices, edges)
    }

    /// Merges the two edges meeting at a natural degree-2 vertex, removing
    /// the vertex. Rejected if the vertex is the only vertex of a loop (a
    /// vertexless cycle has no representation) or conditions do not allow it.
    pub fn suppress_degree_two(&self, v: &VertexId) -> Result<MetricGraph, GraphError> {
        let vertex = self.vertex(v)?;
        if !vertex.condition.is_natural() {
            return Err(GraphError::NotSuppressible(
                v.clone(),
                "condition is not natural".into(),
            ));
        }
        let ends = self.incident_ends(v);
        if ends.len() != 2 {
            return Err(GraphError::NotSuppressible(
                v.clone(),
                format!("degree is {}", ends.len()),
            ));
        }
        if ends[0].edge == ends[1].edge {
            return Err(GraphError::NotSuppressible(
                v.clone(),
                "lone vertex of a loop".into(),
            ));
        }
        let (ea, eb) = (&self.edges[ends[0].edge], &self.edges[ends[1].edge]);
        // Walk ea away from v, then eb away from v: merged edge runs from
        // the far end of ea to the far end of eb.
        let far_a = ea.endpoint(ends[0].end.opposite()).clone();
        let far_b = eb.endpoint(ends[1].end.opposite()).clone();
        let merged = Edge {
            id: ea.id.clone(),
            from: far_a,
            to: far_b,
            length: ea.length + eb.length,
        };
        let vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .filter(|w| w.id != *v)
            .cloned()
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len() - 1);
        for (i, old) in self.edges.iter().enumerate() {
            if i == ends[0].edge {
                edges.push(merged.clone());
            } else if i != ends[1].edge {
                edges.push(old.clone());
            }
        }
        MetricGraph::new(vertices, edges)
    }

    /// A vertex id not used by any current vertex, derived from `base`.
    pub fn fresh_vertex_id(&self, base: &str) -> VertexId {
        if !self.vertex_index.contains_key(&VertexId(base.to_owned())) {
            return VertexId(base.to_owned());
        }
        for n in 1.. {
            let candidate = VertexId(format!("{base}{n}"));
            if !self.vertex_index.contains_key(&candidate) {
                return candidate;
            }
        }
        unreachable!()
    }

    /// An edge id not used by any current edge nor any in `extra`.
    fn fresh_edge_id_among(&self, base: &str, extra: &[Edge]) -> EdgeId {
        let taken = |id: &EdgeId| {
            self.edge_index.contains_key(id) || extra.iter().any(|e| e.id == *id)
        };
        if !taken(&EdgeId(base.to_owned())) {
            return EdgeId(base.to_owned());
        }
        for n in 1.. {
            let candidate = EdgeId(format!("{base}{n}"));
            if !taken(&candidate) {
                return candidate;
            }
        }
        unreachable!()
    }

    pub fn fresh_edge_id(&self, base: &str) -> EdgeId {
        self.fresh_edge_id_among(base, &[])
    }

    /// Parses the JSON graph format, rejecting anything that fails
    /// validation.
    pub fn from_json(text: &str) -> Result<MetricGraph, String> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<Vertex>,
            edges: Vec<Edge>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| e.to_string())?;
        MetricGraph::new(raw.vertices, raw.edges).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Raw<'a> {
            vertices: &'a [Vertex],
            edges: &'a [Edge],
        }
        serde_json::to_string_pretty(&Raw {
            vertices: &self.vertices,
            edges: &self.edges,
        })
        .expect("graph serialization cannot fail")
    }
}

pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(length: f64) -> MetricGraph {
        MetricGraph::from_parts(
            [
                ("a", VertexCondition::Natural),
                ("b", VertexCondition::Natural),
            ],
            [("e", "a", "b", length)],
        )
        .unwrap()
    }

    #[test]
    fn smallest_valid_graph() {
        let g = path(1.0);
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.total_length(), 1.0);
        assert!(g.validate_report().is_empty());
    }

    #[test]
    fn loop_graph_has_degree_two() {
        let g = MetricGraph::from_parts(
            [("v", VertexCondition::Natural)],
            [("l", "v", "v", 3.0)],
        )
        .unwrap();
        assert_eq!(g.degree(&"v".into()), 2);
        assert_eq!(g.stats().num_components, 1);
    }

    #[test]
    fn zero_length_edge_rejected() {
        let err = MetricGraph::from_parts(
            [
                ("a", VertexCondition::Natural),
                ("b", VertexCondition::Natural),
            ],
            [("e", "a", "b", 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::NonpositiveLength(..)));
    }

    #[test]
    fn stats_of_disjoint_loops() {
        let g = MetricGraph::from_parts(
            [
                ("u", VertexCondition::Natural),
                ("v", VertexCondition::Natural),
            ],
            [("l1", "u", "u", 1.0), ("l2", "v", "v", 2.0)],
        )
        .unwrap();
        let s = g.stats();
        assert_eq!(s.total_length, 3.0);
        assert_eq!(s.num_components, 2);
    }

    #[test]
    fn figure_eight_stats() {
        let g = MetricGraph::from_parts(
            [("c", VertexCondition::Natural)],
            [("l1", "c", "c", 1.0), ("l2", "c", "c", 2.0)],
        )
        .unwrap();
        let s = g.stats();
        assert_eq!(s.total_length, 3.0);
        assert_eq!(s.num_components, 1);
        assert_eq!(s.degree_map[0].1, 4);
    }

    #[test]
    fn dummy_vertex_roundtrip_structure() {
        let g = path(2.0);
        let split = g.insert_dummy_vertex(&"e".into(), 1.0).unwrap();
        assert_eq!(split.vertices().len(), 3);
        assert_eq!(split.edges().len(), 2);
        assert!((split.total_length() - 2.0).abs() < 1e-15);

        let dummy = split.vertices()[2].id.clone();
        let merged = split.suppress_degree_two(&dummy).unwrap();
        assert_eq!(merged.edges().len(), 1);
        assert!((merged.edges()[0].length - 2.0).abs() < 1e-15);
    }

    #[test]
    fn split_loop_gives_two_parallel_edges() {
        let g = MetricGraph::from_parts(
            [("v", VertexCondition::Natural)],
            [("l", "v", "v", 3.0)],
        )
        .unwrap();
        let split = g.insert_dummy_vertex(&"l".into(), 1.0).unwrap();
        assert_eq!(split.edges().len(), 2);
        let lengths: Vec<f64> = split.edges().iter().map(|e| e.length).collect();
        assert_eq!(lengths, vec![1.0, 2.0]);
        // Both edges now run between the two vertices: a 2-pumpkin.
        assert!(!split.edges()[0].is_loop());
    }

    #[test]
    fn split_at_full_length_rejected() {
        let g = path(2.0);
        let err = g.insert_dummy_vertex(&"e".into(), 2.0).unwrap_err();
        assert!(matches!(err, GraphError::BadSplitPoint { .. }));
    }

    #[test]
    fn suppress_rejects_delta_vertex() {
        let g = MetricGraph::from_parts(
            [
                ("a", VertexCondition::Natural),
                ("m", VertexCondition::Delta { gamma: 1.5 }),
                ("b", VertexCondition::Natural),
            ],
            [("e1", "a", "m", 1.0), ("e2", "m", "b", 1.0)],
        )
        .unwrap();
        let err = g.suppress_degree_two(&"m".into()).unwrap_err();
        assert!(matches!(err, GraphError::NotSuppressible(..)));
    }

    #[test]
    fn suppress_rejects_lone_loop_vertex() {
        let g = MetricGraph::from_parts(
            [("v", VertexCondition::Natural)],
            [("l", "v", "v", 1.0)],
        )
        .unwrap();
        let err = g.suppress_degree_two(&"v".into()).unwrap_err();
        assert!(matches!(err, GraphError::NotSuppressible(..)));
    }

    #[test]
    fn validate_reports_zero_gamma() {
        let g = MetricGraph::new_unchecked(
            vec![
                Vertex {
                    id: "a".into(),
                    condition: VertexCondition::Delta { gamma: 0.0 },
                },
                Vertex {
                    id: "b".into(),
                    condition: VertexCondition::Natural,
                },
            ],
            vec![Edge {
                id: "e".into(),
                from: "a".into(),
                to: "b".into(),
                length: 1.0,
            }],
        )
        .unwrap();
        let report = g.validate_report();
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].code, "ZeroGammaDelta");
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"vertices":[{"id":"v1","condition":"natural"},
            {"id":"v2","condition":{"delta":-2.5}},
            {"id":"v3","condition":"dirichlet"}],
            "edges":[{"id":"e1","from":"v1","to":"v2","length":1.0},
                     {"id":"e2","from":"v2","to":"v3","length":0.5}]}"#;
        let g = MetricGraph::from_json(text).unwrap();
        assert_eq!(
            g.vertex(&"v2".into()).unwrap().condition,
            VertexCondition::Delta { gamma: -2.5 }
        );
        let again = MetricGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn gluing_arithmetic_for_conditions() {
        use VertexCondition::*;
        assert_eq!(Natural.glued_with(&Delta { gamma: 2.0 }), Delta { gamma: 2.0 });
        assert_eq!(
            Delta { gamma: 2.0 }.glued_with(&Delta { gamma: -2.0 }),
            Natural
        );
        assert_eq!(Dirichlet.glued_with(&Delta { gamma: 5.0 }), Dirichlet);
    }
}
