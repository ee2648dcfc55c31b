//! Combinatorial and metric graph analysis: bridges, the doubly connected
//! part, girth and circumference, builders for the named graph families,
//! pumpkin-chain recognition and the reduction of an arbitrary graph to a
//! pumpkin chain with the same spectral gap.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    kahan_sum, Edge, EdgeId, End, MetricGraph, UnionFind, Vertex, VertexCondition, VertexId,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("circumference enumeration supports at most {max} edges, graph has {found}")]
    TooManyEdgesForCircumference { max: usize, found: usize },
    #[error("bad graph family spec: {0}")]
    BadSpec(String),
    #[error("not a pumpkin chain: {0}")]
    NotAPumpkinChain(String),
    #[error("not a locally equilateral pumpkin chain")]
    NotLocallyEquilateral,
    #[error("spectral gap is zero; the reduction needs mu != 0")]
    ZeroMu,
    #[error("graph is disconnected")]
    Disconnected,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Spectral(#[from] Box<crate::spectral::SpectralError>),
    #[error(transparent)]
    Surgery(#[from] Box<crate::surgery::SurgeryError>),
}

/// Classical bridge set of the underlying multigraph, as edge positions in
/// insertion order. Loops are never bridges, nor is either edge of a
/// parallel pair.
pub fn bridges(g: &MetricGraph) -> Vec<usize> {
    let n = g.vertices().len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbour, edge)
    for (ei, e) in g.edges().iter().enumerate() {
        let a = g.vertex_position(&e.from).unwrap();
        let b = g.vertex_position(&e.to).unwrap();
        if a == b {
            continue; // a loop cannot disconnect anything
        }
        adj[a].push((b, ei));
        adj[b].push((a, ei));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut out = Vec::new();
    // Iterative DFS with low-links. Only the one edge used to enter a vertex
    // is excluded from low updates, so a parallel companion still provides a
    // back edge and neither of a parallel pair is ever reported.
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Frames of (vertex, entering edge index, next adjacency slot).
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(top) = stack.last_mut() {
            let (v, via) = (top.0, top.1);
            if top.2 < adj[v].len() {
                let (w, ei) = adj[v][top.2];
                top.2 += 1;
                if ei == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, ei, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        out.push(via);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The doubly connected part of a graph: the union of all points lying on a
/// closed non-self-intersecting path, i.e. what is left after deleting every
/// bridge and then any isolated vertices.
#[derive(Debug, Clone, Serialize)]
pub struct DoublyConnectedPart {
    /// Connected components as (edge ids, total length), in first-seen order.
    pub components: Vec<(Vec<EdgeId>, f64)>,
    /// Total length of the doubly connected part.
    pub total_length: f64,
    /// Ids of the deleted bridges.
    pub bridges: Vec<EdgeId>,
}

impl DoublyConnectedPart {
    /// Length of the largest component, 0 for trees.
    pub fn largest_component_length(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, l)| *l)
            .fold(0.0, f64::max)
    }
}

pub fn doubly_connected_part(g: &MetricGraph) -> DoublyConnectedPart {
    let bridge_set = bridges(g);
    let is_bridge = |ei: usize| bridge_set.binary_search(&ei).is_ok();
    let mut uf = UnionFind::new(g.vertices().len());
    for (ei, e) in g.edges().iter().enumerate() {
        if !is_bridge(ei) {
            uf.union(
                g.vertex_position(&e.from).unwrap(),
                g.vertex_position(&e.to).unwrap(),
            );
        }
    }
    let mut groups: Vec<(usize, Vec<EdgeId>, f64)> = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        if is_bridge(ei) {
            continue;
        }
        let root = uf.find(g.vertex_position(&e.from).unwrap());
        match groups.iter_mut().find(|(r, _, _)| *r == root) {
            Some((_, ids, len)) => {
                ids.push(e.id.clone());
                *len += e.length;
            }
            None => groups.push((root, vec![e.id.clone()], e.length)),
        }
    }
    let components: Vec<(Vec<EdgeId>, f64)> =
        groups.into_iter().map(|(_, ids, len)| (ids, len)).collect();
    let total_length = kahan_sum(components.iter().map(|(_, l)| *l));
    DoublyConnectedPart {
        components,
        total_length,
        bridges: bridge_set.iter().map(|&ei| g.edges()[ei].id.clone()).collect(),
    }
}

/// Shortest cycle length: min over edges of `|e|` plus the shortest path
/// between the endpoints of `e` avoiding `e` itself. Loops contribute their
/// own length. Returns 0 for forests.
pub fn girth(g: &MetricGraph) -> f64 {
    let n = g.vertices().len();
    let mut best = f64::INFINITY;
    for (ei, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            best = best.min(e.length);
            continue;
        }
        let a = g.vertex_position(&e.from).unwrap();
        let b = g.vertex_position(&e.to).unwrap();
        let d = shortest_path_avoiding(g, a, b, ei, n);
        if d.is_finite() {
            best = best.min(d + e.length);
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

fn shortest_path_avoiding(g: &MetricGraph, from: usize, to: usize, skip: usize, n: usize) -> f64 {
    // Dijkstra on a handful of vertices; linear scans beat a heap here.
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[from] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut du = f64::INFINITY;
        for i in 0..n {
            if !done[i] && dist[i] < du {
                du = dist[i];
                u = i;
            }
        }
        if u == usize::MAX || u == to {
            return dist[to];
        }
        done[u] = true;
        for (ei, e) in g.edges().iter().enumerate() {
            if ei == skip || e.is_loop() {
                continue;
            }
            let a = g.vertex_position(&e.from).unwrap();
            let b = g.vertex_position(&e.to).unwrap();
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if du + e.length < dist[v] {
                dist[v] = du + e.length;
            }
        }
    }
}

/// Maximum cap on edges for the exhaustive circumference enumeration.
pub const CIRCUMFERENCE_EDGE_CAP: usize = 20;

/// Longest closed trail length: the maximum total length over connected
/// sub-multigraphs in which every vertex has even degree (each such subgraph
/// carries an Eulerian circuit). Returns 0 for forests.
///
/// Enumerates the cycle space, so the graph may have at most
/// [`CIRCUMFERENCE_EDGE_CAP`] edges.
pub fn circumference(g: &MetricGraph) -> Result<f64, TopologyError> {
    let m = g.edges().len();
    if m > CIRCUMFERENCE_EDGE_CAP {
        return Err(TopologyError::TooManyEdgesForCircumference {
            max: CIRCUMFERENCE_EDGE_CAP,
            found: m,
        });
    }
    // Fundamental cycles over a spanning forest generate every even subgraph.
    let n = g.vertices().len();
    let mut uf = UnionFind::new(n);
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (vertex, edge)
    let mut order: Vec<usize> = Vec::new();
    let mut tree_edge = vec![false; m];
    // Build a BFS forest.
    let mut visited = vec![false; n];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for (ei, e) in g.edges().iter().enumerate() {
                if e.is_loop() {
                    continue;
                }
                let a = g.vertex_position(&e.from).unwrap();
                let b = g.vertex_position(&e.to).unwrap();
                let v = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !visited[v] {
                    visited[v] = true;
                    parent[v] = Some((u, ei));
                    tree_edge[ei] = true;
                    uf.union(u, v);
                    queue.push_back(v);
                }
            }
        }
    }
    let depth_of = |mut v: usize| {
        let mut d = 0usize;
        while let Some((p, _)) = parent[v] {
            v = p;
            d += 1;
        }
        d
    };
    let mut basis: Vec<u32> = Vec::new();
    for (ei, e) in g.edges().iter().enumerate() {
        if tree_edge[ei] {
            continue;
        }
        let mut mask = 1u32 << ei;
        if !e.is_loop() {
            // XOR in the tree path between the endpoints.
            let mut a = g.vertex_position(&e.from).unwrap();
            let mut b = g.vertex_position(&e.to).unwrap();
            let (mut da, mut db) = (depth_of(a), depth_of(b));
            while da > db {
                let (p, pe) = parent[a].unwrap();
                mask ^= 1 << pe;
                a = p;
                da -= 1;
            }
            while db > da {
                let (p, pe) = parent[b].unwrap();
                mask ^= 1 << pe;
                b = p;
                db -= 1;
            }
            while a != b {
                let (pa, ea) = parent[a].unwrap();
                let (pb, eb) = parent[b].unwrap();
                mask ^= 1 << ea;
                mask ^= 1 << eb;
                a = pa;
                b = pb;
            }
        }
        basis.push(mask);
    }
    let lengths: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
    let ends: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                g.vertex_position(&e.from).unwrap(),
                g.vertex_position(&e.to).unwrap(),
            )
        })
        .collect();
    let mut best = 0.0f64;
    for combo in 1u64..(1u64 << basis.len()) {
        let mut mask = 0u32;
        for (i, cycle) in basis.iter().enumerate() {
            if combo >> i & 1 == 1 {
                mask ^= cycle;
            }
        }
        if mask == 0 || !edge_subgraph_connected(mask, &ends, n) {
            continue;
        }
        let mut total = 0.0;
        for (ei, len) in lengths.iter().enumerate() {
            if mask >> ei & 1 == 1 {
                total += len;
            }
        }
        best = best.max(total);
    }
    Ok(best)
}

fn edge_subgraph_connected(mask: u32, ends: &[(usize, usize)], n: usize) -> bool {
    let mut uf = UnionFind::new(n);
    let mut some_vertex = None;
    for (ei, &(a, b)) in ends.iter().enumerate() {
        if mask >> ei & 1 == 1 {
            uf.union(a, b);
            some_vertex = Some(a);
        }
    }
    let root = match some_vertex {
        Some(v) => uf.find(v),
        None => return false,
    };
    for (ei, &(a, b)) in ends.iter().enumerate() {
        if mask >> ei & 1 == 1 && (uf.find(a) != root || uf.find(b) != root) {
            return false;
        }
    }
    true
}

/// Description of an `[m_1, ..., m_n]`-pumpkin chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpkinChainSpec {
    /// Edges per constituent pumpkin, in order from `v_-` to `v_+`.
    pub multiplicities: Vec<usize>,
    /// Total length of each constituent pumpkin.
    pub pumpkin_lengths: Vec<f64>,
    /// Whether every constituent pumpkin has equal edge lengths.
    pub locally_equilateral: bool,
    /// Conditions at the terminal vertices `v_-` and `v_+`.
    #[serde(skip)]
    pub terminal_conditions: (VertexCondition, VertexCondition),
}

impl PumpkinChainSpec {
    pub fn equilateral(multiplicities: Vec<usize>, pumpkin_lengths: Vec<f64>) -> Self {
        PumpkinChainSpec {
            multiplicities,
            pumpkin_lengths,
            locally_equilateral: true,
            terminal_conditions: (VertexCondition::Natural, VertexCondition::Natural),
        }
    }

    pub fn total_length(&self) -> f64 {
        kahan_sum(self.pumpkin_lengths.iter().copied())
    }
}

/// Specification of a named graph family.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedGraph {
    /// Two vertices joined by one edge of the given length.
    Path { length: f64 },
    /// A single loop of the given length.
    Loop { length: f64 },
    /// Pendant edges of the given lengths around one centre.
    Star { lengths: Vec<f64> },
    /// Loops of the given lengths at one centre.
    Flower { lengths: Vec<f64> },
    /// Loop of length `loop_len` plus a tail, total length `total`.
    Tadpole { total: f64, loop_len: f64 },
    /// Loops of lengths `l1`, `l2` joined by a handle, total length `total`.
    Dumbbell { l1: f64, l2: f64, total: f64 },
    /// Two vertices joined by parallel edges of the given lengths.
    Pumpkin { lengths: Vec<f64> },
    /// `[1, m, 1]`-chain with stick lengths `l1`, `l2` and an equilateral
    /// central pumpkin filling up the total length.
    PumpkinOnStick { l1: f64, m: usize, l2: f64, total: f64 },
    /// Locally equilateral `[m, 1, m]`-chain with outer pumpkins of total
    /// lengths `l1` and `l2`.
    PumpkinDumbbell { l1: f64, l2: f64, m: usize, total: f64 },
    /// General locally equilateral pumpkin chain.
    Chain(PumpkinChainSpec),
}

/// Builds the requested family with natural conditions everywhere (chains
/// may override the terminal conditions). Zero-length parts are elided and
/// their incident vertices merged, never stored as zero-length edges.
pub fn build_named(spec: &NamedGraph) -> Result<MetricGraph, TopologyError> {
    let bad = |msg: String| Err(TopologyError::BadSpec(msg));
    match spec {
        NamedGraph::Path { length } => {
            if !(*length > 0.0) {
                return bad(format!("path length {length} must be positive"));
            }
            Ok(MetricGraph::from_parts(
                [
                    ("v0", VertexCondition::Natural),
                    ("v1", VertexCondition::Natural),
                ],
                [("e0", "v0", "v1", *length)],
            )?)
        }
        NamedGraph::Loop { length } => {
            if !(*length > 0.0) {
                return bad(format!("loop length {length} must be positive"));
            }
            Ok(MetricGraph::from_parts(
                [("v0", VertexCondition::Natural)],
                [("e0", "v0", "v0", *length)],
            )?)
        }
        NamedGraph::Star { lengths } => {
            if lengths.is_empty() || lengths.iter().any(|l| !(*l > 0.0)) {
                return bad("star needs positive arm lengths".into());
            }
            let mut vertices = vec![Vertex {
                id: "c".into(),
                condition: VertexCondition::Natural,
            }];
            let mut edges = Vec::new();
            for (i, l) in lengths.iter().enumerate() {
                vertices.push(Vertex {
                    id: format!("t{i}").as_str().into(),
                    condition: VertexCondition::Natural,
                });
                edges.push(Edge {
                    id: format!("e{i}").as_str().into(),
                    from: "c".into(),
                    to: format!("t{i}").as_str().into(),
                    length: *l,
                });
            }
            Ok(MetricGraph::new(vertices, edges)?)
        }
        NamedGraph::Flower { lengths } => {
            if lengths.is_empty() || lengths.iter().any(|l| !(*l > 0.0)) {
                return bad("flower needs positive loop lengths".into());
            }
            let vertices = vec![Vertex {
                id: "c".into(),
                condition: VertexCondition::Natural,
            }];
            let edges = lengths
                .iter()
                .enumerate()
                .map(|(i, l)| Edge {
                    id: format!("e{i}").as_str().into(),
                    from: "c".into(),
                    to: "c".into(),
                    length: *l,
                })
                .collect();
            Ok(MetricGraph::new(vertices, edges)?)
        }
        NamedGraph::Tadpole { total, loop_len } => {
            if !(*total > 0.0) || *loop_len < 0.0 || *loop_len > *total + 1e-15 {
                return bad(format!("tadpole needs 0 <= V <= L, got V={loop_len} L={total}"));
            }
            build_named(&NamedGraph::Dumbbell {
                l1: *loop_len,
                l2: 0.0,
                total: *total,
            })
        }
        NamedGraph::Dumbbell { l1, l2, total } => {
            if *l1 < 0.0 || *l2 < 0.0 || l1 + l2 > total + 1e-12 || !(*total > 0.0) {
                return bad(format!(
                    "dumbbell needs l1, l2 >= 0 and l1 + l2 <= L, got {l1}, {l2}, L={total}"
                ));
            }
            let handle = (total - l1 - l2).max(0.0);
            let mut vertices: Vec<Vertex> = Vec::new();
            let mut edges: Vec<Edge> = Vec::new();
            let mut push_v = |vertices: &mut Vec<Vertex>, id: &str| {
                vertices.push(Vertex {
                    id: id.into(),
                    condition: VertexCondition::Natural,
                });
            };
            push_v(&mut vertices, "v1");
            let right = if handle > 0.0 {
                push_v(&mut vertices, "v2");
                "v2"
            } else {
                "v1"
            };
            if *l1 > 0.0 {
                edges.push(Edge {
                    id: "loop1".into(),
                    from: "v1".into(),
                    to: "v1".into(),
                    length: *l1,
                });
            }
            if handle > 0.0 {
                edges.push(Edge {
                    id: "handle".into(),
                    from: "v1".into(),
                    to: "v2".into(),
                    length: handle,
                });
            }
            if *l2 > 0.0 {
                edges.push(Edge {
                    id: "loop2".into(),
                    from: right.into(),
                    to: right.into(),
                    length: *l2,
                });
            }
            Ok(MetricGraph::new(vertices, edges)?)
        }
        NamedGraph::Pumpkin { lengths } => {
            if lengths.is_empty() || lengths.iter().any(|l| !(*l > 0.0)) {
                return bad("pumpkin needs positive edge lengths".into());
            }
            let vertices = vec![
                Vertex {
                    id: "v1".into(),
                    condition: VertexCondition::Natural,
                },
                Vertex {
                    id: "v2".into(),
                    condition: VertexCondition::Natural,
                },
            ];
            let edges = lengths
                .iter()
                .enumerate()
                .map(|(i, l)| Edge {
                    id: format!("e{i}").as_str().into(),
                    from: "v1".into(),
                    to: "v2".into(),
                    length: *l,
                })
                .collect();
            Ok(MetricGraph::new(vertices, edges)?)
        }
        NamedGraph::PumpkinOnStick { l1, m, l2, total } => {
            if *m < 1 {
                return bad("pumpkin-on-a-stick needs m >= 1".into());
            }
            if *l1 < 0.0 || *l2 < 0.0 || l1 + l2 > total + 1e-12 || !(*total > 0.0) {
                return bad(format!(
                    "pumpkin-on-a-stick needs l1, l2 >= 0, l1 + l2 <= L, got {l1}, {l2}, L={total}"
                ));
            }
            let pumpkin = (total - l1 - l2).max(0.0);
            let mut parts = Vec::new();
            if *l1 > 0.0 {
                parts.push((1usize, *l1));
            }
            if pumpkin > 0.0 {
                parts.push((*m, pumpkin));
            }
            if *l2 > 0.0 {
                parts.push((1usize, *l2));
            }
            if parts.is_empty() {
                return bad("pumpkin-on-a-stick has no positive part".into());
            }
            build_chain(&PumpkinChainSpec::equilateral(
                parts.iter().map(|(m, _)| *m).collect(),
                parts.iter().map(|(_, l)| *l).collect(),
            ))
        }
        NamedGraph::PumpkinDumbbell { l1, l2, m, total } => {
            if *m < 1 {
                return bad("pumpkin dumbbell needs m >= 1".into());
            }
            if *l1 < 0.0 || *l2 < 0.0 || l1 + l2 > total + 1e-12 || !(*total > 0.0) {
                return bad(format!(
                    "pumpkin dumbbell needs l1, l2 >= 0, l1 + l2 <= L, got {l1}, {l2}, L={total}"
                ));
            }
            let handle = (total - l1 - l2).max(0.0);
            let mut parts = Vec::new();
            if *l1 > 0.0 {
                parts.push((*m, *l1));
            }
            if handle > 0.0 {
                parts.push((1usize, handle));
            }
            if *l2 > 0.0 {
                parts.push((*m, *l2));
            }
            if parts.is_empty() {
                return bad("pumpkin dumbbell has no positive part".into());
            }
            build_chain(&PumpkinChainSpec::equilateral(
                parts.iter().map(|(m, _)| *m).collect(),
                parts.iter().map(|(_, l)| *l).collect(),
            ))
        }
        NamedGraph::Chain(spec) => build_chain(spec),
    }
}

/// Builds a locally equilateral pumpkin chain from its spec.
pub fn build_chain(spec: &PumpkinChainSpec) -> Result<MetricGraph, TopologyError> {
    let n = spec.multiplicities.len();
    if n == 0 || spec.pumpkin_lengths.len() != n {
        return Err(TopologyError::BadSpec(
            "chain needs matching multiplicity and length lists".into(),
        ));
    }
    if spec.multiplicities.iter().any(|&m| m < 1) {
        return Err(TopologyError::BadSpec("chain multiplicities must be >= 1".into()));
    }
    if spec.pumpkin_lengths.iter().any(|l| !(*l > 0.0)) {
        return Err(TopologyError::BadSpec("chain pumpkin lengths must be positive".into()));
    }
    let mut vertices: Vec<Vertex> = (0..=n)
        .map(|i| Vertex {
            id: format!("v{i}").as_str().into(),
            condition: VertexCondition::Natural,
        })
        .collect();
    vertices[0].condition = spec.terminal_conditions.0;
    vertices[n].condition = spec.terminal_conditions.1;
    let mut edges = Vec::new();
    for (k, (&m, &len)) in spec
        .multiplicities
        .iter()
        .zip(&spec.pumpkin_lengths)
        .enumerate()
    {
        for j in 0..m {
            edges.push(Edge {
                id: format!("p{k}e{j}").as_str().into(),
                from: format!("v{k}").as_str().into(),
                to: format!("v{}", k + 1).as_str().into(),
                length: len / m as f64,
            });
        }
    }
    Ok(MetricGraph::new(vertices, edges)?)
}
