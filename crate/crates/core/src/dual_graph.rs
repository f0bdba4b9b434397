//! Sphere systems as graphs of groups with trivial edge groups.
//!
//! A sphere system `S` in `M = #_n S^2 x S^1` has a dual graph: one vertex per
//! complementary piece, one geometric edge per sphere. The vertex group of a
//! piece is free, and since edge groups are trivial only its rank matters.
//! The fundamental group of the graph of groups then has rank
//!
//! ```text
//! rank = sum_v rank(G_v) + (E - V + 1)
//! ```
//!
//! A system is *simple* when every piece is simply connected (all vertex ranks
//! zero) and *reduced* when in addition there is a single piece. A sphere is
//! non-separating in `M` exactly when its edge is not a bridge of the graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One directed edge of a Serre graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dart {
    pub id: String,
    pub origin: usize,
    pub terminus: usize,
    /// Index of the reverse dart `e-bar`.
    pub reverse: usize,
}

/// A violated Serre-graph axiom, naming the offending dart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fault {
    InvolutionFixedPoint { edge: String },
    NotAnInvolution { edge: String },
    EndpointMismatch { edge: String },
    DanglingReference { edge: String },
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::InvolutionFixedPoint { edge } => write!(f, "involution fixed point at {edge}"),
            Fault::NotAnInvolution { edge } => write!(f, "reverse of reverse is not {edge}"),
            Fault::EndpointMismatch { edge } => write!(f, "endpoint mismatch at {edge}"),
            Fault::DanglingReference { edge } => {
                write!(f, "{edge} references a missing vertex or dart")
            }
        }
    }
}

/// A graph in Serre's sense: darts with a fixed-point-free involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerreGraph {
    vertices: Vec<String>,
    darts: Vec<Dart>,
}

/// A geometric (undirected) edge, seen through its positively oriented dart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeoEdge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

impl GeoEdge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

impl SerreGraph {
    /// Raw constructor; nothing is checked. See [`SerreGraph::validate`].
    pub fn from_darts(vertices: Vec<String>, darts: Vec<Dart>) -> Self {
        SerreGraph { vertices, darts }
    }

    /// Build from geometric edges `(id, from, to)`. Edge `k` becomes darts
    /// `2k` (named `id`) and `2k + 1` (named `id'`).
    pub fn from_edges(vertices: Vec<String>, edges: &[(String, usize, usize)]) -> Self {
        let mut darts = Vec::with_capacity(2 * edges.len());
        for (k, (id, from, to)) in edges.iter().enumerate() {
            darts.push(Dart { id: id.clone(), origin: *from, terminus: *to, reverse: 2 * k + 1 });
            darts.push(Dart { id: format!("{id}'"), origin: *to, terminus: *from, reverse: 2 * k });
        }
        SerreGraph { vertices, darts }
    }

    /// Check `e-bar != e`, `e-bar-bar = e` and `o(e-bar) = t(e)` for every dart.
    pub fn validate(&self) -> Result<(), Vec<Fault>> {
        let mut faults = Vec::new();
        let nv = self.vertices.len();
        for (i, d) in self.darts.iter().enumerate() {
            let edge = d.id.clone();
            if d.origin >= nv || d.terminus >= nv || d.reverse >= self.darts.len() {
                faults.push(Fault::DanglingReference { edge });
                continue;
            }
            if d.reverse == i {
                faults.push(Fault::InvolutionFixedPoint { edge });
                continue;
            }
            let r = &self.darts[d.reverse];
            if r.reverse != i {
                faults.push(Fault::NotAnInvolution { edge: edge.clone() });
            }
            if r.origin != d.terminus {
                faults.push(Fault::EndpointMismatch { edge });
            }
        }
        if faults.is_empty() {
            Ok(())
        } else {
            Err(faults)
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    /// One entry per dart pair, taking the lower-indexed dart as positive.
    pub fn geometric_edges(&self) -> Vec<GeoEdge> {
        self.darts
            .iter()
            .enumerate()
            .filter(|(i, d)| *i < d.reverse)
            .map(|(_, d)| GeoEdge { id: d.id.clone(), from: d.origin, to: d.terminus })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.darts.len() / 2
    }

    /// Number of darts leaving `v`; a loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        self.darts.iter().filter(|d| d.origin == v).count()
    }

    pub fn is_connected(&self) -> bool {
        connected_without(self.vertices.len(), &self.edge_pairs(), None)
    }

    /// Geometric edges whose removal disconnects the graph.
    pub fn bridges(&self) -> Vec<String> {
        let pairs = self.edge_pairs();
        self.geometric_edges()
            .iter()
            .enumerate()
            .filter(|(k, e)| !e.is_loop() && !connected_without(self.vertices.len(), &pairs, Some(*k)))
            .map(|(_, e)| e.id.clone())
            .collect()
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.geometric_edges().iter().map(|e| (e.from, e.to)).collect()
    }

    pub fn betti_number(&self) -> usize {
        (self.edge_count() + 1).saturating_sub(self.vertex_count())
    }
}

pub(crate) fn connected_without(nv: usize, edges: &[(usize, usize)], skip: Option<usize>) -> bool {
    if nv == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); nv];
    for (k, &(a, b)) in edges.iter().enumerate() {
        if Some(k) != skip {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == nv
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualGraphError {
    #[error("invalid Serre graph: {}", faults.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGraph { faults: Vec<Fault> },
    #[error("graph of groups is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("{0}")]
    Malformed(String),
    #[error("rank mismatch: graph of groups has rank {actual}, expected {expected}")]
    RankMismatch { expected: usize, actual: usize },
    #[error("sphere system is not simple (vertex {vertex} has positive rank); it contains no reduced subsystem")]
    NotSimple { vertex: String },
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("hypothesis violated at vertex {vertex}: {condition}")]
    Hypothesis { vertex: String, condition: String },
}

impl DualGraphError {
    /// Whether this is a failed mathematical precondition rather than bad input.
    pub fn is_hypothesis(&self) -> bool {
        matches!(self, DualGraphError::NotSimple { .. } | DualGraphError::Hypothesis { .. })
    }
}

/// Sentence used when a terminal vertex carries the trivial group.
pub const TERMINAL_VERTEX_CONDITION: &str = "no terminal vertex with trivial vertex group";

/// Stand-in for "no two elementary splittings are conjugate": two spheres
/// bounding a 2-punctured 3-sphere would be parallel.
pub const PARALLEL_SPHERES_CONDITION: &str = "no two elementary splittings are conjugate \
     (checked by proxy: no valence-2 vertex with trivial vertex group between two distinct edges)";

/// Graph of groups with free vertex groups, recorded by rank, and trivial
/// edge groups. Always connected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct GraphOfGroups {
    graph: SerreGraph,
    ranks: Vec<usize>,
}

impl GraphOfGroups {
    pub fn new(graph: SerreGraph, ranks: Vec<usize>) -> Result<Self, DualGraphError> {
        graph.validate().map_err(|faults| DualGraphError::InvalidGraph { faults })?;
        if graph.vertex_count() == 0 {
            return Err(DualGraphError::Empty);
        }
        if ranks.len() != graph.vertex_count() {
            return Err(DualGraphError::Malformed(format!(
                "{} ranks for {} vertices",
                ranks.len(),
                graph.vertex_count()
            )));
        }
        if !graph.is_connected() {
            return Err(DualGraphError::Disconnected);
        }
        Ok(GraphOfGroups { graph, ranks })
    }

    /// Vertices `v1..`, edges `e1..` in the given order.
    pub fn from_edge_list(ranks: &[usize], edges: &[(usize, usize)]) -> Result<Self, DualGraphError> {
        let vertices = (1..=ranks.len()).map(|i| format!("v{i}")).collect();
        let edges: Vec<_> = edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| (format!("e{}", k + 1), a, b))
            .collect();
        if let Some(bad) = edges.iter().find(|e| e.1 >= ranks.len() || e.2 >= ranks.len()) {
            return Err(DualGraphError::Malformed(format!("{} has an endpoint out of range", bad.0)));
        }
        GraphOfGroups::new(SerreGraph::from_edges(vertices, &edges), ranks.to_vec())
    }

    /// The rose with `n` loops and trivial vertex group: the dual graph of a
    /// reduced system.
    pub fn rose(n: usize) -> Self {
        GraphOfGroups::from_edge_list(&[0], &vec![(0, 0); n]).expect("rose is valid")
    }

    pub fn from_json(s: &str) -> Result<Self, DualGraphError> {
        serde_json::from_str(s).map_err(|e| DualGraphError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn graph(&self) -> &SerreGraph {
        &self.graph
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn vertex_rank(&self, v: usize) -> usize {
        self.ranks[v]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.graph.vertices[v]
    }

    pub fn edges(&self) -> Vec<GeoEdge> {
        self.graph.geometric_edges()
    }

    /// Isomorphism-invariant key; two graphs of groups are isomorphic iff
    /// their keys are equal.
    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_key(&self.ranks, &self.graph.edge_pairs())
    }

    /// Graphviz rendering; vertices are labelled `v (rank r)`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (v, id) in self.graph.vertices.iter().enumerate() {
            out.push_str(&format!("  \"{id}\" [label=\"{id} (rank {})\"];\n", self.ranks[v]));
        }
        for e in self.edges() {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
                self.vertex_id(e.from),
                self.vertex_id(e.to),
                e.id
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Wire format: geometric edges listed once, involution implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: String,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(rename = "loop", default)]
    pub is_loop: bool,
}

impl TryFrom<GraphSpec> for GraphOfGroups {
    type Error = DualGraphError;

    fn try_from(spec: GraphSpec) -> Result<Self, Self::Error> {
        let mut index = BTreeMap::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if index.insert(v.id.as_str(), i).is_some() {
                return Err(DualGraphError::Malformed(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            if !seen.insert(e.id.as_str()) {
                return Err(DualGraphError::Malformed(format!("duplicate edge id {}", e.id)));
            }
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| {
                    DualGraphError::Malformed(format!("edge {} references unknown vertex {id}", e.id))
                })
            };
            let (a, b) = (lookup(&e.from)?, lookup(&e.to)?);
            if (a == b) != e.is_loop {
                return Err(DualGraphError::Malformed(format!(
                    "edge {} has loop={} but endpoints {} and {}",
                    e.id, e.is_loop, e.from, e.to
                )));
            }
            edges.push((e.id.clone(), a, b));
        }
        let vertices = spec.vertices.iter().map(|v| v.id.clone()).collect();
        let ranks = spec.vertices.iter().map(|v| v.rank).collect();
        GraphOfGroups::new(SerreGraph::from_edges(vertices, &edges), ranks)
    }
}

impl From<GraphOfGroups> for GraphSpec {
    fn from(g: GraphOfGroups) -> Self {
        let vertices = g
            .graph
            .vertices
            .iter()
            .zip(&g.ranks)
            .map(|(id, &rank)| VertexSpec { id: id.clone(), rank })
            .collect();
        let edges = g
            .edges()
            .into_iter()
            .map(|e| EdgeSpec {
                id: e.id.clone(),
                from: g.vertex_id(e.from).to_string(),
                to: g.vertex_id(e.to).to_string(),
                is_loop: e.is_loop(),
            })
            .collect();
        GraphSpec { vertices, edges }
    }
}

/// Vertex ranks in canonical order followed by the sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub ranks: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Minimum encoding over all vertex orderings that list vertices by
/// increasing (rank, valence, loop count).
pub fn canonical_key(ranks: &[usize], edges: &[(usize, usize)]) -> CanonicalKey {
    let nv = ranks.len();
    let mut valence = vec![0usize; nv];
    let mut loops = vec![0usize; nv];
    for &(a, b) in edges {
        valence[a] += 1;
        valence[b] += 1;
        if a == b {
            loops[a] += 1;
        }
    }
    let invariant = |v: usize| (ranks[v], valence[v], loops[v]);
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by_key(|&v| invariant(v));
    // blocks of vertices sharing an invariant
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match blocks.last_mut() {
            Some(b) if invariant(b[0]) == invariant(v) => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    let sorted_ranks: Vec<usize> = order.iter().map(|&v| ranks[v]).collect();

    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut position = vec![0usize; nv];
    let mut chosen: Vec<usize> = Vec::with_capacity(nv);
    search_orderings(&blocks, 0, &mut chosen, &mut |ordering| {
        for (pos, &v) in ordering.iter().enumerate() {
            position[v] = pos;
        }
        let mut enc: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (position[a], position[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        enc.sort_unstable();
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    });
    CanonicalKey { ranks: sorted_ranks, edges: best.unwrap_or_default() }
}

fn search_orderings(
    blocks: &[Vec<usize>],
    block: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if block == blocks.len() {
        visit(chosen);
        return;
    }
    let members = &blocks[block];
    let start = chosen.len();
    permute_block(members, &mut vec![false; members.len()], chosen, start, &mut |chosen| {
        search_orderings(blocks, block + 1, chosen, visit)
    });
}

fn permute_block(
    members: &[usize],
    used: &mut Vec<bool>,
    chosen: &mut Vec<usize>,
    start: usize,
    done: &mut dyn FnMut(&mut Vec<usize>),
) {
    if chosen.len() - start == members.len() {
        done(chosen);
        return;
    }
    for i in 0..members.len() {
        if !used[i] {
            used[i] = true;
            chosen.push(members[i]);
            permute_block(members, used, chosen, start, done);
            chosen.pop();
            used[i] = false;
        }
    }
}

/// Rank of the fundamental group of a connected graph of groups with
/// trivial edge groups.
pub fn rank_of(gog: &GraphOfGroups) -> usize {
    gog.ranks.iter().sum::<usize>() + gog.graph.betti_number()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemClassification {
    pub total_rank: usize,
    #[serde(rename = "reduced")]
    pub is_reduced: bool,
    #[serde(rename = "simple")]
    pub is_simple: bool,
    /// Edges whose spheres separate `M`.
    pub separating_edges: Vec<String>,
    pub nonreduced_witness: Option<String>,
}

pub fn classify(gog: &GraphOfGroups, n: usize) -> Result<SystemClassification, DualGraphError> {
    let total_rank = rank_of(gog);
    if total_rank != n {
        return Err(DualGraphError::RankMismatch { expected: n, actual: total_rank });
    }
    let witness = gog.ranks.iter().position(|&r| r > 0);
    let is_simple = witness.is_none();
    Ok(SystemClassification {
        total_rank,
        is_reduced: is_simple && gog.graph.vertex_count() == 1,
        is_simple,
        separating_edges: gog.graph.bridges(),
        nonreduced_witness: witness.map(|v| gog.vertex_id(v).to_string()),
    })
}

/// Edges outside a breadth-first spanning tree. For a simple system these
/// spheres form a reduced subsystem: contracting the tree leaves a rose.
pub fn extract_reduced_subsystem(gog: &GraphOfGroups) -> Result<Vec<String>, DualGraphError> {
    if let Some(v) = gog.ranks.iter().position(|&r| r > 0) {
        return Err(DualGraphError::NotSimple { vertex: gog.vertex_id(v).to_string() });
    }
    let nv = gog.graph.vertex_count();
    let edges = gog.edges();
    let mut in_tree = vec![false; edges.len()];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for (k, e) in edges.iter().enumerate() {
            let other = if e.from == v {
                e.to
            } else if e.to == v {
                e.from
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                in_tree[k] = true;
                queue.push_back(other);
            }
        }
    }
    Ok(edges
        .into_iter()
        .zip(in_tree)
        .filter(|(_, t)| !t)
        .map(|(e, _)| e.id)
        .collect())
}

/// Drop one sphere from the system. The two pieces on either side merge:
/// a non-loop edge is contracted (ranks add), a loop is deleted and its
/// vertex gains one rank.
pub fn remove_sphere(gog: &GraphOfGroups, edge_id: &str) -> Result<GraphOfGroups, DualGraphError> {
    let edges = gog.edges();
    let target = edges
        .iter()
        .find(|e| e.id == edge_id)
        .ok_or_else(|| DualGraphError::UnknownEdge(edge_id.to_string()))?;
    let nv = gog.graph.vertex_count();
    let mut ranks = gog.ranks.clone();
    let (keep, gone) = (target.from, target.to);

    if target.is_loop() {
        ranks[keep] += 1;
        let rest: Vec<_> = edges
            .iter()
            .filter(|e| e.id != edge_id)
            .map(|e| (e.id.clone(), e.from, e.to))
            .collect();
        return GraphOfGroups::new(SerreGraph::from_edges(gog.graph.vertices.clone(), &rest), ranks);
    }

    ranks[keep] += ranks[gone];
    let remap: Vec<usize> = (0..nv)
        .map(|v| {
            let v = if v == gone { keep } else { v };
            if v > gone { v - 1 } else { v }
        })
        .collect();
    ranks.remove(gone);
    let mut vertices = gog.graph.vertices.clone();
    vertices.remove(gone);
    let rest: Vec<_> = edges
        .iter()
        .filter(|e| e.id != edge_id)
        .map(|e| (e.id.clone(), remap[e.from], remap[e.to]))
        .collect();
    GraphOfGroups::new(SerreGraph::from_edges(vertices, &rest), ranks)
}

/// Construction plan for one complementary piece: `copies` summands of
/// `S^2 x S^1` (or `S^3` when zero) with one puncture per incident edge-end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecePlan {
    pub vertex: String,
    pub copies: usize,
    pub punctures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSystemBlueprint {
    pub pieces: Vec<PiecePlan>,
    /// One pair of puncture labels per sphere.
    pub gluings: Vec<(String, String)>,
}

fn puncture_label(vertex: &str, edge: &str, slot: usize) -> String {
    format!("{vertex}:{edge}:{slot}")
}

/// Blueprint of a sphere system realizing `gog`: punctured pieces glued
/// along boundary spheres. Slot 0 is the origin end of an edge, slot 1 the
/// terminus end.
pub fn realize_blueprint(gog: &GraphOfGroups) -> Result<SphereSystemBlueprint, DualGraphError> {
    let edges = gog.edges();
    for v in 0..gog.graph.vertex_count() {
        if gog.ranks[v] != 0 {
            continue;
        }
        let valence = gog.graph.valence(v);
        let id = gog.vertex_id(v).to_string();
        if valence == 1 {
            return Err(DualGraphError::Hypothesis {
                vertex: id,
                condition: TERMINAL_VERTEX_CONDITION.to_string(),
            });
        }
        let distinct_non_loops = edges.iter().filter(|e| !e.is_loop() && (e.from == v || e.to == v)).count();
        if valence == 2 && distinct_non_loops == 2 {
            return Err(DualGraphError::Hypothesis {
                vertex: id,
                condition: PARALLEL_SPHERES_CONDITION.to_string(),
            });
        }
    }

    let mut pieces: Vec<PiecePlan> = (0..gog.graph.vertex_count())
        .map(|v| PiecePlan {
            vertex: gog.vertex_id(v).to_string(),
            copies: gog.ranks[v],
            punctures: Vec::new(),
        })
        .collect();
    let mut gluings = Vec::with_capacity(edges.len());
    for e in &edges {
        let a = puncture_label(gog.vertex_id(e.from), &e.id, 0);
        let b = puncture_label(gog.vertex_id(e.to), &e.id, 1);
        pieces[e.from].punctures.push(a.clone());
        pieces[e.to].punctures.push(b.clone());
        gluings.push((a, b));
    }
    Ok(SphereSystemBlueprint { pieces, gluings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> GraphOfGroups {
        GraphOfGroups::from_edge_list(&[0, 0], &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn validate_faults() {
        let v = vec!["v1".to_string()];
        let ok = SerreGraph::from_edges(v.clone(), &[("e".into(), 0, 0)]);
        assert!(ok.validate().is_ok());

        let fixed = SerreGraph::from_darts(
            v.clone(),
            vec![Dart { id: "e".into(), origin: 0, terminus: 0, reverse: 0 }],
        );
        assert_eq!(fixed.validate().unwrap_err(), vec![Fault::InvolutionFixedPoint { edge: "e".into() }]);

        let two = vec!["v1".to_string(), "v2".to_string()];
        let mismatch = SerreGraph::from_darts(
            two,
            vec![
                Dart { id: "e".into(), origin: 0, terminus: 1, reverse: 1 },
                Dart { id: "e'".into(), origin: 0, terminus: 0, reverse: 0 },
            ],
        );
        let faults = mismatch.validate().unwrap_err();
        assert!(faults.contains(&Fault::EndpointMismatch { edge: "e".into() }));
        assert_eq!(faults[0].to_string(), "endpoint mismatch at e");
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_of(&GraphOfGroups::rose(4)), 4);
        assert_eq!(rank_of(&GraphOfGroups::from_edge_list(&[1, 2], &[(0, 1)]).unwrap()), 3);
        assert_eq!(rank_of(&theta()), 2);
    }

    #[test]
    fn disconnected_rejected() {
        assert_eq!(
            GraphOfGroups::from_edge_list(&[0, 0], &[(0, 0)]).unwrap_err(),
            DualGraphError::Disconnected
        );
    }

    #[test]
    fn classify_examples() {
        let rose = classify(&GraphOfGroups::rose(3), 3).unwrap();
        assert!(rose.is_reduced && rose.is_simple && rose.separating_edges.is_empty());

        let t = classify(&theta(), 2).unwrap();
        assert!(t.is_simple && !t.is_reduced);

        let g = GraphOfGroups::from_edge_list(&[1], &[(0, 0)]).unwrap();
        let c = classify(&g, 2).unwrap();
        assert!(!c.is_simple);
        assert_eq!(c.nonreduced_witness.as_deref(), Some("v1"));

        assert!(matches!(classify(&theta(), 3), Err(DualGraphError::RankMismatch { .. })));
    }

    #[test]
    fn bridges_are_separating() {
        let dumbbell = GraphOfGroups::from_edge_list(&[0, 0], &[(0, 0), (0, 1), (1, 1)]).unwrap();
        assert_eq!(classify(&dumbbell, 2).unwrap().separating_edges, vec!["e2".to_string()]);
    }

    #[test]
    fn extract_examples() {
        assert_eq!(extract_reduced_subsystem(&GraphOfGroups::rose(3)).unwrap().len(), 3);
        assert_eq!(extract_reduced_subsystem(&theta()).unwrap(), vec!["e2", "e3"]);
        let g = GraphOfGroups::from_edge_list(&[1], &[(0, 0)]).unwrap();
        assert!(matches!(extract_reduced_subsystem(&g), Err(DualGraphError::NotSimple { .. })));
    }

    #[test]
    fn remove_examples() {
        let r = remove_sphere(&theta(), "e1").unwrap();
        assert_eq!(r.graph().vertex_count(), 1);
        assert_eq!(r.edges().len(), 2);
        assert!(r.edges().iter().all(|e| e.is_loop()));
        assert_eq!(r.ranks(), &[0]);

        let r = remove_sphere(&GraphOfGroups::rose(2), "e1").unwrap();
        assert_eq!(r.edges().len(), 1);
        assert_eq!(r.ranks(), &[1]);
        assert!(!classify(&r, 2).unwrap().is_simple);

        assert_eq!(remove_sphere(&theta(), "nope").unwrap_err(), DualGraphError::UnknownEdge("nope".into()));
    }

    #[test]
    fn remove_preserves_rank_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 100 {
            let nv = rng.gen_range(1..=5);
            let ne = rng.gen_range(0..=6);
            let ranks: Vec<usize> = (0..nv).map(|_| rng.gen_range(0..=2)).collect();
            let edges: Vec<(usize, usize)> =
                (0..ne).map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv))).collect();
            let Ok(g) = GraphOfGroups::from_edge_list(&ranks, &edges) else { continue };
            if g.edges().is_empty() {
                continue;
            }
            let e = &g.edges()[rng.gen_range(0..g.edges().len())];
            let r = remove_sphere(&g, &e.id).unwrap();
            assert_eq!(rank_of(&r), rank_of(&g));
            checked += 1;
        }
    }

    #[test]
    fn realize_examples() {
        let b = realize_blueprint(&theta()).unwrap();
        assert_eq!(b.pieces.len(), 2);
        assert!(b.pieces.iter().all(|p| p.copies == 0 && p.punctures.len() == 3));
        assert_eq!(b.gluings.len(), 3);
        assert_eq!(b.gluings[0], ("v1:e1:0".to_string(), "v2:e1:1".to_string()));

        let g = GraphOfGroups::from_edge_list(&[1, 1], &[(0, 1)]).unwrap();
        let b = realize_blueprint(&g).unwrap();
        assert_eq!(b.pieces[0].copies, 1);
        assert_eq!(b.pieces[0].punctures, vec!["v1:e1:0"]);

        let g = GraphOfGroups::from_edge_list(&[2, 0], &[(0, 1)]).unwrap();
        match realize_blueprint(&g).unwrap_err() {
            DualGraphError::Hypothesis { vertex, condition } => {
                assert_eq!(vertex, "v2");
                assert!(condition.contains("no terminal vertex with trivial vertex group"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn realize_rejects_parallel_proxy_but_not_single_loop() {
        let g = GraphOfGroups::from_edge_list(&[1, 0, 0], &[(0, 1), (1, 2), (2, 0), (2, 2)]).unwrap();
        let err = realize_blueprint(&g).unwrap_err();
        assert!(err.to_string().contains("proxy"));
        assert!(realize_blueprint(&GraphOfGroups::rose(1)).is_ok());
    }

    #[test]
    fn loop_punctures_count_twice() {
        let g = GraphOfGroups::from_edge_list(&[0, 0], &[(0, 0), (0, 1), (0, 1), (1, 1)]).unwrap();
        let b = realize_blueprint(&g).unwrap();
        for (v, piece) in b.pieces.iter().enumerate() {
            assert_eq!(piece.punctures.len(), g.graph().valence(v));
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let s = r#"{"vertices":[{"id":"v1","rank":0},{"id":"v2","rank":0}],
            "edges":[{"id":"e1","from":"v1","to":"v2","loop":false},
                     {"id":"e2","from":"v1","to":"v2","loop":false},
                     {"id":"e3","from":"v2","to":"v1","loop":false}]}"#;
        let g = GraphOfGroups::from_json(s).unwrap();
        assert_eq!(rank_of(&g), 2);
        assert_eq!(GraphOfGroups::from_json(&g.to_json()).unwrap(), g);

        let bad_loop = r#"{"vertices":[{"id":"v1","rank":0}],"edges":[{"id":"e1","from":"v1","to":"v1","loop":false}]}"#;
        assert!(matches!(GraphOfGroups::from_json(bad_loop), Err(DualGraphError::Malformed(_))));
        let unknown = r#"{"vertices":[{"id":"v1","rank":0}],"edges":[{"id":"e1","from":"v1","to":"v9"}]}"#;
        assert!(GraphOfGroups::from_json(unknown).is_err());
        assert!(GraphOfGroups::from_json("{").is_err());
    }

    #[test]
    fn dot_labels() {
        let dot = theta().to_dot();
        assert!(dot.contains("label=\"v1 (rank 0)\""));
        assert_eq!(dot.matches(" -- ").count(), 3);
    }

    #[test]
    fn canonical_key_detects_isomorphism() {
        let a = GraphOfGroups::from_edge_list(&[1, 0, 0], &[(0, 1), (1, 2), (2, 2)]).unwrap();
        let b = GraphOfGroups::from_edge_list(&[0, 0, 1], &[(1, 1), (0, 1), (2, 0)]).unwrap();
        let c = GraphOfGroups::from_edge_list(&[0, 1, 0], &[(0, 1), (1, 2), (2, 2)]).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_ne!(a.canonical_key(), c.canonical_key());
    }
}
