//! Unmarked model of the spine of reduced outer space.
//!
//! Open cells of reduced outer space are indexed by marked core graphs:
//! connected graphs of rank `n` with no separating edge and every vertex of
//! valence at least 3. Forgetting markings and metrics leaves the finite set
//! of isomorphism classes of such graphs, partially ordered by forest
//! collapse. That poset is what this module computes for `n = 2, 3`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_graph::{
    canonical_key, connected_without, CanonicalKey, GraphOfGroups, GraphSpec, SerreGraph,
};
use crate::enumerate::{connected_multigraphs, is_bridgeless};

pub const MIN_SPINE_RANK: usize = 2;
pub const MAX_SPINE_RANK: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpineError {
    #[error("rank {0} outside the supported range 2..=3")]
    RankOutOfRange(usize),
    #[error("not a core graph: {0}")]
    NotCore(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("forest contains the loop {0}")]
    LoopInForest(String),
    #[error("forest contains a cycle through {0}")]
    CycleInForest(String),
}

/// Connected graph of rank `n`, no separating edges, all valences >= 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct CoreGraph {
    graph: SerreGraph,
    rank_n: usize,
}

impl CoreGraph {
    pub fn new(graph: SerreGraph) -> Result<Self, SpineError> {
        graph
            .validate()
            .map_err(|f| SpineError::NotCore(format!("{} Serre-graph faults", f.len())))?;
        let nv = graph.vertex_count();
        if nv == 0 || !graph.is_connected() {
            return Err(SpineError::NotCore("disconnected".into()));
        }
        if let Some(e) = graph.bridges().first() {
            return Err(SpineError::NotCore(format!("{e} is a separating edge")));
        }
        if let Some(v) = (0..nv).find(|&v| graph.valence(v) < 3) {
            return Err(SpineError::NotCore(format!(
                "{} has valence {}",
                graph.vertices()[v],
                graph.valence(v)
            )));
        }
        let rank_n = graph.betti_number();
        Ok(CoreGraph { graph, rank_n })
    }

    /// Vertices `v1..`, edges `e1..`.
    pub fn from_edge_list(vertices: usize, edges: &[(usize, usize)]) -> Result<Self, SpineError> {
        let ids = (1..=vertices).map(|i| format!("v{i}")).collect();
        let named: Vec<_> = edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| (format!("e{}", k + 1), a, b))
            .collect();
        if named.iter().any(|e| e.1 >= vertices || e.2 >= vertices) {
            return Err(SpineError::NotCore("endpoint out of range".into()));
        }
        CoreGraph::new(SerreGraph::from_edges(ids, &named))
    }

    pub fn rose(n: usize) -> Result<Self, SpineError> {
        CoreGraph::from_edge_list(1, &vec![(0, 0); n])
    }

    pub fn graph(&self) -> &SerreGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.rank_n
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn edge_ids(&self) -> Vec<String> {
        self.graph.geometric_edges().into_iter().map(|e| e.id).collect()
    }

    pub fn is_trivalent(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.graph.valence(v) == 3)
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_key(&vec![0; self.vertex_count()], &self.graph.edge_pairs())
    }

    /// The graph as the dual graph of a simple sphere system.
    pub fn as_graph_of_groups(&self) -> GraphOfGroups {
        GraphOfGroups::new(self.graph.clone(), vec![0; self.vertex_count()]).expect("core graphs are connected")
    }

    /// Edges whose deletion leaves a component consisting of one vertex with
    /// one loop (a once-punctured `S^2 x S^1` cut off by a single sphere).
    pub fn codimension_one_violations(&self) -> Vec<String> {
        let edges = self.graph.geometric_edges();
        let pairs = self.graph.edge_pairs();
        let nv = self.vertex_count();
        let mut out = Vec::new();
        for (k, e) in edges.iter().enumerate() {
            let rest: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &p)| p).collect();
            let comp = components(nv, &rest);
            let bad = (0..nv).any(|v| {
                let members = comp.iter().filter(|&&c| c == comp[v]).count();
                let inside: Vec<&(usize, usize)> = rest.iter().filter(|(a, _)| comp[*a] == comp[v]).collect();
                members == 1 && inside.len() == 1 && inside[0].0 == inside[0].1
            });
            if bad {
                out.push(e.id.clone());
            }
        }
        out
    }
}

impl TryFrom<GraphSpec> for CoreGraph {
    type Error = SpineError;

    fn try_from(spec: GraphSpec) -> Result<Self, Self::Error> {
        if spec.vertices.iter().any(|v| v.rank != 0) {
            return Err(SpineError::NotCore("core graph vertices carry rank 0".into()));
        }
        let g = GraphOfGroups::try_from(spec).map_err(|e| SpineError::NotCore(e.to_string()))?;
        CoreGraph::new(g.graph().clone())
    }
}

impl From<CoreGraph> for GraphSpec {
    fn from(g: CoreGraph) -> Self {
        g.as_graph_of_groups().into()
    }
}

fn components(nv: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::new(nv);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    (0..nv).map(|v| uf.find(v)).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = v;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

/// Contract the edges at positions `forest` of a plain multigraph. Returns
/// the new vertex count, the surviving edges (in order) and, for each old
/// vertex, its new index. The caller guarantees `forest` is a forest.
pub(crate) fn contract(
    nv: usize,
    edges: &[(usize, usize)],
    forest: &BTreeSet<usize>,
) -> (usize, Vec<(usize, usize)>, Vec<usize>) {
    let mut uf = UnionFind::new(nv);
    for &k in forest {
        uf.union(edges[k].0, edges[k].1);
    }
    let roots: BTreeSet<usize> = (0..nv).map(|v| uf.find(v)).collect();
    let index: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let map: Vec<usize> = (0..nv).map(|v| index[&uf.find(v)]).collect();
    let rest = edges
        .iter()
        .enumerate()
        .filter(|(k, _)| !forest.contains(k))
        .map(|(_, &(a, b))| (map[a], map[b]))
        .collect();
    (roots.len(), rest, map)
}

/// Collapse each tree of `forest` to a point.
pub fn forest_collapse(g: &CoreGraph, forest: &[&str]) -> Result<CoreGraph, SpineError> {
    let edges = g.graph.geometric_edges();
    let mut uf = UnionFind::new(g.vertex_count());
    let mut chosen = BTreeSet::new();
    for &id in forest {
        let k = edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| SpineError::UnknownEdge(id.to_string()))?;
        if edges[k].is_loop() {
            return Err(SpineError::LoopInForest(id.to_string()));
        }
        if !chosen.insert(k) || !uf.union(edges[k].from, edges[k].to) {
            return Err(SpineError::CycleInForest(id.to_string()));
        }
    }
    let (nv, rest, map) = contract(g.vertex_count(), &g.graph.edge_pairs(), &chosen);
    // each merged vertex keeps the id of its first member
    let mut ids = vec![String::new(); nv];
    for v in (0..g.vertex_count()).rev() {
        ids[map[v]] = g.graph.vertices()[v].clone();
    }
    let named: Vec<_> = edges
        .iter()
        .enumerate()
        .filter(|(k, _)| !chosen.contains(k))
        .zip(rest)
        .map(|((_, e), (a, b))| (e.id.clone(), a, b))
        .collect();
    CoreGraph::new(SerreGraph::from_edges(ids, &named))
}

fn check_rank(n: usize) -> Result<(), SpineError> {
    if (MIN_SPINE_RANK..=MAX_SPINE_RANK).contains(&n) {
        Ok(())
    } else {
        Err(SpineError::RankOutOfRange(n))
    }
}

/// One core graph per isomorphism class, ordered by vertex count and then
/// canonical key. Each graph is given in its canonical labelling.
pub fn enumerate_core_graphs(n: usize) -> Result<Vec<CoreGraph>, SpineError> {
    check_rank(n)?;
    let mut classes: BTreeMap<CanonicalKey, ()> = BTreeMap::new();
    // a trivalent graph of rank n has 2(n - 1) vertices, the most possible
    for v in 1..=2 * (n - 1) {
        let e = v + n - 1;
        for edges in connected_multigraphs(v, e) {
            let mut valence = vec![0usize; v];
            for &(a, b) in &edges {
                valence[a] += 1;
                valence[b] += 1;
            }
            if valence.iter().any(|&d| d < 3) || !is_bridgeless(v, &edges) {
                continue;
            }
            classes.insert(canonical_key(&vec![0; v], &edges), ());
        }
    }
    classes
        .into_keys()
        .map(|key| CoreGraph::from_edge_list(key.ranks.len(), &key.edges))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub forest_size: usize,
}

/// Isomorphism classes of core graphs ordered by forest collapse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetSpec", into = "PosetSpec")]
pub struct CollapsePoset {
    pub nodes: Vec<CoreGraph>,
    pub arrows: Vec<Arrow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetSpec {
    pub nodes: Vec<NodeSpec>,
    pub arrows: Vec<Arrow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: usize,
    pub graph: CoreGraph,
}

impl From<CollapsePoset> for PosetSpec {
    fn from(p: CollapsePoset) -> Self {
        PosetSpec {
            nodes: p.nodes.into_iter().enumerate().map(|(id, graph)| NodeSpec { id, graph }).collect(),
            arrows: p.arrows,
        }
    }
}

impl TryFrom<PosetSpec> for CollapsePoset {
    type Error = String;

    fn try_from(spec: PosetSpec) -> Result<Self, Self::Error> {
        if spec.nodes.iter().enumerate().any(|(i, n)| n.id != i) {
            return Err("node ids must be 0, 1, 2, ... in order".into());
        }
        let count = spec.nodes.len();
        if spec.arrows.iter().any(|a| a.from >= count || a.to >= count) {
            return Err("arrow endpoint out of range".into());
        }
        Ok(CollapsePoset { nodes: spec.nodes.into_iter().map(|n| n.graph).collect(), arrows: spec.arrows })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetSummary {
    pub n: usize,
    pub node_count: usize,
    pub arrow_count: usize,
    pub max_chain_length: usize,
    pub trivalent_count: usize,
}

/// Nonempty forests of `g`, as sets of edge positions.
pub fn forests(g: &CoreGraph) -> Vec<BTreeSet<usize>> {
    let edges = g.graph.edge_pairs();
    let candidates: Vec<usize> = (0..edges.len()).filter(|&k| edges[k].0 != edges[k].1).collect();
    let mut out = Vec::new();
    for mask in 1u64..(1 << candidates.len()) {
        let chosen: BTreeSet<usize> =
            candidates.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &k)| k).collect();
        let mut uf = UnionFind::new(g.vertex_count());
        if chosen.iter().all(|&k| uf.union(edges[k].0, edges[k].1)) {
            out.push(chosen);
        }
    }
    out
}

pub fn build_collapse_poset(n: usize) -> Result<CollapsePoset, SpineError> {
    let nodes = enumerate_core_graphs(n)?;
    let index: BTreeMap<CanonicalKey, usize> =
        nodes.iter().enumerate().map(|(i, g)| (g.canonical_key(), i)).collect();
    let mut arrows = BTreeSet::new();
    for (i, g) in nodes.iter().enumerate() {
        let ids = g.edge_ids();
        for forest in forests(g) {
            let names: Vec<&str> = forest.iter().map(|&k| ids[k].as_str()).collect();
            let image = forest_collapse(g, &names)?;
            let j = *index
                .get(&image.canonical_key())
                .ok_or_else(|| SpineError::NotCore("collapse left the enumerated census".into()))?;
            arrows.insert(Arrow { from: i, to: j, forest_size: forest.len() });
        }
    }
    Ok(CollapsePoset { nodes, arrows: arrows.into_iter().collect() })
}

impl CollapsePoset {
    /// Longest chain, counted in arrows.
    pub fn max_chain_length(&self) -> usize {
        // arrows strictly decrease the edge count, so process by edge count
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&i| self.nodes[i].edge_count());
        let mut longest = vec![0usize; self.nodes.len()];
        for &i in &order {
            longest[i] = self
                .arrows
                .iter()
                .filter(|a| a.from == i)
                .map(|a| longest[a.to] + 1)
                .max()
                .unwrap_or(0);
        }
        longest.into_iter().max().unwrap_or(0)
    }

    /// Whether every node collapses onto some rose.
    pub fn every_node_reaches_rose(&self) -> bool {
        (0..self.nodes.len()).all(|i| {
            self.nodes[i].vertex_count() == 1
                || self.arrows.iter().any(|a| a.from == i && self.nodes[a.to].vertex_count() == 1)
        })
    }

    pub fn summary(&self) -> PosetSummary {
        PosetSummary {
            n: self.nodes.first().map_or(0, |g| g.rank()),
            node_count: self.nodes.len(),
            arrow_count: self.arrows.len(),
            max_chain_length: self.max_chain_length(),
            trivalent_count: self.nodes.iter().filter(|g| g.is_trivalent()).count(),
        }
    }

    /// Hasse diagram (covering arrows only) in Graphviz format.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n");
        for (i, g) in self.nodes.iter().enumerate() {
            out.push_str(&format!(
                "  {i} [label=\"#{i}: V={} E={}\"];\n",
                g.vertex_count(),
                g.edge_count()
            ));
        }
        for a in &self.arrows {
            let covered = self
                .arrows
                .iter()
                .any(|b| b.from == a.from && self.arrows.iter().any(|c| c.from == b.to && c.to == a.to));
            if !covered {
                out.push_str(&format!("  {} -> {} [label=\"{}\"];\n", a.from, a.to, a.forest_size));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Whether contracting `forest` in the plain multigraph can create a
/// separating edge that was not separating before.
pub fn collapse_creates_bridge(nv: usize, edges: &[(usize, usize)], forest: &BTreeSet<usize>) -> bool {
    let (nv2, rest, _) = contract(nv, edges, forest);
    let survivors: Vec<usize> = (0..edges.len()).filter(|k| !forest.contains(k)).collect();
    rest.iter().enumerate().any(|(j, &(a, b))| {
        let separating_after = a != b && !connected_without(nv2, &rest, Some(j));
        let k = survivors[j];
        let separating_before = edges[k].0 != edges[k].1 && !connected_without(nv, edges, Some(k));
        separating_after && !separating_before
    })
}
