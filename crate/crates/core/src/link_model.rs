//! The link of a reduced simplex, modelled by partitions of boundary spheres.
//!
//! Cutting `M` along a reduced system `Sigma_1, .., Sigma_n` leaves `S^3`
//! with `2n` balls removed; its boundary spheres are labelled `i+` and `i-`.
//! A sphere in that complement that is not boundary-parallel splits the
//! boundary labels into two sides. It is essential in `M`, and distinct from
//! every `Sigma_i`, when both sides have at least two labels, and it is
//! non-separating in `M` when some pair `i+`, `i-` lands on opposite sides.
//! Those *admissible* partitions are the vertices of the link.
//!
//! Two such spheres can be made disjoint exactly when their partitions are
//! nested: one side of one is contained in a side of the other. The link is
//! the flag complex of that compatibility graph.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest rank accepted by the enumerating operations.
pub const MAX_ENUMERATION_RANK: usize = 6;
/// Largest rank accepted by the maximal-family search.
pub const MAX_FAMILY_RANK: usize = 4;
/// Largest rank for which [`build_link_complex`] also lists maximal simplices.
pub const MAX_SIMPLEX_LISTING_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("rank {n} outside the supported range {min}..={max}")]
    RankOutOfRange { n: usize, min: usize, max: usize },
    #[error("label {0} is out of range")]
    LabelOutOfRange(String),
    #[error("cannot parse boundary label {0:?}")]
    BadLabel(String),
    #[error("a partition needs two nonempty sides")]
    EmptySide,
    #[error("partitions have different ranks {0} and {1}")]
    RankMismatch(usize, usize),
    #[error("a vertex is not compared with itself")]
    SameVertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// Boundary sphere `Sigma_i^+` or `Sigma_i^-`, written `"3+"` / `"3-"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryLabel {
    pub index: usize,
    pub sign: Sign,
}

impl BoundaryLabel {
    pub fn plus(index: usize) -> Self {
        BoundaryLabel { index, sign: Sign::Plus }
    }

    pub fn minus(index: usize) -> Self {
        BoundaryLabel { index, sign: Sign::Minus }
    }

    fn bit(self) -> u32 {
        2 * (self.index as u32 - 1) + (self.sign == Sign::Minus) as u32
    }

    fn from_bit(bit: u32) -> Self {
        BoundaryLabel {
            index: bit as usize / 2 + 1,
            sign: if bit.is_multiple_of(2) { Sign::Plus } else { Sign::Minus },
        }
    }
}

impl fmt::Display for BoundaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        write!(f, "{}{}", self.index, s)
    }
}

impl FromStr for BoundaryLabel {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinkError::BadLabel(s.to_string());
        let (num, sign) = match s.strip_suffix('+') {
            Some(num) => (num, Sign::Plus),
            None => (s.strip_suffix('-').ok_or_else(bad)?, Sign::Minus),
        };
        let index: usize = num.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(BoundaryLabel { index, sign })
    }
}

impl Serialize for BoundaryLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundaryLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Unordered split of the `2n` boundary labels into two nonempty sides,
/// stored as the side containing `1+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionSpec", into = "PartitionSpec")]
pub struct Partition {
    n: usize,
    side: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub n: usize,
    pub side: Vec<BoundaryLabel>,
}

impl TryFrom<PartitionSpec> for Partition {
    type Error = LinkError;

    fn try_from(spec: PartitionSpec) -> Result<Self, Self::Error> {
        Partition::new(spec.n, spec.side)
    }
}

impl From<Partition> for PartitionSpec {
    fn from(p: Partition) -> Self {
        PartitionSpec { n: p.n, side: p.side_labels() }
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 32 { u64::MAX } else { (1u64 << (2 * n)) - 1 }
}

impl Partition {
    /// Either side may be given; it is canonicalized to the side holding `1+`.
    pub fn new(n: usize, side: impl IntoIterator<Item = BoundaryLabel>) -> Result<Self, LinkError> {
        if n == 0 || n > 32 {
            return Err(LinkError::RankOutOfRange { n, min: 1, max: 32 });
        }
        let mut mask = 0u64;
        for l in side {
            if l.index == 0 || l.index > n {
                return Err(LinkError::LabelOutOfRange(l.to_string()));
            }
            mask |= 1 << l.bit();
        }
        Partition::from_mask(n, mask)
    }

    fn from_mask(n: usize, mask: u64) -> Result<Self, LinkError> {
        let full = full_mask(n);
        if mask == 0 || mask == full {
            return Err(LinkError::EmptySide);
        }
        let side = if mask & 1 == 1 { mask } else { full & !mask };
        Ok(Partition { n, side })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn side_mask(&self) -> u64 {
        self.side
    }

    pub fn other_mask(&self) -> u64 {
        full_mask(self.n) & !self.side
    }

    fn labels_of(mask: u64) -> Vec<BoundaryLabel> {
        (0..64).filter(|b| mask >> b & 1 == 1).map(BoundaryLabel::from_bit).collect()
    }

    /// The side containing `1+`, sorted.
    pub fn side_labels(&self) -> Vec<BoundaryLabel> {
        Self::labels_of(self.side)
    }

    pub fn other_labels(&self) -> Vec<BoundaryLabel> {
        Self::labels_of(self.other_mask())
    }

    /// Relabel `i+ <-> i-` for every `i`.
    pub fn swap_signs(&self) -> Partition {
        let evens = self.side & 0x5555_5555_5555_5555;
        let odds = self.side & 0xAAAA_AAAA_AAAA_AAAA;
        Partition::from_mask(self.n, evens << 1 | odds >> 1).expect("relabeling keeps sides nonempty")
    }

    /// Order of enumeration: lexicographic on the sorted canonical side.
    pub fn canonical_cmp(&self, other: &Partition) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.side_labels().cmp(&other.side_labels()))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<BoundaryLabel>| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{} | {}}}", join(self.side_labels()), join(self.other_labels()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    Admissible,
    /// One side is a single boundary sphere.
    BoundaryParallel,
    /// No pair `i+`, `i-` is split: the sphere separates `M`.
    Separating,
}

impl Admissibility {
    pub fn is_admissible(self) -> bool {
        self == Admissibility::Admissible
    }

    pub fn reason(self) -> &'static str {
        match self {
            Admissibility::Admissible => "admissible",
            Admissibility::BoundaryParallel => "boundary-parallel",
            Admissibility::Separating => "separating",
        }
    }
}

pub fn is_admissible(p: &Partition) -> Admissibility {
    if p.side.count_ones() < 2 || p.other_mask().count_ones() < 2 {
        return Admissibility::BoundaryParallel;
    }
    if split_pairs(p) == 0 {
        return Admissibility::Separating;
    }
    Admissibility::Admissible
}

/// Bit `i - 1` set when `i+` and `i-` lie on opposite sides.
fn split_pairs(p: &Partition) -> u64 {
    let mut split = 0;
    for i in 0..p.n {
        let plus = p.side >> (2 * i) & 1;
        let minus = p.side >> (2 * i + 1) & 1;
        if plus != minus {
            split |= 1 << i;
        }
    }
    split
}

fn check_rank(n: usize, min: usize, max: usize) -> Result<(), LinkError> {
    if n < min || n > max {
        Err(LinkError::RankOutOfRange { n, min, max })
    } else {
        Ok(())
    }
}

fn all_partitions(n: usize) -> impl Iterator<Item = Partition> {
    let full = full_mask(n);
    // canonical side holds bit 0; the other side must be nonempty
    (0..(1u64 << (2 * n - 1)))
        .map(|rest| rest << 1 | 1)
        .filter(move |&m| m != full)
        .map(move |side| Partition { n, side })
}

/// Admissible partitions of the `2n` labels, in canonical order.
pub fn enumerate_link_vertices(n: usize) -> Result<Vec<Partition>, LinkError> {
    check_rank(n, 1, MAX_ENUMERATION_RANK)?;
    let mut out: Vec<Partition> = all_partitions(n).filter(|p| is_admissible(p).is_admissible()).collect();
    out.sort_by_cached_key(|p| p.side_labels());
    Ok(out)
}

/// Number of admissible partitions: `2^(2n-1) - 2n - 2^(n-1)` for `n >= 2`.
/// At `n = 1` the two singleton sides coincide and the count is 0.
pub fn link_vertex_count(n: usize) -> u64 {
    if n < 2 {
        return 0;
    }
    (1u64 << (2 * n - 1)) - 2 * n as u64 - (1u64 << (n - 1))
}

/// Breakdown of all `2^(2n-1) - 1` bipartitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionCensus {
    pub n: usize,
    pub admissible: usize,
    pub separating: usize,
    pub boundary_parallel: usize,
    pub total: usize,
}

pub fn partition_census(n: usize) -> Result<PartitionCensus, LinkError> {
    check_rank(n, 1, MAX_ENUMERATION_RANK)?;
    let mut census = PartitionCensus { n, admissible: 0, separating: 0, boundary_parallel: 0, total: 0 };
    for p in all_partitions(n) {
        census.total += 1;
        match is_admissible(&p) {
            Admissibility::Admissible => census.admissible += 1,
            Admissibility::Separating => census.separating += 1,
            Admissibility::BoundaryParallel => census.boundary_parallel += 1,
        }
    }
    Ok(census)
}

/// Nested (laminar) test: some side of `p` lies inside some side of `q`.
pub fn are_compatible(p: &Partition, q: &Partition) -> Result<bool, LinkError> {
    if p.n != q.n {
        return Err(LinkError::RankMismatch(p.n, q.n));
    }
    if p == q {
        return Err(LinkError::SameVertex);
    }
    Ok(nested(p, q))
}

fn nested(p: &Partition, q: &Partition) -> bool {
    let subset = |a: u64, b: u64| a & !b == 0;
    let (xp, yp, xq, yq) = (p.side, p.other_mask(), q.side, q.other_mask());
    subset(xp, xq) || subset(xp, yq) || subset(yp, xq) || subset(yp, yq)
}

/// Homology class in `H_2(M) = Z^n` of the sphere with partition `p`,
/// normalized so the first nonzero coordinate is `+1`.
pub fn homology_class(p: &Partition) -> Vec<i32> {
    let mut v: Vec<i32> = (0..p.n)
        .map(|i| {
            let plus = p.side >> (2 * i) & 1 == 1;
            let minus = p.side >> (2 * i + 1) & 1 == 1;
            match (plus, minus) {
                (true, false) => 1,
                (false, true) => -1,
                _ => 0,
            }
        })
        .collect();
    if v.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    v
}

/// Flag complex on the admissible partitions of rank `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkComplex {
    pub n: usize,
    pub vertices: Vec<Partition>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkSummary {
    pub n: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `(size, count)` of maximal simplices, by vertex count.
    pub maximal_simplices: Option<Vec<(usize, usize)>>,
    /// Every maximal clique of the 1-skeleton is realized by a tree of disjoint spheres.
    pub flag_consistent: Option<bool>,
}

pub fn build_link_complex(n: usize) -> Result<LinkComplex, LinkError> {
    check_rank(n, 1, MAX_ENUMERATION_RANK)?;
    let vertices = enumerate_link_vertices(n)?;
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if nested(&vertices[i], &vertices[j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(LinkComplex { n, vertices, edges })
}

impl LinkComplex {
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.vertices.len()]; self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    /// Maximal simplices (maximal cliques), each as sorted vertex indices.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut out = Vec::new();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        bron_kerbosch(&adj, &mut Vec::new(), all, Vec::new(), &mut out);
        out.retain(|c| !c.is_empty());
        out.iter_mut().for_each(|c| c.sort_unstable());
        out.sort();
        out
    }

    pub fn summary(&self) -> LinkSummary {
        let (maximal_simplices, flag_consistent) = if self.n <= MAX_SIMPLEX_LISTING_RANK {
            let cliques = self.maximal_simplices();
            let mut sizes = std::collections::BTreeMap::new();
            for c in &cliques {
                *sizes.entry(c.len()).or_insert(0usize) += 1;
            }
            let realizable = cliques.iter().all(|c| {
                let family: Vec<Partition> = c.iter().map(|&i| self.vertices[i]).collect();
                realize_as_tree(self.n, &family).is_some()
            });
            (Some(sizes.into_iter().collect()), Some(realizable))
        } else {
            (None, None)
        };
        LinkSummary {
            n: self.n,
            vertex_count: self.vertices.len(),
            edge_count: self.edges.len(),
            maximal_simplices,
            flag_consistent,
        }
    }

    /// 1-skeleton in Graphviz format, vertices labelled by homology class.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph link {\n");
        for (i, p) in self.vertices.iter().enumerate() {
            let h: Vec<String> = homology_class(p).iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("  {i} [label=\"({})\" tooltip=\"{p}\"];\n", h.join(",")));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  {a} -- {b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    clique: &mut Vec<usize>,
    candidates: Vec<usize>,
    excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            out.push(clique.clone());
        }
        return;
    }
    let pivot = candidates
        .iter()
        .chain(&excluded)
        .copied()
        .max_by_key(|&u| candidates.iter().filter(|&&v| adj[u][v]).count())
        .expect("nonempty");
    let mut candidates = candidates;
    let mut excluded = excluded;
    let branch: Vec<usize> = candidates.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in branch {
        clique.push(v);
        let c = candidates.iter().copied().filter(|&u| adj[v][u]).collect();
        let x = excluded.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, clique, c, x, out);
        clique.pop();
        candidates.retain(|&u| u != v);
        excluded.push(v);
    }
}

/// A tree whose leaves are the `2n` boundary labels and whose edges are the
/// spheres of a family: each internal node is a complementary piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitTree {
    /// Parent of each internal node (node 0 is the root, holding `1+`).
    pub parent: Vec<Option<usize>>,
    /// Leaf set strictly below each internal node.
    pub below: Vec<u64>,
}

/// Try to realize a family of partitions as disjoint spheres, i.e. build a
/// tree with one edge per partition and check that cutting each edge
/// reproduces its partition. Returns `None` when the family is not laminar.
pub fn realize_as_tree(n: usize, family: &[Partition]) -> Option<SplitTree> {
    let full = full_mask(n);
    // clusters: the side avoiding 1+, root = everything
    let mut clusters: Vec<u64> = family.iter().map(|p| p.other_mask()).collect();
    clusters.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
    clusters.dedup();
    if clusters.len() != family.len() {
        return None;
    }
    let mut nodes = vec![full];
    nodes.extend(&clusters);
    let mut parent = vec![None; nodes.len()];
    for i in 1..nodes.len() {
        // smallest earlier (larger or equal size) node containing this cluster
        parent[i] = (0..i)
            .filter(|&j| nodes[i] & !nodes[j] == 0)
            .min_by_key(|&j| nodes[j].count_ones());
        parent[i]?;
    }
    // leaves hang from the smallest node containing them
    let mut below = vec![0u64; nodes.len()];
    for bit in 0..2 * n {
        let leaf = 1u64 << bit;
        let home = (0..nodes.len())
            .filter(|&j| nodes[j] & leaf != 0)
            .min_by_key(|&j| nodes[j].count_ones())?;
        let mut cur = Some(home);
        while let Some(j) = cur {
            below[j] |= leaf;
            cur = parent[j];
        }
    }
    for j in 0..nodes.len() {
        if below[j] != nodes[j] {
            return None;
        }
        let children = parent.iter().filter(|&&p| p == Some(j)).count();
        let leaves = (0..2 * n)
            .filter(|&bit| {
                let leaf = 1u64 << bit;
                (0..nodes.len())
                    .filter(|&k| nodes[k] & leaf != 0)
                    .min_by_key(|&k| nodes[k].count_ones())
                    == Some(j)
            })
            .count();
        let degree = children + leaves + usize::from(j != 0);
        if degree < 3 {
            return None;
        }
    }
    Some(SplitTree { parent, below })
}

/// Largest set of pairwise compatible vertices (maximum clique), by
/// branch and bound.
pub fn max_compatible_family(complex: &LinkComplex, must_contain: Option<usize>) -> Vec<usize> {
    let adj = complex.adjacency();
    let mut best = Vec::new();
    let (mut clique, candidates): (Vec<usize>, Vec<usize>) = match must_contain {
        Some(v) => (vec![v], (0..adj.len()).filter(|&u| adj[v][u]).collect()),
        None => (Vec::new(), (0..adj.len()).collect()),
    };
    max_clique(&adj, &mut clique, candidates, &mut best);
    best
}

fn max_clique(adj: &[Vec<bool>], clique: &mut Vec<usize>, candidates: Vec<usize>, best: &mut Vec<usize>) {
    if clique.len() > best.len() {
        *best = clique.clone();
    }
    if clique.len() + candidates.len() <= best.len() {
        return;
    }
    for (i, &v) in candidates.iter().enumerate() {
        if clique.len() + candidates.len() - i <= best.len() {
            return;
        }
        let next: Vec<usize> = candidates[i + 1..].iter().copied().filter(|&u| adj[v][u]).collect();
        clique.push(v);
        max_clique(adj, clique, next, best);
        clique.pop();
    }
}

/// Size of the largest family made of a reduced system together with
/// pairwise disjoint non-separating spheres in its complement.
pub fn max_simple_star_size(n: usize) -> Result<usize, LinkError> {
    check_rank(n, 2, MAX_FAMILY_RANK)?;
    let complex = build_link_complex(n)?;
    Ok(n + max_compatible_family(&complex, None).len())
}
