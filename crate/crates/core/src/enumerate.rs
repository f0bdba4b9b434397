//! Exhaustive generation of small connected multigraphs (loops allowed) and
//! of the sphere-system dual graphs built from them.

use std::collections::BTreeMap;

use crate::dual_graph::{connected_without, rank_of, CanonicalKey, GraphOfGroups};

type Visit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Every multiset of `edges` vertex pairs `(a, b)`, `a <= b`, on `vertices`
/// labelled vertices whose underlying graph is connected. Multisets are
/// listed as nondecreasing pair sequences.
pub fn connected_multigraphs(vertices: usize, edges: usize) -> Vec<Vec<(usize, usize)>> {
    if vertices == 0 || edges + 1 < vertices {
        return Vec::new();
    }
    let pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|a| (a..vertices).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(edges);
    extend_multiset(&pairs, 0, edges, &mut current, &mut |multiset| {
        if connected_without(vertices, multiset, None) {
            out.push(multiset.to_vec());
        }
    });
    out
}

fn extend_multiset(
    pairs: &[(usize, usize)],
    from: usize,
    remaining: usize,
    current: &mut Vec<(usize, usize)>,
    visit: &mut Visit<'_>,
) {
    if remaining == 0 {
        visit(current);
        return;
    }
    for i in from..pairs.len() {
        current.push(pairs[i]);
        extend_multiset(pairs, i, remaining - 1, current, visit);
        current.pop();
    }
}

/// Ordered ways of writing `total` as a sum of `parts` non-negative integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Whether no edge is a bridge.
pub fn is_bridgeless(vertices: usize, edges: &[(usize, usize)]) -> bool {
    (0..edges.len()).all(|k| edges[k].0 == edges[k].1 || connected_without(vertices, edges, Some(k)))
}

fn dedup(graphs: impl IntoIterator<Item = GraphOfGroups>) -> Vec<GraphOfGroups> {
    let mut classes: BTreeMap<CanonicalKey, GraphOfGroups> = BTreeMap::new();
    for g in graphs {
        classes.entry(g.canonical_key()).or_insert(g);
    }
    classes.into_values().collect()
}

/// Dual graphs of systems of `n` non-separating spheres in `#_n S^2 x S^1`:
/// connected, exactly `n` edges, no bridges, total rank `n`. One graph per
/// isomorphism class, at most `max_vertices` vertices.
pub fn nonseparating_systems(max_vertices: usize, n: usize) -> Vec<GraphOfGroups> {
    let mut found = Vec::new();
    for v in 1..=max_vertices {
        for edges in connected_multigraphs(v, n) {
            if !is_bridgeless(v, &edges) {
                continue;
            }
            let betti = (n + 1).saturating_sub(v);
            let Some(spare) = n.checked_sub(betti) else { continue };
            for ranks in compositions(spare, v) {
                let g = GraphOfGroups::from_edge_list(&ranks, &edges).expect("connected by construction");
                debug_assert_eq!(rank_of(&g), n);
                found.push(g);
            }
        }
    }
    dedup(found)
}

/// Dual graphs of simple sphere systems in `#_n S^2 x S^1` with at most
/// `max_vertices` pieces: all vertex ranks zero, first Betti number `n`, and
/// every piece bounded by at least three sphere-ends so no two spheres are
/// parallel and none is inessential. The single loop (`n = 1`) is included.
pub fn simple_systems(max_vertices: usize, n: usize) -> Vec<GraphOfGroups> {
    let mut found = Vec::new();
    for v in 1..=max_vertices {
        let e = n + v - 1;
        for edges in connected_multigraphs(v, e) {
            let mut valence = vec![0usize; v];
            for &(a, b) in &edges {
                valence[a] += 1;
                valence[b] += 1;
            }
            let single_loop = v == 1 && e == 1;
            if !single_loop && valence.iter().any(|&d| d < 3) {
                continue;
            }
            found.push(GraphOfGroups::from_edge_list(&vec![0; v], &edges).expect("connected"));
        }
    }
    dedup(found)
}
