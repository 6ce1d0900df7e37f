use std::collections::BTreeSet;

use super::{components_mask, Graph, GraphError, Vertex, VertexSet};

/// Result of contracting groups of vertices into single vertices.
#[derive(Debug, Clone)]
pub struct Identified {
    pub graph: Graph,
    /// New id of each group, `None` for empty groups.
    pub group_vertex: Vec<Option<Vertex>>,
    /// New id of every old vertex.
    pub old_to_new: Vec<Vertex>,
}

/// Replaces every non-empty group by a single vertex adjacent to the group's
/// external neighborhood. Ungrouped vertices keep their relative order and
/// come first; group vertices follow in group order.
pub fn identify_sets(g: &Graph, groups: &[VertexSet]) -> Result<Identified, GraphError> {
    let n = g.n();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, group) in groups.iter().enumerate() {
        for &v in group {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if owner[v].is_some() {
                return Err(GraphError::OverlappingGroups(v));
            }
            owner[v] = Some(i);
        }
    }
    let mut old_to_new = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if owner[v].is_none() {
            old_to_new[v] = next;
            next += 1;
        }
    }
    let mut group_vertex = vec![None; groups.len()];
    for (i, group) in groups.iter().enumerate() {
        if !group.is_empty() {
            group_vertex[i] = Some(next);
            next += 1;
        }
    }
    for v in 0..n {
        if let Some(i) = owner[v] {
            old_to_new[v] = group_vertex[i].expect("non-empty group");
        }
    }
    let edges: BTreeSet<_> = g
        .edges()
        .iter()
        .map(|&(u, v)| (old_to_new[u], old_to_new[v]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    Ok(Identified {
        graph: Graph::from_sorted_edges(next, edges.into_iter().collect()),
        group_vertex,
        old_to_new,
    })
}

/// Bypasses `u`: every component of `g[u]` turns its external neighborhood
/// into a clique, then `u` loses all its edges. Ids are kept, so the vertices
/// of `u` remain as isolated vertices.
pub fn bypass(g: &Graph, u: &VertexSet) -> Graph {
    let mask = u.mask(g.n());
    bypass_mask(g, &mask)
}

pub(crate) fn bypass_mask(g: &Graph, u: &[bool]) -> Graph {
    let mut edges: BTreeSet<(Vertex, Vertex)> =
        g.edges().iter().copied().filter(|&(a, b)| !u[a] && !u[b]).collect();
    for comp in components_mask(g, u) {
        let mut outside = BTreeSet::new();
        for &v in &comp {
            for &w in g.neighbors(v) {
                if !u[w] {
                    outside.insert(w);
                }
            }
        }
        let outside: Vec<_> = outside.into_iter().collect();
        for (i, &a) in outside.iter().enumerate() {
            for &b in &outside[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    Graph::from_sorted_edges(g.n(), edges.into_iter().collect())
}

/// Bypass of a single vertex.
pub(crate) fn bypass_vertex(g: &Graph, v: Vertex) -> Graph {
    let nbrs = g.neighbors(v);
    let mut edges: BTreeSet<(Vertex, Vertex)> =
        g.edges().iter().copied().filter(|&(a, b)| a != v && b != v).collect();
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            edges.insert((a, b));
        }
    }
    Graph::from_sorted_edges(g.n(), edges.into_iter().collect())
}
