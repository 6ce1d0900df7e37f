//! Simple undirected graphs over dense vertex ids, vertex sets and 2-colorings.

pub(crate) mod io;
pub(crate) mod transform;

pub use io::{parse_vertex_list, ParseError};
pub use transform::{bypass, identify_sets, Identified};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type Edge = (Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("groups overlap in vertex {0}")]
    OverlappingGroups(Vertex),
    #[error("colorings disagree on vertex {0}")]
    ColoringConflict(Vertex),
    #[error("vertex {0} is assigned to more than one part")]
    NotAPartition(Vertex),
    #[error("vertex {0} is not assigned to any part")]
    Unassigned(Vertex),
}

/// An ordered set of vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: Vertex) -> Self {
        Self(BTreeSet::from([v]))
    }

    /// Builds the set of indices whose flag is true.
    pub fn from_mask(mask: &[bool]) -> Self {
        mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        self.0.remove(&v)
    }

    pub fn extend_from(&mut self, other: &VertexSet) {
        self.0.extend(other.iter().copied());
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.0.difference(&other.0).copied().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.0.iter().copied().collect()
    }

    /// Indicator vector of length `n`; members `>= n` are ignored.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in self.0.range(..n) {
            mask[v] = true;
        }
        mask
    }
}

impl Deref for VertexSet {
    type Target = BTreeSet<Vertex>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl IntoIterator for VertexSet {
    type Item = Vertex;
    type IntoIter = std::collections::btree_set::IntoIter<Vertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Vertex;
    type IntoIter = std::collections::btree_set::Iter<'a, Vertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(vs: [Vertex; N]) -> Self {
        vs.into_iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Undirected simple graph on the vertex ids `0..n`.
///
/// Adjacency lists are sorted and the edge list holds every edge once as
/// `(u, v)` with `u < v`, in lexicographic order. Edge indices refer to
/// positions in that list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_sorted_edges(n, set.into_iter().collect()))
    }

    /// `edges` must be sorted, deduplicated, in range and normalized.
    pub(crate) fn from_sorted_edges(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { adj, edges }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    pub fn all_vertices(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// Vertices with at least one incident edge.
    pub fn live_vertices(&self) -> VertexSet {
        self.vertices().filter(|&v| self.degree(v) > 0).collect()
    }

    /// Open neighborhood `N(set) \ set`.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new();
        for &v in set {
            for &u in &self.adj[v] {
                if !set.contains(&u) {
                    out.insert(u);
                }
            }
        }
        out
    }

    /// Same id space with every vertex of `removed` made isolated.
    pub fn without(&self, removed: &VertexSet) -> Graph {
        let mask = removed.mask(self.n());
        self.without_mask(&mask)
    }

    pub(crate) fn without_mask(&self, removed: &[bool]) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| !removed[u] && !removed[v])
            .collect();
        Self::from_sorted_edges(self.n(), edges)
    }

    /// Same id space keeping only the edges inside `scope`.
    pub fn induced(&self, scope: &VertexSet) -> Graph {
        let mask = scope.mask(self.n());
        let edges = self.edges.iter().copied().filter(|&(u, v)| mask[u] && mask[v]).collect();
        Self::from_sorted_edges(self.n(), edges)
    }

    /// Returns a copy with `extra` isolated vertices appended.
    pub fn with_extra_vertices(&self, extra: usize) -> Graph {
        let mut adj = self.adj.clone();
        adj.resize(self.n() + extra, Vec::new());
        Self { adj, edges: self.edges.clone() }
    }

    pub(crate) fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n() > 64 {
            return None;
        }
        Some(
            self.adj
                .iter()
                .map(|list| list.iter().fold(0u64, |acc, &u| acc | (1u64 << u)))
                .collect(),
        )
    }
}

/// Partial assignment of sides 0/1 to vertices of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwoColoring {
    sides: Vec<Option<u8>>,
}

impl TwoColoring {
    pub fn new(n: usize) -> Self {
        Self { sides: vec![None; n] }
    }

    pub fn get(&self, v: Vertex) -> Option<u8> {
        self.sides.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: Vertex, side: u8) {
        debug_assert!(side <= 1);
        if v >= self.sides.len() {
            self.sides.resize(v + 1, None);
        }
        self.sides[v] = Some(side);
    }

    pub fn domain(&self) -> VertexSet {
        self.sides.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(v, _)| v).collect()
    }

    pub fn restricted(&self, scope: &VertexSet) -> TwoColoring {
        let mut out = TwoColoring::new(self.sides.len());
        for &v in scope {
            if let Some(side) = self.get(v) {
                out.set(v, side);
            }
        }
        out
    }

    /// True if every vertex of `scope` is colored and no edge inside `scope`
    /// is monochromatic.
    pub fn is_proper_on(&self, g: &Graph, scope: &VertexSet) -> bool {
        if scope.iter().any(|&v| self.get(v).is_none()) {
            return false;
        }
        g.edges()
            .iter()
            .filter(|(u, v)| scope.contains(u) && scope.contains(v))
            .all(|&(u, v)| self.get(u) != self.get(v))
    }
}

/// Odd closed cycle given as its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddCycle(pub Vec<Vertex>);

/// Colors `g[scope]` properly or returns an odd cycle inside `scope`.
///
/// BFS from the smallest uncolored vertex of each component, side 0 first.
pub fn two_coloring(g: &Graph, scope: &VertexSet) -> Result<TwoColoring, OddCycle> {
    let mask = scope.mask(g.n());
    two_coloring_mask(g, &mask)
}

pub(crate) fn two_coloring_mask(g: &Graph, scope: &[bool]) -> Result<TwoColoring, OddCycle> {
    let n = g.n();
    let mut coloring = TwoColoring::new(n);
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if !scope[root] || coloring.get(root).is_some() {
            continue;
        }
        coloring.set(root, 0);
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            let side = coloring.get(v).unwrap_or(0);
            for &u in g.neighbors(v) {
                if !scope[u] {
                    continue;
                }
                match coloring.get(u) {
                    None => {
                        coloring.set(u, 1 - side);
                        parent[u] = v;
                        depth[u] = depth[v] + 1;
                        queue.push_back(u);
                    }
                    Some(s) if s == side => {
                        return Err(odd_cycle_from_tree(&parent, &depth, v, u));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(coloring)
}

fn odd_cycle_from_tree(parent: &[usize], depth: &[usize], a: Vertex, b: Vertex) -> OddCycle {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x];
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y];
        right.push(y);
    }
    while x != y {
        x = parent[x];
        y = parent[y];
        left.push(x);
        right.push(y);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    OddCycle(left)
}

pub fn is_bipartite(g: &Graph, scope: &VertexSet) -> bool {
    two_coloring(g, scope).is_ok()
}

/// Union of two colorings that agree on their common domain `v0`.
pub fn combine_colorings(
    left: &TwoColoring,
    right: &TwoColoring,
    v0: &VertexSet,
) -> Result<TwoColoring, GraphError> {
    for &v in v0 {
        if left.get(v) != right.get(v) {
            return Err(GraphError::ColoringConflict(v));
        }
    }
    let mut out = left.clone();
    for v in right.domain() {
        match (left.get(v), right.get(v)) {
            (Some(a), Some(b)) if a != b => return Err(GraphError::ColoringConflict(v)),
            (_, Some(b)) => out.set(v, b),
            _ => {}
        }
    }
    Ok(out)
}

/// Connected components of `g[scope]`, ordered by their smallest vertex.
pub fn components(g: &Graph, scope: &VertexSet) -> Vec<VertexSet> {
    components_mask(g, &scope.mask(g.n()))
}

pub(crate) fn components_mask(g: &Graph, scope: &[bool]) -> Vec<VertexSet> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for root in 0..n {
        if !scope[root] || seen[root] {
            continue;
        }
        let mut comp = VertexSet::new();
        seen[root] = true;
        stack.push(root);
        while let Some(v) = stack.pop() {
            comp.insert(v);
            for &u in g.neighbors(v) {
                if scope[u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// A 3-way split of the vertex set into a bipartite part, a cut part and the rest.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition3 {
    pub bipartite: VertexSet,
    pub cut: VertexSet,
    pub rest: VertexSet,
}

impl Partition3 {
    pub fn new(bipartite: VertexSet, cut: VertexSet, rest: VertexSet) -> Self {
        Self { bipartite, cut, rest }
    }

    /// Checks that the three parts are disjoint and cover `0..n`.
    pub fn check_covers(&self, n: usize) -> Result<(), GraphError> {
        let mut seen = vec![false; n];
        for part in [&self.bipartite, &self.cut, &self.rest] {
            for &v in part {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
                if seen[v] {
                    return Err(GraphError::NotAPartition(v));
                }
                seen[v] = true;
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(v) => Err(GraphError::Unassigned(v)),
            None => Ok(()),
        }
    }
}

/// Bitmask bipartiteness test for graphs with at most 64 vertices.
pub(crate) fn bipartite_mask(adj: &[u64], alive: u64) -> bool {
    let mut unvisited = alive;
    while unvisited != 0 {
        let root = unvisited.trailing_zeros() as usize;
        let mut sides = [1u64 << root, 0u64];
        let mut frontier = [1u64 << root, 0u64];
        let mut turn = 0;
        while frontier[0] | frontier[1] != 0 {
            let mut reached = 0u64;
            let mut bits = frontier[turn];
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                reached |= adj[v];
            }
            reached &= alive;
            if reached & sides[turn] != 0 {
                return false;
            }
            frontier[turn] = 0;
            let other = 1 - turn;
            frontier[other] |= reached & !sides[other];
            sides[other] |= reached;
            turn = other;
        }
        unvisited &= !(sides[0] | sides[1]);
    }
    true
}

/// Vertices reachable from `start` inside `alive` (bitmask flood fill).
pub(crate) fn flood_mask(adj: &[u64], alive: u64, start: u64) -> u64 {
    let mut reached = start & alive;
    let mut frontier = reached;
    while frontier != 0 {
        let mut next = 0u64;
        let mut bits = frontier;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            next |= adj[v];
        }
        next &= alive & !reached;
        reached |= next;
        frontier = next;
    }
    reached
}
