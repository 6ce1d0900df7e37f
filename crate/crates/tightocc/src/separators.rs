//! Vertex separators and restricted multiway cuts.

use std::collections::VecDeque;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{flood_mask, Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparatorError {
    #[error("vertex {0} belongs to more than one part")]
    OverlappingParts(Vertex),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("the brute force backend handles at most 64 vertices, got {0}")]
    TooLarge(usize),
}

/// Partition of a terminal set `T` into a free class `t0`, the classes
/// `parts` that must be pairwise separated and a deleted class `tx`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedPartition {
    pub t0: VertexSet,
    pub parts: Vec<VertexSet>,
    pub tx: VertexSet,
}

impl GeneralizedPartition {
    pub fn terminals(&self) -> VertexSet {
        let mut all = self.t0.union(&self.tx);
        for p in &self.parts {
            all.extend_from(p);
        }
        all
    }
}

/// Minimum separator with a certificate of optimality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorResult {
    pub cut: VertexSet,
    /// Vertex-disjoint paths, one per cut vertex.
    pub witness_paths: Vec<Vec<Vertex>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiwayCut {
    pub size: usize,
    pub cut: VertexSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RmwcBackend {
    /// Brute force on graphs with at most 20 vertices, branching otherwise.
    #[default]
    Auto,
    Branching,
    Brute,
}

pub(crate) const INF: i64 = i64::MAX / 4;

/// Unit vertex capacity flow network with the split-vertex construction.
/// Node `2v` is the in-copy of `v`, `2v+1` its out-copy.
pub(crate) struct VertexFlow {
    n: usize,
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    flow: Vec<i64>,
}

impl VertexFlow {
    /// `alive` vertices take part; `heavy` vertices cannot be cut.
    pub(crate) fn new(g: &Graph, alive: &[bool], heavy: &[bool]) -> Self {
        let n = g.n();
        let mut net = Self {
            n,
            head: vec![Vec::new(); 2 * n + 2],
            to: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
        };
        for v in 0..n {
            if alive[v] {
                net.arc(2 * v, 2 * v + 1, if heavy[v] { INF } else { 1 });
            }
        }
        for &(u, v) in g.edges() {
            if alive[u] && alive[v] {
                net.arc(2 * u + 1, 2 * v, INF);
                net.arc(2 * v + 1, 2 * u, INF);
            }
        }
        net
    }

    fn source(&self) -> usize {
        2 * self.n
    }

    fn sink(&self) -> usize {
        2 * self.n + 1
    }

    fn arc(&mut self, a: usize, b: usize, cap: i64) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(cap);
        self.flow.push(0);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
        self.flow.push(0);
    }

    pub(crate) fn attach_source(&mut self, v: Vertex) {
        let s = self.source();
        self.arc(s, 2 * v, INF);
    }

    pub(crate) fn attach_sink(&mut self, v: Vertex) {
        let t = self.sink();
        self.arc(2 * v + 1, t, INF);
    }

    /// Augments until the flow exceeds `limit` or no path remains.
    /// Returns the flow value, saturating at `limit + 1`.
    pub(crate) fn max_flow(&mut self, limit: usize) -> usize {
        let (s, t) = (self.source(), self.sink());
        let mut total = 0usize;
        let mut pred = vec![usize::MAX; self.head.len()];
        loop {
            if total > limit {
                return total;
            }
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut found = false;
            while let Some(x) = queue.pop_front() {
                for &e in &self.head[x] {
                    let y = self.to[e];
                    if y != s && pred[y] == usize::MAX && self.cap[e] - self.flow[e] > 0 {
                        pred[y] = e;
                        if y == t {
                            found = true;
                            break;
                        }
                        queue.push_back(y);
                    }
                }
                if found {
                    break;
                }
            }
            if !found {
                return total;
            }
            let mut bottleneck = INF;
            let mut y = t;
            while y != s {
                let e = pred[y];
                bottleneck = bottleneck.min(self.cap[e] - self.flow[e]);
                y = self.to[e ^ 1];
            }
            if bottleneck >= INF {
                return limit + 1;
            }
            let mut y = t;
            while y != s {
                let e = pred[y];
                self.flow[e] += bottleneck;
                self.flow[e ^ 1] -= bottleneck;
                y = self.to[e ^ 1];
            }
            total += bottleneck as usize;
        }
    }

    /// Vertices whose in-copy is residually reachable from the source but
    /// whose out-copy is not. After a maximum flow this is a minimum cut.
    pub(crate) fn min_cut(&self) -> VertexSet {
        let s = self.source();
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &e in &self.head[x] {
                let y = self.to[e];
                if !seen[y] && self.cap[e] - self.flow[e] > 0 {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.n).filter(|&v| seen[2 * v] && !seen[2 * v + 1]).collect()
    }

    /// Decomposes the current flow into vertex sequences.
    pub(crate) fn paths(&self) -> Vec<Vec<Vertex>> {
        let (s, t) = (self.source(), self.sink());
        let mut residual_flow = self.flow.clone();
        let mut out = Vec::new();
        loop {
            let mut path = Vec::new();
            let mut x = s;
            let mut advanced = true;
            while x != t && advanced {
                advanced = false;
                for &e in &self.head[x] {
                    if e % 2 == 0 && residual_flow[e] > 0 {
                        residual_flow[e] -= 1;
                        let y = self.to[e];
                        if y < 2 * self.n && y % 2 == 1 {
                            path.push(y / 2);
                        }
                        x = y;
                        advanced = true;
                        break;
                    }
                }
            }
            if x != t {
                return out;
            }
            out.push(path);
        }
    }
}

/// Minimum vertex set whose removal leaves no component meeting both `a`
/// and `b`. Vertices of `a ∩ b` are always part of the cut.
pub fn min_vertex_separator(g: &Graph, a: &VertexSet, b: &VertexSet) -> SeparatorResult {
    let n = g.n();
    let forced = a.intersection(b);
    let mut alive = vec![true; n];
    for &v in &forced {
        alive[v] = false;
    }
    let heavy = vec![false; n];
    let mut net = VertexFlow::new(g, &alive, &heavy);
    for &v in a.difference(&forced).iter() {
        net.attach_source(v);
    }
    for &v in b.difference(&forced).iter() {
        net.attach_sink(v);
    }
    net.max_flow(n);
    let mut cut = net.min_cut();
    cut.extend_from(&forced);
    let mut witness_paths: Vec<Vec<Vertex>> = forced.iter().map(|&v| vec![v]).collect();
    witness_paths.extend(net.paths());
    SeparatorResult { cut, witness_paths }
}

/// Size of a minimum separator between `a` and `b` in `g[alive]`, where
/// `heavy` vertices cannot be deleted, or `None` if it exceeds `limit`.
/// `a` and `b` are assumed disjoint.
pub(crate) fn separator_size(
    g: &Graph,
    alive: &[bool],
    heavy: &[bool],
    a: &[Vertex],
    b: &[Vertex],
    limit: usize,
) -> Option<(usize, VertexFlow)> {
    let mut net = VertexFlow::new(g, alive, heavy);
    for &v in a {
        net.attach_source(v);
    }
    for &v in b {
        net.attach_sink(v);
    }
    let value = net.max_flow(limit);
    (value <= limit).then_some((value, net))
}

/// Minimum vertex set separating the three sets pairwise. Vertices in two
/// or more sets are always cut.
pub fn min_arn_separator(
    g: &Graph,
    a: &VertexSet,
    r: &VertexSet,
    n_set: &VertexSet,
) -> SeparatorResult {
    let sets = [a, r, n_set];
    let mut forced = VertexSet::new();
    for i in 0..3 {
        for j in i + 1..3 {
            forced.extend_from(&sets[i].intersection(sets[j]));
        }
    }
    let base = g.without(&forced);
    let mut edges: Vec<(Vertex, Vertex)> = base.edges().to_vec();
    let mut parts = vec![VertexSet::new(); 3];
    let mut next = g.n();
    let mut terminal_count = 0;
    for (i, set) in sets.iter().enumerate() {
        for &v in set.difference(&forced).iter() {
            edges.push((v, next));
            parts[i].insert(next);
            next += 1;
            terminal_count += 1;
        }
    }
    let aux = Graph::from_edges(next, edges).expect("pendant construction stays in range");
    let found = restricted_multiway_cut_with(&aux, &parts, terminal_count, RmwcBackend::Branching)
        .expect("parts are disjoint by construction")
        .expect("deleting all terminals is always feasible");
    let mut cut = found.cut;
    cut.extend_from(&forced);
    let witness_paths = forced.iter().map(|&v| vec![v]).collect();
    SeparatorResult { cut, witness_paths }
}

/// Minimum restricted multiway cut of `parts` of size at most `budget`.
pub fn restricted_multiway_cut(
    g: &Graph,
    parts: &[VertexSet],
    budget: usize,
) -> Result<Option<MultiwayCut>, SeparatorError> {
    restricted_multiway_cut_with(g, parts, budget, RmwcBackend::Auto)
}

pub fn restricted_multiway_cut_with(
    g: &Graph,
    parts: &[VertexSet],
    budget: usize,
    backend: RmwcBackend,
) -> Result<Option<MultiwayCut>, SeparatorError> {
    let n = g.n();
    let mut label = vec![None; n];
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            if v >= n {
                return Err(SeparatorError::VertexOutOfRange { vertex: v, n });
            }
            if label[v].is_some() {
                return Err(SeparatorError::OverlappingParts(v));
            }
            label[v] = Some(i);
        }
    }
    let alive = vec![true; n];
    let use_brute = match backend {
        RmwcBackend::Brute => true,
        RmwcBackend::Branching => false,
        RmwcBackend::Auto => n <= 20,
    };
    let cut = if use_brute {
        if n > 64 {
            return Err(SeparatorError::TooLarge(n));
        }
        rmwc_brute(g, &alive, &label, budget)
    } else {
        rmwc_branching(g, &alive, &label, budget)
    };
    Ok(cut.map(|cut| MultiwayCut { size: cut.len(), cut }))
}

/// Restricted multiway cut on `g - tx` for the classes of `gp`.
pub fn generalized_rmwc(
    g: &Graph,
    gp: &GeneralizedPartition,
    budget: usize,
) -> Result<Option<MultiwayCut>, SeparatorError> {
    let n = g.n();
    let mut seen = vec![false; n];
    for set in std::iter::once(&gp.t0).chain(&gp.parts).chain(std::iter::once(&gp.tx)) {
        for &v in set {
            if v >= n {
                return Err(SeparatorError::VertexOutOfRange { vertex: v, n });
            }
            if seen[v] {
                return Err(SeparatorError::OverlappingParts(v));
            }
            seen[v] = true;
        }
    }
    restricted_multiway_cut(&g.without(&gp.tx), &gp.parts, budget)
}

fn conflict_edge(g: &Graph, alive: &[bool], label: &[Option<usize>]) -> bool {
    g.edges().iter().any(|&(u, v)| {
        alive[u] && alive[v] && matches!((label[u], label[v]), (Some(a), Some(b)) if a != b)
    })
}

/// Exhaustive search over deletion sets by size, then lexicographically.
pub(crate) fn rmwc_brute(
    g: &Graph,
    alive: &[bool],
    label: &[Option<usize>],
    budget: usize,
) -> Option<VertexSet> {
    if conflict_edge(g, alive, label) {
        return None;
    }
    let adj = g.adjacency_masks().expect("at most 64 vertices");
    let alive_mask = alive.iter().enumerate().filter(|(_, &a)| a).fold(0u64, |m, (v, _)| m | 1 << v);
    let parts = label.iter().flatten().copied().max().map_or(0, |m| m + 1);
    let mut part_masks = vec![0u64; parts];
    for (v, l) in label.iter().enumerate() {
        if let (Some(i), true) = (l, alive[v]) {
            part_masks[*i] |= 1 << v;
        }
    }
    let terminals = part_masks.iter().fold(0, |m, p| m | p);
    let candidates: Vec<Vertex> = (0..g.n())
        .filter(|&v| alive[v] && label[v].is_none() && g.degree(v) > 0)
        .collect();
    let separated = |removed: u64| {
        let open = alive_mask & !removed;
        part_masks.iter().all(|&p| flood_mask(&adj, open, p) & terminals & !p == 0)
    };
    for size in 0..=budget.min(candidates.len()) {
        for combo in candidates.iter().combinations(size) {
            let removed = combo.iter().fold(0u64, |m, &&v| m | 1 << v);
            if separated(removed) {
                return Some(combo.into_iter().copied().collect());
            }
        }
    }
    None
}

/// Branch and bound: branch on the deletable inner vertices of a shortest
/// path between two parts, bounded by isolating cuts.
pub(crate) fn rmwc_branching(
    g: &Graph,
    alive: &[bool],
    label: &[Option<usize>],
    budget: usize,
) -> Option<VertexSet> {
    if conflict_edge(g, alive, label) {
        return None;
    }
    let mut search = Branching {
        g,
        alive: alive.to_vec(),
        label,
        heavy: label.iter().map(|l| l.is_some()).collect(),
        deleted: Vec::new(),
        best: None,
        bound: budget + 1,
    };
    search.run();
    search.best.map(|b| b.into_iter().collect())
}

struct Branching<'a> {
    g: &'a Graph,
    alive: Vec<bool>,
    label: &'a [Option<usize>],
    heavy: Vec<bool>,
    deleted: Vec<Vertex>,
    best: Option<Vec<Vertex>>,
    /// Only solutions strictly smaller than this are of interest.
    bound: usize,
}

impl Branching<'_> {
    fn record(&mut self, extra: &VertexSet) {
        let mut sol = self.deleted.clone();
        sol.extend(extra.iter().copied());
        sol.sort_unstable();
        if sol.len() < self.bound {
            self.bound = sol.len();
            self.best = Some(sol);
        }
    }

    /// Parts that share a component of the current graph with another part.
    fn active_parts(&self) -> Vec<usize> {
        let n = self.g.n();
        let mut seen = vec![false; n];
        let mut active = Vec::new();
        for root in 0..n {
            if seen[root] || !self.alive[root] {
                continue;
            }
            let mut stack = vec![root];
            seen[root] = true;
            let mut present = Vec::new();
            while let Some(v) = stack.pop() {
                if let Some(l) = self.label[v] {
                    if !present.contains(&l) {
                        present.push(l);
                    }
                }
                for &u in self.g.neighbors(v) {
                    if self.alive[u] && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            if present.len() > 1 {
                active.extend(present);
            }
        }
        active.sort_unstable();
        active.dedup();
        active
    }

    fn members(&self, part: usize) -> Vec<Vertex> {
        (0..self.g.n()).filter(|&v| self.alive[v] && self.label[v] == Some(part)).collect()
    }

    fn others(&self, part: usize) -> Vec<Vertex> {
        (0..self.g.n())
            .filter(|&v| self.alive[v] && matches!(self.label[v], Some(l) if l != part))
            .collect()
    }

    /// Shortest path between vertices of different parts, as inner vertices.
    fn conflict_path(&self) -> Option<Vec<Vertex>> {
        let n = self.g.n();
        let mut origin = vec![usize::MAX; n];
        let mut pred = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if self.alive[v] && self.label[v].is_some() {
                origin[v] = self.label[v].unwrap_or(0);
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in self.g.neighbors(v) {
                if !self.alive[u] {
                    continue;
                }
                if origin[u] == usize::MAX {
                    origin[u] = origin[v];
                    pred[u] = v;
                    queue.push_back(u);
                } else if origin[u] != origin[v] {
                    let mut inner = Vec::new();
                    for start in [v, u] {
                        let mut x = start;
                        let mut chain = Vec::new();
                        while self.label[x].is_none() {
                            chain.push(x);
                            x = pred[x];
                        }
                        if start == v {
                            chain.reverse();
                        }
                        inner.extend(chain);
                    }
                    return Some(inner);
                }
            }
        }
        None
    }

    fn run(&mut self) {
        let active = self.active_parts();
        if active.is_empty() {
            self.record(&VertexSet::new());
            return;
        }
        if self.deleted.len() + 1 >= self.bound {
            return;
        }
        let room = self.bound - 1 - self.deleted.len();
        if active.len() == 2 {
            let a = self.members(active[0]);
            let b = self.members(active[1]);
            if let Some((_, net)) = separator_size(self.g, &self.alive, &self.heavy, &a, &b, room) {
                self.record(&net.min_cut());
            }
            return;
        }
        // one deleted vertex may lie on the isolating cuts of every part, so
        // only the largest isolating cut bounds the remaining deletions
        for &p in &active {
            let a = self.members(p);
            let b = self.others(p);
            if separator_size(self.g, &self.alive, &self.heavy, &a, &b, room).is_none() {
                return;
            }
        }
        let Some(path) = self.conflict_path() else {
            return;
        };
        let free: Vec<Vertex> = path.into_iter().filter(|&v| !self.heavy[v]).collect();
        let mut frozen = Vec::new();
        for &x in &free {
            self.alive[x] = false;
            self.deleted.push(x);
            self.run();
            self.deleted.pop();
            self.alive[x] = true;
            if self.deleted.len() + 1 >= self.bound {
                break;
            }
            self.heavy[x] = true;
            frozen.push(x);
        }
        for x in frozen {
            self.heavy[x] = false;
        }
    }
}
