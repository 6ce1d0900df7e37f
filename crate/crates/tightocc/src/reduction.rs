//! Marking of the bipartite part and the parity preserving shrinking step.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::{canonical_partitions, cut_covering_set_for, LabelVector, TerminalLabel};
use crate::graph::{components, two_coloring, Graph, TwoColoring, Vertex, VertexSet};
use crate::occ::{validate_occ, Occ, OccViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid odd cycle cut: {0}")]
    InvalidOcc(#[from] OccViolation),
    #[error("cannot parse threshold `{0}`, expected `paper` or `custom:<c0>,<c1>,...`")]
    BadThreshold(String),
}

/// Threshold function `g_r` deciding when an odd cycle cut is reducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrMode {
    /// `(6(2^8 c + 1)^2 + 2^8 c) · x^16`.
    Paper,
    /// `max(floor, Σ coeffs[i] · x^i)`.
    Custom { coeffs: Vec<u64>, floor: u64 },
}

impl GrMode {
    /// Parses `paper` or `custom:<c0>,<c1>,...` (floor 4).
    pub fn parse(text: &str) -> Result<GrMode, ReductionError> {
        if text == "paper" {
            return Ok(GrMode::Paper);
        }
        let body = text.strip_prefix("custom:").ok_or_else(|| ReductionError::BadThreshold(text.into()))?;
        let coeffs = body
            .split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ReductionError::BadThreshold(text.into()))?;
        Ok(GrMode::Custom { coeffs, floor: 4 })
    }
}

/// How odd cycle cuts are searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiscoveryFamily {
    /// Colorings from an `(n, k + g_r(2k) + 1)`-universal set.
    UniversalSet,
    /// Every vertex set of size at most `k` as the head class.
    SmallHeads,
    /// Whichever of the two is smaller for the instance.
    #[default]
    Auto,
}

/// Which terminal partitions the marking step must cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CoveringScope {
    /// Every generalized 3-partition of the terminals.
    AllPartitions,
    /// The `4^|X_C|` partitions that arise from imposed separation problems.
    ImposedOnly,
    /// All partitions for at most six terminals, imposed ones beyond.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub covering_constant_c: u64,
    pub g_r_mode: GrMode,
    pub discovery: DiscoveryFamily,
    pub covering: CoveringScope,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            covering_constant_c: 1,
            g_r_mode: GrMode::Custom { coeffs: vec![0, 0, 1], floor: 4 },
            discovery: DiscoveryFamily::Auto,
            covering: CoveringScope::Auto,
        }
    }
}

impl ReductionConfig {
    pub fn paper(c: u64) -> Self {
        Self { covering_constant_c: c, g_r_mode: GrMode::Paper, ..Self::default() }
    }

    pub fn with_threshold(mode: GrMode) -> Self {
        Self { g_r_mode: mode, ..Self::default() }
    }

    /// `g_r(x)`, saturating.
    pub fn g_r(&self, x: u64) -> u64 {
        match &self.g_r_mode {
            GrMode::Paper => {
                let c8 = 256u64.saturating_mul(self.covering_constant_c);
                let base = (c8 + 1).saturating_mul(c8 + 1).saturating_mul(6).saturating_add(c8);
                base.saturating_mul(x.saturating_pow(16))
            }
            GrMode::Custom { coeffs, floor } => {
                let mut value = 0u64;
                for &c in coeffs.iter().rev() {
                    value = value.saturating_mul(x).saturating_add(c);
                }
                value.max(*floor)
            }
        }
    }

    /// `g(k, z) = 2 k z^2 g_r(2k)^2`, the size of the coloring universe the
    /// extraction step needs to be correct on.
    pub fn coloring_budget(&self, k: u64, z: u64) -> u64 {
        let gr = self.g_r(2 * k);
        2u64.saturating_mul(k).saturating_mul(z.saturating_mul(z)).saturating_mul(gr.saturating_mul(gr))
    }

    pub fn is_reducible(&self, occ: &Occ) -> bool {
        occ.bipartite().len() as u64 > self.g_r(occ.width() as u64)
    }
}

/// Output of [`mark_b_star`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub b_star: VertexSet,
    /// Proper 2-coloring of `G[X_B]` used to attach the terminals.
    pub f_x: TwoColoring,
}

/// Auxiliary graph of the marking step: a copy of `G[X_B]` on ids
/// `0..|X_B|` followed by the terminals `v^(0), v^(1)` of every head vertex.
pub struct MarkingGraph {
    pub graph: Graph,
    pub bipartite: Vec<Vertex>,
    pub terminals: VertexSet,
    pub f_x: TwoColoring,
}

pub fn marking_graph(g: &Graph, occ: &Occ) -> MarkingGraph {
    let bipartite = occ.bipartite().to_vec();
    let head = occ.head().to_vec();
    let f_x = two_coloring(g, occ.bipartite()).expect("bipartite part of a valid occ");
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in bipartite.iter().enumerate() {
        local[v] = i;
    }
    let b = bipartite.len();
    let mut edges = Vec::new();
    for &(u, v) in g.edges() {
        if local[u] != usize::MAX && local[v] != usize::MAX {
            edges.push((local[u], local[v]));
        }
    }
    for (i, &x) in head.iter().enumerate() {
        for &u in g.neighbors(x) {
            if local[u] != usize::MAX {
                let side = f_x.get(u).unwrap_or(0) as usize;
                edges.push((b + 2 * i + side, local[u]));
            }
        }
    }
    let n = b + 2 * head.len();
    let graph = Graph::from_edges(n, edges).expect("auxiliary ids are in range");
    MarkingGraph { graph, bipartite, terminals: (b..n).collect(), f_x }
}

/// The partitions `(A', R', N', T_X)` of the terminals that correspond to
/// the choices of `(C1, f_C, C2)`.
pub fn imposed_partitions(head_size: usize) -> Vec<LabelVector> {
    use TerminalLabel::{Deleted, Part};
    let options = [[Part(0), Part(1)], [Part(1), Part(0)], [Part(2), Part(2)], [Deleted, Deleted]];
    let mut out = vec![Vec::new()];
    for _ in 0..head_size {
        let mut next = Vec::with_capacity(out.len() * 4);
        for prefix in &out {
            for pair in &options {
                let mut labels = prefix.clone();
                labels.extend_from_slice(pair);
                next.push(labels);
            }
        }
        out = next;
    }
    out
}

pub fn mark_b_star(g: &Graph, occ: &Occ) -> Result<Marking, ReductionError> {
    mark_b_star_with(g, occ, CoveringScope::default())
}

/// Marks the vertices of `X_B` that the cut covering set of the auxiliary
/// graph keeps.
pub fn mark_b_star_with(
    g: &Graph,
    occ: &Occ,
    scope: CoveringScope,
) -> Result<Marking, ReductionError> {
    let occ = validate_occ(g, &occ.partition())?;
    let aux = marking_graph(g, &occ);
    let t = aux.terminals.len();
    let all = match scope {
        CoveringScope::AllPartitions => true,
        CoveringScope::ImposedOnly => false,
        CoveringScope::Auto => t <= 6,
    };
    let family = if all { canonical_partitions(t, 3) } else { imposed_partitions(occ.width()) };
    let z = cut_covering_set_for(&aux.graph, &aux.terminals, &family);
    let b_star = z.iter().filter(|&&v| v < aux.bipartite.len()).map(|&v| aux.bipartite[v]).collect();
    Ok(Marking { b_star, f_x: aux.f_x })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn code(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Sides of `N(x) ∩ H` for every component `H` of `g[interior]`, as a
/// bitmask per component: bit `s` when `x` has a neighbor on side `s`,
/// bit `2 + s` when it has two.
struct InteriorSides {
    coloring: TwoColoring,
    component_of: Vec<Option<usize>>,
    count: usize,
}

impl InteriorSides {
    fn new(g: &Graph, interior: &VertexSet) -> Self {
        // interior is bipartite when it comes from an odd cycle cut; otherwise
        // this falls back to coloring a spanning forest, which only widens
        // the set of reported connections
        let coloring = two_coloring(g, interior).unwrap_or_else(|_| forest_coloring(g, interior));
        let comps = components(g, interior);
        let mut component_of = vec![None; g.n()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                component_of[v] = Some(i);
            }
        }
        Self { coloring, component_of, count: comps.len() }
    }

    fn sides(&self, g: &Graph, x: Vertex) -> Vec<u8> {
        let mut out = vec![0u8; self.count];
        for &u in g.neighbors(x) {
            if let Some(c) = self.component_of[u] {
                let side = self.coloring.get(u).unwrap_or(0);
                if out[c] & 1 << side != 0 {
                    out[c] |= 4 << side;
                }
                out[c] |= 1 << side;
            }
        }
        out
    }
}

fn forest_coloring(g: &Graph, scope: &VertexSet) -> TwoColoring {
    let mut coloring = TwoColoring::new(g.n());
    for comp in components(g, scope) {
        let root = *comp.first().expect("non-empty");
        coloring.set(root, 0);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let side = coloring.get(v).unwrap_or(0);
            for &u in g.neighbors(v) {
                if comp.contains(&u) && coloring.get(u).is_none() {
                    coloring.set(u, 1 - side);
                    stack.push(u);
                }
            }
        }
    }
    coloring
}

/// For `u = v` a path is a cycle through `u`, so an even one needs two
/// neighbors on the same side.
fn connects(su: &[u8], sv: &[u8], p: Parity, same: bool) -> bool {
    su.iter().zip(sv).any(|(&a, &b)| match p {
        Parity::Even if same => a & 0b1100 != 0,
        Parity::Even => a & b & 0b11 != 0,
        Parity::Odd => (a & 1 != 0 && b & 2 != 0) || (a & 2 != 0 && b & 1 != 0),
    })
}

/// Whether some component of `g[interior]` carries a `(u, v)`-path of
/// parity `p` with at least one inner vertex.
pub fn parity_connection(g: &Graph, interior: &VertexSet, u: Vertex, v: Vertex, p: Parity) -> bool {
    let sides = InteriorSides::new(g, interior);
    connects(&sides.sides(g, u), &sides.sides(g, v), p, u == v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutcome {
    /// The reduced graph on ids `0..n + new`; removed vertices stay isolated.
    pub reduced: Graph,
    pub b_star: VertexSet,
    /// `X_B \ B*`.
    pub removed: VertexSet,
    pub replacement_paths: BTreeMap<(Vertex, Vertex, Parity), Vec<Vertex>>,
    /// Vertices shared by the input and the reduced graph.
    pub common_vertices: VertexSet,
}

impl ReductionOutcome {
    pub fn new_vertices(&self) -> VertexSet {
        self.replacement_paths.values().flatten().copied().collect()
    }

    /// Inner vertices of the replacement paths of `(u, v, p)` whose paths
    /// all meet `u` and `v` only at their ends.
    pub fn sidecar(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# b_star: {}", self.b_star);
        let _ = writeln!(out, "# removed: {}", self.removed);
        for ((u, v, p), ids) in &self.replacement_paths {
            let ids: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "q {u} {v} {} {}", p.code(), ids.join(" "));
        }
        out
    }
}

pub fn reduce_occ(g: &Graph, occ: &Occ) -> Result<ReductionOutcome, ReductionError> {
    reduce_occ_with(g, occ, &ReductionConfig::default())
}

/// Replaces `X_B \ B*` by short paths that keep every parity connection
/// between vertices of `X_C ∪ B*`.
pub fn reduce_occ_with(
    g: &Graph,
    occ: &Occ,
    cfg: &ReductionConfig,
) -> Result<ReductionOutcome, ReductionError> {
    let occ = validate_occ(g, &occ.partition())?;
    let marking = mark_b_star_with(g, &occ, cfg.covering)?;
    let removed = occ.bipartite().difference(&marking.b_star);
    let keep = occ.head().union(&marking.b_star).to_vec();
    let sides = InteriorSides::new(g, &removed);
    let keep_sides: Vec<Vec<u8>> = keep.iter().map(|&x| sides.sides(g, x)).collect();
    let mut edges: Vec<(Vertex, Vertex)> = g
        .edges()
        .iter()
        .copied()
        .filter(|(a, b)| !removed.contains(a) && !removed.contains(b))
        .collect();
    let mut next = g.n();
    let mut replacement_paths = BTreeMap::new();
    for (i, &u) in keep.iter().enumerate() {
        for (j, &v) in keep.iter().enumerate().skip(i) {
            for p in [Parity::Even, Parity::Odd] {
                if !connects(&keep_sides[i], &keep_sides[j], p, i == j) {
                    continue;
                }
                let ids: Vec<Vertex> = match p {
                    Parity::Even => {
                        let (x, x2) = (next, next + 1);
                        edges.extend([(u, x), (x, v), (u, x2), (x2, v)]);
                        vec![x, x2]
                    }
                    Parity::Odd => {
                        let (x, y, x2, y2) = (next, next + 1, next + 2, next + 3);
                        edges.extend([(u, x), (x, y), (y, v), (u, x2), (x2, y2), (y2, v)]);
                        vec![x, y, x2, y2]
                    }
                };
                next += ids.len();
                replacement_paths.insert((u, v, p), ids);
            }
        }
    }
    let edges = edges.into_iter().filter(|(a, b)| a != b);
    let reduced = Graph::from_edges(next, edges).expect("new ids are in range");
    let common_vertices = g.all_vertices().difference(&removed);
    Ok(ReductionOutcome { reduced, b_star: marking.b_star, removed, replacement_paths, common_vertices })
}

/// Number of vertices that carry at least one edge.
pub fn live_vertex_count(g: &Graph) -> usize {
    g.vertices().filter(|&v| g.degree(v) > 0).count()
}
