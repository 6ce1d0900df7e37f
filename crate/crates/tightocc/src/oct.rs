//! Exact odd cycle transversal solvers.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bipartite_mask, two_coloring_mask, Graph, TwoColoring, Vertex, VertexSet};
use crate::separators::VertexFlow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OctError {
    #[error("no odd cycle transversal of size at most {0}")]
    BudgetExceeded(usize),
    #[error("brute force handles at most 64 vertices, got {0}")]
    TooLarge(usize),
    #[error("the deleted set is not an odd cycle transversal")]
    NotATransversal,
    #[error("the sides do not partition the transversal")]
    NotASplit,
    #[error("vertices {0} and {1} lie on the same side but are adjacent")]
    SideNotIndependent(Vertex, Vertex),
    #[error("coloring is not proper on the remaining graph")]
    ImproperColoring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OctSolution {
    pub size: usize,
    pub solution: VertexSet,
}

impl OctSolution {
    fn from_vec(mut vs: Vec<Vertex>) -> Self {
        vs.sort_unstable();
        Self { size: vs.len(), solution: vs.into_iter().collect() }
    }
}

/// Terminal sets of the compression step: vertices of `g - w` that must
/// end up on the side opposite to their current color (`A`) and those that
/// must keep it (`R`), given the split of `w` into `w0` and `w1`.
pub fn ar_sets(
    g: &Graph,
    w: &VertexSet,
    w0: &VertexSet,
    w1: &VertexSet,
    c: &TwoColoring,
) -> Result<(VertexSet, VertexSet), OctError> {
    if !w0.is_disjoint(w1) || w0.union(w1) != *w {
        return Err(OctError::NotASplit);
    }
    for side in [w0, w1] {
        for &(u, v) in g.edges() {
            if side.contains(&u) && side.contains(&v) {
                return Err(OctError::SideNotIndependent(u, v));
            }
        }
    }
    let rest = g.all_vertices().difference(w);
    if !c.is_proper_on(g, &rest) {
        return Err(if crate::graph::is_bipartite(g, &rest) {
            OctError::ImproperColoring
        } else {
            OctError::NotATransversal
        });
    }
    let mut in_w = vec![None; g.n()];
    for &v in w0 {
        in_w[v] = Some(0u8);
    }
    for &v in w1 {
        in_w[v] = Some(1u8);
    }
    let alive: Vec<bool> = (0..g.n()).map(|v| in_w[v].is_none()).collect();
    Ok(ar_sets_raw(g, &alive, &in_w, c))
}

/// A vertex `u` outside `w` adjacent to `x ∈ w_i` must take side `1 - i`.
/// It lands in `A` when that differs from `c(u)` and in `R` otherwise.
fn ar_sets_raw(
    g: &Graph,
    alive: &[bool],
    in_w: &[Option<u8>],
    c: &TwoColoring,
) -> (VertexSet, VertexSet) {
    let mut a = VertexSet::new();
    let mut r = VertexSet::new();
    for u in 0..g.n() {
        if !alive[u] {
            continue;
        }
        let Some(cu) = c.get(u) else { continue };
        for &x in g.neighbors(u) {
            if let Some(i) = in_w[x] {
                if cu == i {
                    a.insert(u);
                } else {
                    r.insert(u);
                }
            }
        }
    }
    (a, r)
}

/// Minimum OCT by exhaustive search over sets of increasing size; the
/// first hit in lexicographic order is returned.
pub fn oct_brute(g: &Graph, ub: Option<usize>) -> Result<OctSolution, OctError> {
    let n = g.n();
    let adj = g.adjacency_masks().ok_or(OctError::TooLarge(n))?;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // degree <= 1 vertices never lie on a cycle, so no minimum OCT uses them
    let candidates: Vec<Vertex> = (0..n).filter(|&v| g.degree(v) >= 2).collect();
    let limit = ub.unwrap_or(candidates.len()).min(candidates.len());
    for size in 0..=limit {
        for combo in candidates.iter().combinations(size) {
            let removed = combo.iter().fold(0u64, |m, &&v| m | 1 << v);
            if bipartite_mask(&adj, all & !removed) {
                return Ok(OctSolution::from_vec(combo.into_iter().copied().collect()));
            }
        }
    }
    Err(OctError::BudgetExceeded(limit))
}

/// Every minimum OCT of `g`, in lexicographic order.
pub fn oct_brute_all(g: &Graph) -> Result<Vec<VertexSet>, OctError> {
    let best = oct_brute(g, None)?;
    let adj = g.adjacency_masks().ok_or(OctError::TooLarge(g.n()))?;
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let candidates: Vec<Vertex> = (0..g.n()).filter(|&v| g.degree(v) >= 2).collect();
    Ok(candidates
        .iter()
        .combinations(best.size)
        .filter(|combo| {
            let removed = combo.iter().fold(0u64, |m, &&v| m | 1 << v);
            bipartite_mask(&adj, all & !removed)
        })
        .map(|combo| combo.into_iter().copied().collect())
        .collect())
}

/// OCT of size at most `k` by iterative compression, or `None` if
/// `oct(g) > k`. The returned set is a minimum OCT of `g`.
pub fn oct_compress(g: &Graph, k: usize) -> Option<OctSolution> {
    compress_run(g, Some(k))
}

/// Minimum OCT by iterative compression without a size bound.
pub fn oct_exact(g: &Graph) -> OctSolution {
    compress_run(g, None).expect("unbounded compression always succeeds")
}

/// Size of a minimum OCT of `g[scope]`.
pub fn oct_of_induced(g: &Graph, scope: &VertexSet) -> usize {
    oct_exact(&g.induced(scope)).size
}

/// True iff `s` is contained in some minimum OCT of `g`.
pub fn is_subset_of_optimal(g: &Graph, s: &VertexSet) -> bool {
    oct_exact(g).size == oct_exact(&g.without(s)).size + s.len()
}

fn compress_run(g: &Graph, limit: Option<usize>) -> Option<OctSolution> {
    let n = g.n();
    let mut present = vec![false; n];
    let mut sol: Vec<Vertex> = Vec::new();
    let mut scratch = vec![false; n];
    for v in 0..n {
        present[v] = true;
        if g.degree(v) == 0 {
            continue;
        }
        scratch.copy_from_slice(&present);
        for &s in &sol {
            scratch[s] = false;
        }
        if two_coloring_mask(g, &scratch).is_ok() {
            continue;
        }
        let mut w = sol.clone();
        w.push(v);
        match compress(g, &present, &w) {
            Some(better) => sol = better,
            None => {
                sol = w;
                if limit.is_some_and(|k| sol.len() > k) {
                    return None;
                }
            }
        }
    }
    Some(OctSolution::from_vec(sol))
}

/// Smallest OCT of `g[present]` of size below `|w|`, given the OCT `w`.
/// Ties are broken lexicographically.
fn compress(g: &Graph, present: &[bool], w: &[Vertex]) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut alive = present.to_vec();
    for &x in w {
        alive[x] = false;
    }
    let coloring = two_coloring_mask(g, &alive).expect("w is an OCT");
    let heavy = vec![false; n];
    let mut best: Option<Vec<Vertex>> = None;
    let target = w.len() - 1;
    let mut in_w: Vec<Option<u8>> = vec![None; n];
    let k = w.len();
    let mut assignment = vec![0u8; k];
    // assignments ordered by number of deleted vertices; the first kept
    // vertex goes to side 0 since swapping sides changes nothing
    for deleted in 0..=target {
        if best.as_ref().is_some_and(|b| b.len() <= deleted) {
            break;
        }
        for del in (0..k).combinations(deleted) {
            let kept: Vec<usize> = (0..k).filter(|i| !del.contains(i)).collect();
            let sides = kept.len();
            let splits = if sides == 0 { 1 } else { 1usize << (sides - 1) };
            for bits in 0..splits {
                for (j, &i) in kept.iter().enumerate() {
                    assignment[i] = if j == 0 { 0 } else { ((bits >> (j - 1)) & 1) as u8 };
                }
                for &i in &del {
                    assignment[i] = 2;
                }
                if !sides_independent(g, w, &assignment) {
                    continue;
                }
                for (i, &x) in w.iter().enumerate() {
                    in_w[x] = (assignment[i] < 2).then_some(assignment[i]);
                }
                let (a, r) = ar_sets_raw(g, &alive, &in_w, &coloring);
                for &x in w {
                    in_w[x] = None;
                }
                let room = best.as_ref().map_or(target, |b| b.len()) - deleted;
                let mut candidate = match cut_between(g, &alive, &heavy, &a, &r, room) {
                    Some(cut) => cut,
                    None => continue,
                };
                candidate.extend(del.iter().map(|&i| w[i]));
                candidate.sort_unstable();
                let better = match &best {
                    None => true,
                    Some(b) => (candidate.len(), &candidate) < (b.len(), b),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }
    best
}

fn sides_independent(g: &Graph, w: &[Vertex], assignment: &[u8]) -> bool {
    for i in 0..w.len() {
        if assignment[i] == 2 {
            continue;
        }
        for j in i + 1..w.len() {
            if assignment[j] == assignment[i] && g.has_edge(w[i], w[j]) {
                return false;
            }
        }
    }
    true
}

/// Minimum vertex cut separating `a` from `r` inside `alive`, if its size is
/// at most `room`. Shared vertices are cut outright.
fn cut_between(
    g: &Graph,
    alive: &[bool],
    heavy: &[bool],
    a: &VertexSet,
    r: &VertexSet,
    room: usize,
) -> Option<Vec<Vertex>> {
    let forced = a.intersection(r);
    if forced.len() > room {
        return None;
    }
    let mut open = alive.to_vec();
    for &v in &forced {
        open[v] = false;
    }
    let mut net = VertexFlow::new(g, &open, heavy);
    for &v in a.difference(&forced).iter() {
        net.attach_source(v);
    }
    for &v in r.difference(&forced).iter() {
        net.attach_sink(v);
    }
    let value = net.max_flow(room - forced.len());
    if value > room - forced.len() {
        return None;
    }
    let mut cut = net.min_cut().to_vec();
    cut.extend(forced.iter().copied());
    Some(cut)
}
