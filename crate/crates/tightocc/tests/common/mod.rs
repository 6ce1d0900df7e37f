//! Brute-force oracles shared by the integration tests. Everything here is
//! written against plain bitmasks and does not call the solvers under test.
#![allow(dead_code)]

use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tightocc::graph::{components, two_coloring, Graph, Partition3, TwoColoring, Vertex, VertexSet};
use tightocc::occ::{imposed_separation, validate_occ, ImposedSeparationInput, Occ};
use tightocc::reduction::{Parity, ReductionOutcome};

pub type Mask = u128;

pub fn bit(v: Vertex) -> Mask {
    1u128 << v
}

pub fn to_mask(set: &VertexSet) -> Mask {
    set.iter().fold(0, |m, &v| m | bit(v))
}

pub fn from_mask(mask: Mask) -> VertexSet {
    (0..128).filter(|&v| mask >> v & 1 == 1).collect()
}

pub fn adjacency(g: &Graph) -> Vec<Mask> {
    assert!(g.n() <= 128, "oracle handles at most 128 vertices");
    g.vertices().map(|v| g.neighbors(v).iter().fold(0, |m, &u| m | bit(u))).collect()
}

fn full(n: usize) -> Mask {
    if n == 128 {
        Mask::MAX
    } else {
        bit(n) - 1
    }
}

fn lowest(mask: Mask) -> Vertex {
    mask.trailing_zeros() as Vertex
}

pub fn neighbors_of(adj: &[Mask], set: Mask) -> Mask {
    let mut out = 0;
    let mut rest = set;
    while rest != 0 {
        let v = lowest(rest);
        rest &= rest - 1;
        out |= adj[v];
    }
    out
}

/// BFS layers of the component of `start` inside `alive`, split by parity.
pub fn layered(adj: &[Mask], alive: Mask, start: Vertex) -> (Mask, Mask) {
    let mut sides = [bit(start), 0];
    let mut seen = bit(start);
    let mut frontier = bit(start);
    let mut parity = 0;
    while frontier != 0 {
        let next = neighbors_of(adj, frontier) & alive & !seen;
        parity ^= 1;
        sides[parity] |= next;
        seen |= next;
        frontier = next;
    }
    (sides[0], sides[1])
}

fn independent(adj: &[Mask], set: Mask) -> bool {
    neighbors_of(adj, set) & set == 0
}

/// Component masks of `alive`.
pub fn component_masks(adj: &[Mask], alive: Mask) -> Vec<Mask> {
    let mut out = Vec::new();
    let mut rest = alive;
    while rest != 0 {
        let (a, b) = layered(adj, alive, lowest(rest));
        out.push(a | b);
        rest &= !(a | b);
    }
    out
}

pub fn bipartite_on(adj: &[Mask], alive: Mask) -> bool {
    let mut rest = alive;
    while rest != 0 {
        let (a, b) = layered(adj, alive, lowest(rest));
        if !independent(adj, a) || !independent(adj, b) {
            return false;
        }
        rest &= !(a | b);
    }
    true
}

/// Whether `alive` has a proper 2-coloring putting `zero` on side 0 and
/// `one` on side 1.
pub fn colorable_with(adj: &[Mask], alive: Mask, zero: Mask, one: Mask) -> bool {
    let mut rest = alive;
    while rest != 0 {
        let (a, b) = layered(adj, alive, lowest(rest));
        if !independent(adj, a) || !independent(adj, b) {
            return false;
        }
        let keep = zero & b == 0 && one & a == 0;
        let flip = zero & a == 0 && one & b == 0;
        if !keep && !flip {
            return false;
        }
        rest &= !(a | b);
    }
    true
}

/// True if no component of `alive \ x` meets two of the `sets`.
pub fn separates_all(adj: &[Mask], alive: Mask, x: Mask, sets: &[Mask]) -> bool {
    let open = alive & !x;
    component_masks(adj, open).into_iter().all(|c| sets.iter().filter(|&&s| s & c != 0).count() <= 1)
}

pub fn separates(g: &Graph, x: &VertexSet, sets: &[&VertexSet]) -> bool {
    let adj = adjacency(g);
    let masks: Vec<Mask> = sets.iter().map(|s| to_mask(s)).collect();
    separates_all(&adj, full(g.n()), to_mask(x), &masks)
}

/// Smallest `X ⊆ candidates` separating the sets pairwise in `g[alive]`.
pub fn min_separator_among(
    adj: &[Mask],
    alive: Mask,
    candidates: &[Vertex],
    sets: &[Mask],
    limit: usize,
) -> Option<VertexSet> {
    for size in 0..=limit.min(candidates.len()) {
        for combo in candidates.iter().combinations(size) {
            let x = combo.iter().fold(0, |m, &&v| m | bit(v));
            if separates_all(adj, alive, x, sets) {
                return Some(combo.into_iter().copied().collect());
            }
        }
    }
    None
}

/// Minimum size of a vertex set separating the sets pairwise; the set may
/// contain terminals.
pub fn min_separator_size(g: &Graph, sets: &[&VertexSet]) -> usize {
    let adj = adjacency(g);
    let masks: Vec<Mask> = sets.iter().map(|s| to_mask(s)).collect();
    let all: Vec<Vertex> = g.vertices().collect();
    min_separator_among(&adj, full(g.n()), &all, &masks, g.n()).expect("deleting everything works").len()
}

/// Minimum restricted multiway cut of `parts` in `g - deleted` with cut
/// vertices drawn from `allowed` (terminal parts excluded), at most `limit`.
pub fn rmwc_size(
    g: &Graph,
    parts: &[VertexSet],
    deleted: &VertexSet,
    allowed: Option<&VertexSet>,
    limit: usize,
) -> Option<usize> {
    let adj = adjacency(g);
    let alive = full(g.n()) & !to_mask(deleted);
    let part_masks: Vec<Mask> = parts.iter().map(|p| to_mask(p) & alive).collect();
    let terminals = part_masks.iter().fold(0, |m, p| m | p);
    let candidates: Vec<Vertex> = g
        .vertices()
        .filter(|&v| alive >> v & 1 == 1 && terminals >> v & 1 == 0)
        .filter(|v| allowed.is_none_or(|a| a.contains(v)))
        .collect();
    min_separator_among(&adj, alive, &candidates, &part_masks, limit).map(|s| s.len())
}

pub fn is_oct(g: &Graph, s: &VertexSet) -> bool {
    let adj = adjacency(g);
    bipartite_on(&adj, full(g.n()) & !to_mask(s))
}

/// Minimum OCT size. Vertices of degree below two never help, so only the
/// others are tried.
pub fn oct_size(g: &Graph) -> usize {
    min_octs(g, false).0
}

/// Minimum OCT size of `g[scope]`.
pub fn oct_size_of(g: &Graph, scope: &VertexSet) -> usize {
    oct_size(&g.induced(scope))
}

/// Minimum OCT size, with every minimum OCT when `all` is set.
pub fn min_octs(g: &Graph, all: bool) -> (usize, Vec<VertexSet>) {
    let adj = adjacency(g);
    let everything = full(g.n());
    let candidates: Vec<Vertex> = g.vertices().filter(|&v| g.degree(v) >= 2).collect();
    for size in 0..=candidates.len() {
        let mut found = Vec::new();
        for combo in candidates.iter().combinations(size) {
            let x = combo.iter().fold(0, |m, &&v| m | bit(v));
            if bipartite_on(&adj, everything & !x) {
                found.push(combo.into_iter().copied().collect());
                if !all {
                    break;
                }
            }
        }
        if !found.is_empty() {
            return (size, found);
        }
    }
    unreachable!("deleting every candidate leaves a forest")
}

pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let edges: Vec<(Vertex, Vertex)> =
        (0..n).tuple_combinations().filter(|_| rng.gen_bool(p)).collect();
    Graph::from_edges(n, edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Graph from a list of flags over the pairs of `0..n` in lexicographic order.
pub fn graph_from_flags(n: usize, flags: &[bool]) -> Graph {
    let edges = (0..n).tuple_combinations().zip(flags).filter(|(_, &f)| f).map(|(e, _)| e);
    Graph::from_edges(n, edges).unwrap()
}

/// Every labelled graph on `n` vertices.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(Vertex, Vertex)> = (0..n).tuple_combinations().collect();
    (0u64..1 << pairs.len()).map(move |code| {
        let edges = pairs.iter().enumerate().filter(|(i, _)| code >> i & 1 == 1).map(|(_, &e)| e);
        Graph::from_edges(n, edges).unwrap()
    })
}

pub fn arb_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        (Just(n), proptest::collection::vec(any::<bool>(), pairs))
            .prop_map(|(n, flags)| graph_from_flags(n, &flags))
    })
}

/// Graph with a density knob, so both sparse and dense cases show up.
pub fn arb_graph_dense(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi, 0.1f64..0.7, any::<u64>())
        .prop_map(|(n, p, seed)| random_graph(n, p, &mut rng(seed)))
}

/// Every odd cycle cut of `g`, by brute force over all 3-labellings.
pub fn all_occs(g: &Graph) -> Vec<Occ> {
    let n = g.n();
    let mut out = Vec::new();
    let mut labels = vec![0u8; n];
    loop {
        let pick = |t: u8| labels.iter().enumerate().filter(|(_, &l)| l == t).map(|(v, _)| v).collect();
        let p = Partition3::new(pick(0), pick(1), pick(2));
        if let Ok(occ) = validate_occ(g, &p) {
            out.push(occ);
        }
        let mut i = 0;
        while i < n && labels[i] == 2 {
            labels[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        labels[i] += 1;
    }
}

pub fn is_tight(g: &Graph, occ: &Occ) -> bool {
    oct_size_of(g, &occ.bipartite().union(occ.head())) == occ.width()
}

/// Random graph with an odd cycle cut: a random bipartite `X_B`, a head
/// attached anywhere and a random rest that only touches the head.
pub fn random_occ_instance(
    rng: &mut impl Rng,
    bipartite: usize,
    head: usize,
    rest: usize,
    p: f64,
) -> (Graph, Occ) {
    let n = bipartite + head + rest;
    let xb: Vec<Vertex> = (0..bipartite).collect();
    let xc: Vec<Vertex> = (bipartite..bipartite + head).collect();
    let xr: Vec<Vertex> = (bipartite + head..n).collect();
    let side: Vec<bool> = (0..bipartite).map(|_| rng.gen_bool(0.5)).collect();
    let mut edges = Vec::new();
    for (&u, &v) in xb.iter().tuple_combinations() {
        if side[u] != side[v] && rng.gen_bool(p) {
            edges.push((u, v));
        }
    }
    for &c in &xc {
        for &u in xb.iter().chain(&xr) {
            if rng.gen_bool(p) {
                edges.push((c, u));
            }
        }
    }
    for (&u, &v) in xc.iter().tuple_combinations().chain(xr.iter().tuple_combinations()) {
        if rng.gen_bool(p) {
            edges.push((u, v));
        }
    }
    let g = Graph::from_edges(n, edges).unwrap();
    let p = Partition3::new(xb.into_iter().collect(), xc.into_iter().collect(), xr.into_iter().collect());
    let occ = validate_occ(&g, &p).unwrap();
    (g, occ)
}

/// The tight OCC with head `(A_C \ X_B) ∪ S` obtained from a tight OCC `a`
/// by swapping `A_C ∩ X_B` for a minimum imposed separator `S ⊆ B*`.
pub struct MarkedOcc {
    pub occ: Occ,
    pub separator: VertexSet,
    pub imposed: (VertexSet, VertexSet, VertexSet),
}

pub fn marked_tight_occ(
    g: &Graph,
    x: &Occ,
    b_star: &VertexSet,
    f_x: &TwoColoring,
    a: &Occ,
) -> Option<MarkedOcc> {
    let xb = x.bipartite();
    let f_a = two_coloring(g, a.bipartite()).ok()?;
    let c1 = x.head().intersection(a.bipartite());
    let c2 = x.head().intersection(a.rest());
    let input = ImposedSeparationInput { f_b: f_x.clone(), c1, f_c: f_a, c2 };
    let (ia, ir, inn) = imposed_separation(g, x, &input).ok()?;
    let local = g.induced(xb);
    let adj = adjacency(&local);
    let sets = [to_mask(&ia), to_mask(&ir), to_mask(&inn)];
    let candidates: Vec<Vertex> = b_star.intersection(xb).to_vec();
    let s = min_separator_among(&adj, to_mask(xb), &candidates, &sets, candidates.len())?;
    let open = xb.difference(&s);
    let from_n: VertexSet = components(&local, &open)
        .into_iter()
        .filter(|c| !c.is_disjoint(&inn))
        .flat_map(|c| c.to_vec())
        .collect();
    let u = open.difference(&from_n);
    let head = a.head().difference(xb).union(&s);
    let bip = a.bipartite().difference(xb).union(&u);
    let rest = g.all_vertices().difference(&head).difference(&bip);
    let occ = validate_occ(g, &Partition3::new(bip, head, rest)).ok()?;
    Some(MarkedOcc { occ, separator: s, imposed: (ia, ir, inn) })
}

/// Carries an odd cycle cut of `g` whose head avoids the removed vertices
/// over to the reduced graph.
pub fn forward_transfer(out: &ReductionOutcome, a: &Occ) -> Option<Occ> {
    let g2 = &out.reduced;
    let common = &out.common_vertices;
    let kept_b = a.bipartite().intersection(common);
    let ends = a.head().union(&kept_b);
    let mut bip = kept_b.clone();
    for ((u, v, _p), ids) in &out.replacement_paths {
        if ends.contains(u) && ends.contains(v) {
            for &x in ids {
                bip.insert(x);
            }
        }
    }
    let head = a.head().clone();
    let rest = g2.all_vertices().difference(&head).difference(&bip);
    validate_occ(g2, &Partition3::new(bip, head, rest)).ok()
}

pub fn parity_of(p: Parity) -> usize {
    match p {
        Parity::Even => 0,
        Parity::Odd => 1,
    }
}

/// Whether a simple `(u, v)`-path of the given edge parity with all inner
/// vertices in `interior` exists. For `u = v` this asks for a cycle
/// through `u`, which needs at least two inner vertices.
pub fn parity_path(g: &Graph, interior: &VertexSet, u: Vertex, v: Vertex, parity: usize) -> bool {
    fn extend(g: &Graph, interior: &VertexSet, path: &mut Vec<Vertex>, u: Vertex, v: Vertex, parity: usize) -> bool {
        let last = *path.last().expect("non-empty path");
        let inner = path.len();
        if g.has_edge(last, v) && (inner + 1) % 2 == parity && (u != v || inner >= 2) {
            return true;
        }
        for &y in g.neighbors(last) {
            if interior.contains(&y) && !path.contains(&y) {
                path.push(y);
                if extend(g, interior, path, u, v, parity) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    g.neighbors(u).iter().filter(|x| interior.contains(x)).any(|&x| extend(g, interior, &mut vec![x], u, v, parity))
}

/// Per-vertex invariant used to bucket graphs and prune isomorphism search.
fn vertex_signatures(adj: &[u16]) -> Vec<(u32, Vec<u32>)> {
    adj.iter()
        .map(|&a| {
            let mut nd: Vec<u32> = (0..adj.len()).filter(|&u| a >> u & 1 == 1).map(|u| adj[u].count_ones()).collect();
            nd.sort_unstable();
            (a.count_ones(), nd)
        })
        .collect()
}

fn isomorphic(a: &[u16], b: &[u16], sa: &[(u32, Vec<u32>)], sb: &[(u32, Vec<u32>)]) -> bool {
    fn extend(a: &[u16], b: &[u16], sa: &[(u32, Vec<u32>)], sb: &[(u32, Vec<u32>)], map: &mut Vec<usize>, used: u16) -> bool {
        let v = map.len();
        if v == a.len() {
            return true;
        }
        for w in 0..b.len() {
            if used >> w & 1 == 1 || sa[v] != sb[w] {
                continue;
            }
            let consistent = (0..v).all(|u| (a[v] >> u & 1) == (b[w] >> map[u] & 1));
            if consistent {
                map.push(w);
                if extend(a, b, sa, sb, map, used | 1 << w) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    extend(a, b, sa, sb, &mut Vec::with_capacity(a.len()), 0)
}

/// One graph from every isomorphism class on `n ≤ 10` vertices, built by
/// adding a vertex with every neighborhood to the classes on `n - 1`.
pub fn graph_classes(n: usize) -> Vec<Graph> {
    assert!(n <= 10, "class enumeration is meant for tiny graphs");
    let mut classes: Vec<Vec<u16>> = vec![vec![]];
    for size in 1..=n {
        let mut buckets: std::collections::HashMap<Vec<(u32, Vec<u32>)>, Vec<(Vec<u16>, Vec<(u32, Vec<u32>)>)>> =
            std::collections::HashMap::new();
        let mut next = Vec::new();
        for base in &classes {
            for nb in 0u16..1 << (size - 1) {
                let mut adj = base.clone();
                for (u, row) in adj.iter_mut().enumerate() {
                    *row |= (nb >> u & 1) << (size - 1);
                }
                adj.push(nb);
                let sig = vertex_signatures(&adj);
                let mut key = sig.clone();
                key.sort();
                let bucket = buckets.entry(key).or_default();
                if !bucket.iter().any(|(other, osig)| isomorphic(&adj, other, &sig, osig)) {
                    bucket.push((adj.clone(), sig));
                    next.push(adj);
                }
            }
        }
        classes = next;
    }
    classes
        .into_iter()
        .map(|adj| {
            let edges = (0..n).tuple_combinations().filter(|&(u, v)| adj[u] >> v & 1 == 1);
            Graph::from_edges(n, edges).unwrap()
        })
        .collect()
}
