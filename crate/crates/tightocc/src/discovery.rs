//! Search for odd cycle cuts with a large bipartite part.

use std::ops::ControlFlow;

use itertools::Itertools;
use thiserror::Error;

use crate::coloring::{occ_coloring_from_set, universal_set, BiColor};
use crate::graph::{components, is_bipartite, two_coloring, Graph, Partition3, Vertex, VertexSet};
use crate::occ::{validate_occ, Occ};
use crate::reduction::{DiscoveryFamily, ReductionConfig};
use crate::separators::VertexFlow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscoveryError {
    #[error("seed set is empty")]
    EmptySeed,
    #[error("seed set is not connected")]
    DisconnectedSeed,
    #[error("seed set does not induce a bipartite graph")]
    NonBipartiteSeed,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
}

/// `C ⊇ Z` with `G[C]` bipartite and `N(C) = S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub component: VertexSet,
    pub separator: VertexSet,
}

fn check_seed(g: &Graph, z: &VertexSet) -> Result<(), DiscoveryError> {
    if let Some(&v) = z.last().filter(|&&v| v >= g.n()) {
        return Err(DiscoveryError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if z.is_empty() {
        return Err(DiscoveryError::EmptySeed);
    }
    if components(g, z).len() != 1 {
        return Err(DiscoveryError::DisconnectedSeed);
    }
    if !is_bipartite(g, z) {
        return Err(DiscoveryError::NonBipartiteSeed);
    }
    Ok(())
}

fn separation_from_cut(g: &Graph, z: &VertexSet, cut: &VertexSet) -> Separation {
    let scope = g.all_vertices().difference(cut);
    let anchor = *z.first().expect("seed is non-empty");
    let component = components(g, &scope)
        .into_iter()
        .find(|c| c.contains(&anchor))
        .expect("seed survives the cut");
    let separator = g.neighborhood(&component);
    Separation { component, separator }
}

/// Approximate bipartite separation around `z`. Returns a separation with
/// `|S| ≤ 2k`, or `None` when no separation with `|S| ≤ k` exists.
///
/// Works on the bipartite double cover: a walk from `z` back into `z` with
/// the wrong parity maps to a path between the two copies, so cutting all
/// such paths leaves the component of `z` bipartite.
pub fn bipartite_separation(
    g: &Graph,
    k: usize,
    z: &VertexSet,
) -> Result<Option<Separation>, DiscoveryError> {
    check_seed(g, z)?;
    let coloring = two_coloring(g, z).expect("seed checked bipartite");
    let n = g.n();
    let cover = Graph::from_edges(
        2 * n,
        g.edges().iter().flat_map(|&(u, v)| [(2 * u, 2 * v + 1), (2 * u + 1, 2 * v)]),
    )
    .expect("double cover ids are in range");
    let alive = vec![true; 2 * n];
    let mut heavy = vec![false; 2 * n];
    for &v in z.iter() {
        heavy[2 * v] = true;
        heavy[2 * v + 1] = true;
    }
    let mut net = VertexFlow::new(&cover, &alive, &heavy);
    for &v in z.iter() {
        let side = coloring.get(v).unwrap_or(0) as usize;
        net.attach_source(2 * v + side);
        net.attach_sink(2 * v + 1 - side);
    }
    if net.max_flow(2 * k) > 2 * k {
        return Ok(None);
    }
    let cut: VertexSet = net.min_cut().iter().map(|&c| c / 2).collect();
    Ok(Some(separation_from_cut(g, z, &cut)))
}

/// Exact variant: smallest `S ⊆ V \ Z` with `|S| ≤ k` whose removal leaves
/// the component of `z` bipartite, first by size then lexicographically.
pub fn bipartite_separation_exact(
    g: &Graph,
    k: usize,
    z: &VertexSet,
) -> Result<Option<Separation>, DiscoveryError> {
    check_seed(g, z)?;
    let candidates = g.all_vertices().difference(z).to_vec();
    for size in 0..=k.min(candidates.len()) {
        for cut in candidates.iter().copied().combinations(size) {
            let cut: VertexSet = cut.into_iter().collect();
            let sep = separation_from_cut(g, z, &cut);
            if is_bipartite(g, &sep.component) {
                return Ok(Some(sep));
            }
        }
    }
    Ok(None)
}

/// Looks at the components of the `B` class in ascending order of their
/// smallest vertex and returns the first odd cycle cut grown from one of
/// size at least `ell`.
pub fn find_occ_colored(g: &Graph, k: usize, ell: usize, chi: &[BiColor]) -> Option<Occ> {
    let b_class: VertexSet = g.vertices().filter(|&v| chi[v] == BiColor::B).collect();
    for comp in components(g, &b_class) {
        if comp.len() < ell.max(1) || !is_bipartite(g, &comp) {
            continue;
        }
        let Ok(Some(sep)) = bipartite_separation(g, k, &comp) else { continue };
        let rest = g.all_vertices().difference(&sep.component).difference(&sep.separator);
        let p = Partition3::new(sep.component, sep.separator, rest);
        return Some(validate_occ(g, &p).expect("separation yields an odd cycle cut"));
    }
    None
}

/// Vertices with at least one neighbor.
fn live(g: &Graph) -> Vec<Vertex> {
    g.vertices().filter(|&v| g.degree(v) > 0).collect()
}

fn binomial_sum(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut term = 1u128;
    for j in 0..=k.min(n) {
        total = total.saturating_add(term);
        term = term.saturating_mul((n - j) as u128) / (j as u128 + 1);
    }
    total
}

/// Returns a reducible odd cycle cut whose bipartite part is connected, or
/// `None` when no such cut of width at most `k` with more than `g_r(2k)`
/// bipartite vertices exists.
pub fn find_reducible_occ(g: &Graph, k: usize, cfg: &ReductionConfig) -> Option<Occ> {
    let gr = cfg.g_r(2 * k as u64);
    let live = live(g);
    if gr >= live.len() as u64 {
        return None;
    }
    let ell = gr as usize + 1;
    let s = (k + ell).min(g.n());
    let small_heads = binomial_sum(live.len(), k);
    let family = match cfg.discovery {
        DiscoveryFamily::SmallHeads => DiscoveryFamily::SmallHeads,
        DiscoveryFamily::UniversalSet => DiscoveryFamily::UniversalSet,
        DiscoveryFamily::Auto => match universal_set(g.n(), s) {
            Ok(fam) if fam.len() < small_heads => DiscoveryFamily::UniversalSet,
            _ => DiscoveryFamily::SmallHeads,
        },
    };
    let accept = |occ: Occ| cfg.is_reducible(&occ).then_some(occ);
    match family {
        DiscoveryFamily::UniversalSet => {
            let fam = universal_set(g.n(), s).ok()?;
            let mut found = None;
            let _ = fam.for_each_member(|member| {
                let heads: VertexSet = member.ones().collect();
                let chi = occ_coloring_from_set(g.n(), &heads);
                match find_occ_colored(g, k, ell, &chi).and_then(accept) {
                    Some(occ) => {
                        found = Some(occ);
                        ControlFlow::Break(())
                    }
                    None => ControlFlow::Continue(()),
                }
            });
            found
        }
        _ => {
            for size in 0..=k.min(live.len()) {
                for heads in live.iter().copied().combinations(size) {
                    let heads: VertexSet = heads.into_iter().collect();
                    let mut chi = occ_coloring_from_set(g.n(), &heads);
                    for v in g.vertices().filter(|&v| g.degree(v) == 0) {
                        chi[v] = BiColor::C;
                    }
                    if let Some(occ) = find_occ_colored(g, k, ell, &chi).and_then(accept) {
                        return Some(occ);
                    }
                }
            }
            None
        }
    }
}
