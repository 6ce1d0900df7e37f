mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use tightocc::discovery::find_reducible_occ;
use tightocc::graph::{Graph, Vertex, VertexSet};
use tightocc::instances::{gen_planted, PlantedSpec};
use tightocc::occ::Occ;
use tightocc::reduction::{
    live_vertex_count, mark_b_star, parity_connection, reduce_occ, Parity, ReductionConfig,
};

/// Graph whose `interior` (label 0 or 1) is bipartite with those sides;
/// label 2 marks outside vertices.
fn graph_with_bipartite_interior(n: usize, labels: &[u8], flags: &[bool]) -> (Graph, VertexSet) {
    let mut edges = Vec::new();
    let mut i = 0;
    for u in 0..n {
        for v in u + 1..n {
            let keep = flags[i] && !(labels[u] < 2 && labels[u] == labels[v]);
            if keep {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    let interior = (0..n).filter(|&v| labels[v] < 2).collect();
    (Graph::from_edges(n, edges).unwrap(), interior)
}

fn small_instance(seed: u64) -> (Graph, Occ) {
    let mut rng = rng(seed);
    let bip = rng.gen_range(3..=6);
    let head = rng.gen_range(1..=2);
    let rest = rng.gen_range(0..=2);
    let p = rng.gen_range(0.3..0.7);
    random_occ_instance(&mut rng, bip, head, rest, p)
}

/// Tight OCCs of `g`, found by brute force.
fn tight_occs(g: &Graph) -> Vec<Occ> {
    all_occs(g).into_iter().filter(|o| is_tight(g, o)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn parity_connection_matches_paths(
        labels in proptest::collection::vec(0u8..3, 10),
        flags in proptest::collection::vec(any::<bool>(), 45),
        u in 0usize..10,
        v in 0usize..10,
    ) {
        let mut labels = labels;
        labels[u] = 2;
        labels[v] = 2;
        let (g, interior) = graph_with_bipartite_interior(10, &labels, &flags);
        for p in [Parity::Even, Parity::Odd] {
            let expected = parity_path(&g, &interior, u, v, parity_of(p));
            prop_assert_eq!(parity_connection(&g, &interior, u, v, p), expected, "{:?}", p);
        }
    }

    #[test]
    fn replacement_paths_match_oracle(seed in any::<u64>()) {
        let (g, occ) = small_instance(seed);
        let out = reduce_occ(&g, &occ).unwrap();
        prop_assert!(out.b_star.is_subset(occ.bipartite()));
        prop_assert_eq!(&out.removed, &occ.bipartite().difference(&out.b_star));
        let keep = occ.head().union(&out.b_star).to_vec();
        let mut expected = BTreeSet::new();
        for (i, &u) in keep.iter().enumerate() {
            for &v in &keep[i..] {
                for p in [Parity::Even, Parity::Odd] {
                    if parity_path(&g, &out.removed, u, v, parity_of(p)) {
                        expected.insert((u, v, p));
                    }
                }
            }
        }
        let got: BTreeSet<_> = out.replacement_paths.keys().copied().collect();
        prop_assert_eq!(got, expected);
        // kept edges plus the two parallel paths of every entry
        let mut edges: BTreeSet<(Vertex, Vertex)> = g
            .edges()
            .iter()
            .copied()
            .filter(|(a, b)| !out.removed.contains(a) && !out.removed.contains(b))
            .collect();
        let mut fresh = g.n();
        for ((u, v, p), ids) in &out.replacement_paths {
            let inner = if *p == Parity::Even { 1 } else { 2 };
            prop_assert_eq!(ids.len(), 2 * inner);
            prop_assert_eq!(ids.clone(), (fresh..fresh + 2 * inner).collect::<Vec<_>>());
            fresh += 2 * inner;
            for path in ids.chunks(inner) {
                let mut walk = vec![*u];
                walk.extend_from_slice(path);
                walk.push(*v);
                for w in walk.windows(2) {
                    if w[0] != w[1] {
                        edges.insert((w[0].min(w[1]), w[0].max(w[1])));
                    }
                }
            }
        }
        prop_assert_eq!(out.reduced.n(), fresh);
        prop_assert_eq!(out.reduced.edges().iter().copied().collect::<BTreeSet<_>>(), edges);
        prop_assert!(out.sidecar().lines().filter(|l| l.starts_with("q ")).count() == out.replacement_paths.len());
    }

    #[test]
    fn odd_cycles_survive_on_shared_vertices(seed in any::<u64>()) {
        let (g, occ) = small_instance(seed);
        let out = reduce_occ(&g, &occ).unwrap();
        prop_assume!(out.reduced.n() <= 128);
        let common = out.common_vertices.to_vec();
        prop_assume!(common.len() <= 12);
        let (adj, adj2) = (adjacency(&g), adjacency(&out.reduced));
        let all = (1u128 << g.n()) - 1;
        let all2 = if out.reduced.n() == 128 { u128::MAX } else { (1u128 << out.reduced.n()) - 1 };
        for bits in 0u32..1 << common.len() {
            let s = common.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(0u128, |m, (_, &v)| m | bit(v));
            prop_assert_eq!(bipartite_on(&adj, all & !s), bipartite_on(&adj2, all2 & !s), "deleted {}", from_mask(s));
        }
    }

    #[test]
    fn minimum_octs_of_reduced_graph_are_safe(seed in any::<u64>()) {
        let (g, occ) = small_instance(seed);
        let out = reduce_occ(&g, &occ).unwrap();
        prop_assume!(out.reduced.n() <= 40);
        let (size, octs) = min_octs(&out.reduced, true);
        prop_assert_eq!(size, oct_size(&g));
        let new_vertices = out.new_vertices();
        for s in octs {
            prop_assert!(s.is_disjoint(&new_vertices));
            prop_assert!(is_oct(&g, &s));
        }
    }

    #[test]
    fn tight_cuts_move_into_marked_set(seed in any::<u64>()) {
        let (g, x) = small_instance(seed);
        prop_assume!(g.n() <= 9);
        let marking = mark_b_star(&g, &x).unwrap();
        let out = reduce_occ(&g, &x).unwrap();
        prop_assert_eq!(&marking.b_star, &out.b_star);
        // a width-0 cut may lose its whole bipartite part, and G' then has
        // other width-0 cuts, so only cuts with a head are transferred
        for a in tight_occs(&g).into_iter().filter(|a| a.width() > 0) {
            let marked = marked_tight_occ(&g, &x, &marking.b_star, &marking.f_x, &a);
            prop_assert!(marked.is_some(), "no marked cut for {:?}", a);
            let marked = marked.unwrap();
            let star = &marked.occ;
            prop_assert_eq!(star.width(), a.width());
            prop_assert!(is_tight(&g, star));
            prop_assert!(star.head().intersection(x.bipartite()).is_subset(&marking.b_star));
            prop_assert!(a.bipartite().union(a.head()).is_subset(&star.bipartite().union(star.head())));
            let moved = forward_transfer(&out, star);
            prop_assert!(moved.is_some(), "transfer failed for {:?}", star);
            let moved = moved.unwrap();
            prop_assert_eq!(moved.width(), a.width());
            prop_assume!(out.reduced.n() <= 40);
            prop_assert!(is_tight(&out.reduced, &moved));
        }
    }

    #[test]
    fn marked_set_covers_imposed_problems(seed in any::<u64>()) {
        let (g, x) = small_instance(seed);
        let marking = mark_b_star(&g, &x).unwrap();
        let xb = x.bipartite();
        let local = g.induced(xb);
        let adj = adjacency(&local);
        let head = x.head().to_vec();
        let candidates = marking.b_star.to_vec();
        // each head vertex is in C1 with color 0 or 1, in C2, or deleted
        for code in 0u32..4u32.pow(head.len() as u32) {
            let (mut a, mut r, mut nn) = (0u128, 0u128, 0u128);
            for (i, &h) in head.iter().enumerate() {
                let role = code / 4u32.pow(i as u32) % 4;
                for &w in g.neighbors(h).iter().filter(|w| xb.contains(w)) {
                    let side = marking.f_x.get(w).unwrap() as u32;
                    match role {
                        0 | 1 if side == role => a |= bit(w),
                        0 | 1 => r |= bit(w),
                        2 => nn |= bit(w),
                        _ => {}
                    }
                }
            }
            let everything: Vec<Vertex> = xb.to_vec();
            let sets = [a, r, nn];
            let best = min_separator_among(&adj, to_mask(xb), &everything, &sets, everything.len()).unwrap();
            if best.len() <= 2 * head.len() {
                let inside = min_separator_among(&adj, to_mask(xb), &candidates, &sets, best.len());
                prop_assert_eq!(inside.map(|s| s.len()), Some(best.len()), "role code {}", code);
            }
        }
    }
}

#[test]
fn planted_cut_shrinks_graph() {
    for seed in 0..8 {
        let spec = PlantedSpec { cycle_len: (11, 15), attach_p: 0.4, ..PlantedSpec::new(1, 1).with_rest(4, 0.5) };
        let inst = gen_planted(&spec, seed).unwrap();
        let cfg = ReductionConfig::default();
        let occ = find_reducible_occ(&inst.graph, 1, &cfg).unwrap();
        let out = reduce_occ(&inst.graph, &occ).unwrap();
        assert!(live_vertex_count(&out.reduced) < live_vertex_count(&inst.graph), "seed {seed}");
        assert_eq!(oct_size(&out.reduced), oct_size(&inst.graph));
    }
}

#[test]
fn cycle_through_single_removed_vertex() {
    // head 0 sees both ends of the bipartite path 1-2-3
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let interior: VertexSet = [1, 2, 3].into();
    assert!(parity_connection(&g, &interior, 0, 0, Parity::Even));
    assert!(!parity_connection(&g, &interior, 0, 0, Parity::Odd));
    let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    assert!(parity_connection(&g, &[1, 2].into(), 0, 0, Parity::Odd));
    assert!(!parity_connection(&g, &[1].into(), 0, 0, Parity::Even));
}
