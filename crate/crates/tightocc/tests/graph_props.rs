mod common;

use common::*;
use proptest::prelude::*;
use tightocc::graph::{bypass, components, identify_sets, two_coloring, Graph, OddCycle, VertexSet};

fn arb_scope(n: usize) -> impl Strategy<Value = VertexSet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|m| VertexSet::from_mask(&m))
}

fn graph_and_scope(lo: usize, hi: usize) -> impl Strategy<Value = (Graph, VertexSet)> {
    arb_graph(lo, hi).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), arb_scope(n))
    })
}

/// Edge `xy` belongs to the bypass graph iff it is an edge of `g` or some
/// path from `x` to `y` has all inner vertices in `u`.
fn bypass_oracle(g: &Graph, u: &VertexSet) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in g.vertices().filter(|x| !u.contains(x)) {
        let mut reach = VertexSet::new();
        let mut stack: Vec<usize> = g.neighbors(x).iter().copied().filter(|w| u.contains(w)).collect();
        while let Some(w) = stack.pop() {
            if reach.insert(w) {
                stack.extend(g.neighbors(w).iter().copied().filter(|y| u.contains(y)));
            }
        }
        for y in x + 1..g.n() {
            if u.contains(&y) {
                continue;
            }
            if g.has_edge(x, y) || g.neighbors(y).iter().any(|w| reach.contains(w)) {
                out.push((x, y));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_coloring_matches_odd_cycle_search((g, scope) in graph_and_scope(0, 12)) {
        let adj = adjacency(&g);
        let expected = bipartite_on(&adj, to_mask(&scope));
        match two_coloring(&g, &scope) {
            Ok(c) => {
                prop_assert!(expected);
                prop_assert!(c.is_proper_on(&g, &scope));
            }
            Err(OddCycle(cycle)) => {
                prop_assert!(!expected);
                prop_assert!(cycle.len() % 2 == 1);
                for (i, &v) in cycle.iter().enumerate() {
                    prop_assert!(scope.contains(&v));
                    prop_assert!(g.has_edge(v, cycle[(i + 1) % cycle.len()]));
                }
            }
        }
    }

    #[test]
    fn components_match_masks((g, scope) in graph_and_scope(0, 14)) {
        let adj = adjacency(&g);
        let mut expected: Vec<VertexSet> = component_masks(&adj, to_mask(&scope)).into_iter().map(from_mask).collect();
        expected.sort();
        let mut got = components(&g, &scope);
        got.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn bypass_matches_path_definition((g, u) in graph_and_scope(1, 11)) {
        let b = bypass(&g, &u);
        prop_assert_eq!(b.n(), g.n());
        prop_assert_eq!(b.edges().to_vec(), bypass_oracle(&g, &u));
    }

    #[test]
    fn bypass_composes((g, u) in graph_and_scope(1, 11), split in any::<u64>()) {
        let (u1, u2): (Vec<usize>, Vec<usize>) = u.iter().partition(|&&v| split >> v & 1 == 1);
        let u1: VertexSet = u1.into_iter().collect();
        let u2: VertexSet = u2.into_iter().collect();
        prop_assert_eq!(bypass(&bypass(&g, &u1), &u2), bypass(&g, &u));
    }

    #[test]
    fn identify_preserves_multiway_cuts(g in arb_graph(3, 10), labels in proptest::collection::vec(0usize..5, 10)) {
        // label 0..3 puts a vertex into a part, 3 and 4 leave it free
        let parts: Vec<VertexSet> = (0..3)
            .map(|p| g.vertices().filter(|&v| labels[v] == p).collect())
            .collect();
        let id = identify_sets(&g, &parts).unwrap();
        let singletons: Vec<VertexSet> = id.group_vertex.iter().flatten().map(|&v| VertexSet::singleton(v)).collect();
        let before = rmwc_size(&g, &parts, &VertexSet::new(), None, g.n());
        let after = rmwc_size(&id.graph, &singletons, &VertexSet::new(), None, id.graph.n());
        prop_assert_eq!(before, after);
        prop_assert!(id.graph.edges().iter().all(|&(a, b)| a < b));
    }

    #[test]
    fn text_round_trip(g in arb_graph(0, 20)) {
        prop_assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }
}

#[test]
fn identify_adjacent_groups_gives_one_edge() {
    let g = Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    let id = identify_sets(&g, &[[0, 1].into(), [2, 3].into()]).unwrap();
    assert_eq!(id.graph.n(), 2);
    assert_eq!(id.graph.edges(), &[(0, 1)]);
}

#[test]
fn bypass_inner_path_vertices() {
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let b = bypass(&g, &[1, 2].into());
    assert_eq!(b.edges(), &[(0, 3)]);
}
