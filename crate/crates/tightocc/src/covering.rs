//! Deterministic cut covering sets.
//!
//! Given terminals `T`, the computed set `Z ⊇ T` contains a minimum
//! restricted multiway cut for every generalized partition of `T` whose cut
//! fits into `|T|` vertices. Non-terminals are examined one at a time in
//! ascending order and bypassed whenever bypassing them leaves every
//! partition's cut value (capped at `|T| + 1`) unchanged.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::graph::transform::bypass_vertex;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::separators::{rmwc_branching, rmwc_brute, GeneralizedPartition};

/// Label of a terminal in a generalized partition: `Free` is `T0`, `Part(i)`
/// is `T_{i+1}` and `Deleted` is `TX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TerminalLabel {
    Free,
    Part(u8),
    Deleted,
}

/// Generalized partition in label form, indexed like the sorted terminal list.
pub type LabelVector = Vec<TerminalLabel>;

pub fn to_generalized(terminals: &[Vertex], labels: &[TerminalLabel]) -> GeneralizedPartition {
    let parts_needed = labels
        .iter()
        .filter_map(|l| match l {
            TerminalLabel::Part(i) => Some(*i as usize + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut gp = GeneralizedPartition { parts: vec![VertexSet::new(); parts_needed], ..Default::default() };
    for (&t, &l) in terminals.iter().zip(labels) {
        match l {
            TerminalLabel::Free => {
                gp.t0.insert(t);
            }
            TerminalLabel::Part(i) => {
                gp.parts[i as usize].insert(t);
            }
            TerminalLabel::Deleted => {
                gp.tx.insert(t);
            }
        }
    }
    gp
}

/// All generalized `s`-partitions of `t` terminals up to renaming of the
/// classes `T1..Ts`. The cut value does not depend on that naming, so this
/// family covers all `(s+2)^t` partitions.
pub fn canonical_partitions(t: usize, s: usize) -> Vec<LabelVector> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(t);
    extend_canonical(t, s, 0, &mut current, &mut out);
    out
}

fn extend_canonical(
    t: usize,
    s: usize,
    used: usize,
    current: &mut LabelVector,
    out: &mut Vec<LabelVector>,
) {
    if current.len() == t {
        out.push(current.clone());
        return;
    }
    let mut options = vec![TerminalLabel::Free, TerminalLabel::Deleted];
    options.extend((0..(used + 1).min(s)).map(|i| TerminalLabel::Part(i as u8)));
    for label in options {
        let next_used = match label {
            TerminalLabel::Part(i) if i as usize == used => used + 1,
            _ => used,
        };
        current.push(label);
        extend_canonical(t, s, next_used, current, out);
        current.pop();
    }
}

/// Every generalized `s`-partition of `t` terminals, `(s+2)^t` of them.
pub fn all_partitions(t: usize, s: usize) -> Vec<LabelVector> {
    let mut labels = vec![TerminalLabel::Free, TerminalLabel::Deleted];
    labels.extend((0..s).map(|i| TerminalLabel::Part(i as u8)));
    (0..t).map(|_| labels.iter().copied()).multi_cartesian_product().collect()
}

/// Upper bound used by the tests for the size of a covering set.
pub fn covering_size_bound(t: usize, s: usize) -> usize {
    t.saturating_pow(2 * s as u32 + 2).saturating_add(t)
}

/// Cut covering set over every generalized `s`-partition of `t`.
pub fn cut_covering_set(g: &Graph, t: &VertexSet, s: usize) -> VertexSet {
    let family = canonical_partitions(t.len(), s);
    cut_covering_set_for(g, t, &family)
}

/// Cut covering set that only guarantees the partitions in `family`. Label
/// vectors are indexed like the sorted terminal list.
pub fn cut_covering_set_for(g: &Graph, t: &VertexSet, family: &[LabelVector]) -> VertexSet {
    let terminals = t.to_vec();
    let budget = terminals.len() + 1;
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for (i, labels) in family.iter().enumerate() {
        let tx: Vec<bool> = labels.iter().map(|l| *l == TerminalLabel::Deleted).collect();
        groups.entry(tx).or_default().push(i);
    }
    let label_maps: Vec<Vec<Option<usize>>> =
        family.iter().map(|labels| label_map(g.n(), &terminals, labels)).collect();
    // one working graph per deleted class, bypassed vertices applied in place
    let mut bases: Vec<(Graph, Vec<usize>)> = groups
        .into_iter()
        .map(|(tx, members)| {
            let removed: VertexSet =
                terminals.iter().zip(&tx).filter(|(_, &d)| d).map(|(&v, _)| v).collect();
            (g.without(&removed), members)
        })
        .collect();
    let mut values = vec![None; family.len()];
    for (graph, members) in &bases {
        for &i in members {
            values[i] = cut_value(graph, &label_maps[i], budget);
        }
    }
    let is_terminal = t.mask(g.n());
    let mut bypassed = VertexSet::new();
    for v in 0..g.n() {
        if is_terminal[v] {
            continue;
        }
        let mut essential = false;
        let mut trial_graphs = Vec::with_capacity(bases.len());
        for (graph, members) in &bases {
            let trial = if graph.degree(v) == 0 { graph.clone() } else { bypass_vertex(graph, v) };
            if graph.degree(v) > 0 {
                for &i in members {
                    if cut_value(&trial, &label_maps[i], budget) != values[i] {
                        essential = true;
                        break;
                    }
                }
            }
            if essential {
                break;
            }
            trial_graphs.push(trial);
        }
        if !essential {
            bypassed.insert(v);
            for (base, trial) in bases.iter_mut().zip(trial_graphs) {
                base.0 = trial;
            }
        }
    }
    g.all_vertices().difference(&bypassed)
}

fn label_map(n: usize, terminals: &[Vertex], labels: &[TerminalLabel]) -> Vec<Option<usize>> {
    let mut map = vec![None; n];
    for (&t, &l) in terminals.iter().zip(labels) {
        if let TerminalLabel::Part(i) = l {
            map[t] = Some(i as usize);
        }
    }
    map
}

/// Restricted multiway cut value capped at `budget`, `None` above it.
pub(crate) fn cut_value(g: &Graph, label: &[Option<usize>], budget: usize) -> Option<usize> {
    let alive = vec![true; g.n()];
    let candidates = (0..g.n()).filter(|&v| label[v].is_none() && g.degree(v) > 0).count();
    let subsets: usize = (0..=budget.min(candidates))
        .map(|j| binomial(candidates, j))
        .fold(0usize, |a, b| a.saturating_add(b));
    let cut = if g.n() <= 64 && subsets <= 4096 {
        rmwc_brute(g, &alive, label, budget)
    } else {
        rmwc_branching(g, &alive, label, budget)
    };
    cut.map(|c| c.len())
}

fn binomial(n: usize, k: usize) -> usize {
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}
