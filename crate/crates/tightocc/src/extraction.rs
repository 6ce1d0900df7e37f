//! Extraction of tight odd cycle cuts from vertex and edge colorings, and
//! the end-to-end pipeline built on it.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{universal_function_family, ColoringError};
use crate::discovery::find_reducible_occ;
use crate::graph::io::{parse_number, ParseError};
use crate::graph::{components, is_bipartite, Edge, Graph, Partition3, Vertex, VertexSet};
use crate::occ::{validate_occ, Certificate, TightOcc};
use crate::oct::oct_compress;
use crate::reduction::{live_vertex_count, reduce_occ_with, ReductionConfig, ReductionError};

/// Color of a vertex or an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tri {
    B,
    C,
    R,
}

impl Tri {
    fn parse(token: &str) -> Option<Tri> {
        match token {
            "B" => Some(Tri::B),
            "C" => Some(Tri::C),
            "R" => Some(Tri::R),
            _ => None,
        }
    }

    fn letter(self) -> char {
        match self {
            Tri::B => 'B',
            Tri::C => 'C',
            Tri::R => 'R',
        }
    }
}

/// Coloring of the vertices and edges of a fixed graph. Edge colors are
/// indexed like [`Graph::edges`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriColoring {
    vertex_colors: Vec<Tri>,
    edge_colors: Vec<Tri>,
}

impl TriColoring {
    pub fn uniform(g: &Graph, color: Tri) -> Self {
        Self { vertex_colors: vec![color; g.n()], edge_colors: vec![color; g.m()] }
    }

    /// Colors from a value vector over vertices followed by edges:
    /// `0 → B`, `1 → R`, `2 → C`.
    pub fn from_values(g: &Graph, values: &[u8]) -> Self {
        let color = |x: u8| match x {
            0 => Tri::B,
            1 => Tri::R,
            _ => Tri::C,
        };
        let vertex_colors = values[..g.n()].iter().map(|&x| color(x)).collect();
        let edge_colors = values[g.n()..g.n() + g.m()].iter().map(|&x| color(x)).collect();
        Self { vertex_colors, edge_colors }
    }

    /// Coloring that properly colors `t`: the partition gives the vertex
    /// colors, edges of the certificate (or of `G[A_B ∪ A_C]` without one)
    /// are kept and everything else is `R`.
    pub fn from_tight_occ(g: &Graph, t: &TightOcc) -> Self {
        let mut chi = Self::uniform(g, Tri::R);
        for &v in t.occ.bipartite().iter() {
            chi.vertex_colors[v] = Tri::B;
        }
        for &v in t.occ.head().iter() {
            chi.vertex_colors[v] = Tri::C;
        }
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            let kept = match &t.certificate {
                Some(cert) => cert.edges.contains(&(u, v)),
                None => chi.vertex_colors[u] != Tri::R && chi.vertex_colors[v] != Tri::R,
            };
            if kept {
                let touches_head = chi.vertex_colors[u] == Tri::C || chi.vertex_colors[v] == Tri::C;
                chi.edge_colors[i] = if touches_head { Tri::C } else { Tri::B };
            }
        }
        chi
    }

    pub fn vertex(&self, v: Vertex) -> Tri {
        self.vertex_colors[v]
    }

    pub fn edge_by_index(&self, i: usize) -> Tri {
        self.edge_colors[i]
    }

    pub fn set_vertex(&mut self, v: Vertex, color: Tri) {
        self.vertex_colors[v] = color;
    }

    /// Returns false when `uv` is not an edge.
    pub fn set_edge(&mut self, g: &Graph, u: Vertex, v: Vertex, color: Tri) -> bool {
        match g.edge_index(u, v) {
            Some(i) => {
                self.edge_colors[i] = color;
                true
            }
            None => false,
        }
    }

    pub fn class(&self, color: Tri) -> VertexSet {
        (0..self.vertex_colors.len()).filter(|&v| self.vertex_colors[v] == color).collect()
    }

    pub fn fits(&self, g: &Graph) -> bool {
        self.vertex_colors.len() == g.n() && self.edge_colors.len() == g.m()
    }

    /// Lines `v <id> <B|C|R>` and `e <u> <v> <B|C|R>`; unlisted elements
    /// are `R`.
    pub fn parse(g: &Graph, text: &str) -> Result<TriColoring, ParseError> {
        let mut chi = Self::uniform(g, Tri::R);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            let color = |token: Option<&&str>| {
                token
                    .and_then(|t| Tri::parse(t))
                    .ok_or_else(|| ParseError::syntax(line, "expected color B, C or R"))
            };
            match tokens.first().copied() {
                Some("v") if tokens.len() == 3 => {
                    let v: usize = parse_number(tokens[1], line)?;
                    if v >= g.n() {
                        return Err(ParseError::syntax(line, format!("vertex {v} out of range")));
                    }
                    chi.vertex_colors[v] = color(tokens.get(2))?;
                }
                Some("e") if tokens.len() == 4 => {
                    let u: usize = parse_number(tokens[1], line)?;
                    let v: usize = parse_number(tokens[2], line)?;
                    let c = color(tokens.get(3))?;
                    if !chi.set_edge(g, u, v, c) {
                        return Err(ParseError::syntax(line, format!("{u}-{v} is not an edge")));
                    }
                }
                _ => return Err(ParseError::syntax(line, "expected `v <id> <color>` or `e <u> <v> <color>`")),
            }
        }
        Ok(chi)
    }

    /// Writes every element that is not `R`.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (v, c) in self.vertex_colors.iter().enumerate() {
            if *c != Tri::R {
                out.push_str(&format!("v {v} {}\n", c.letter()));
            }
        }
        for (&(u, v), c) in g.edges().iter().zip(&self.edge_colors) {
            if *c != Tri::R {
                out.push_str(&format!("e {u} {v} {}\n", c.letter()));
            }
        }
        out
    }
}

/// Result of [`extract_tight_occ_traced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub tight: Option<TightOcc>,
    /// Number of times unmarked head candidates were recolored.
    pub restarts: usize,
    pub final_coloring: TriColoring,
}

pub fn extract_tight_occ(g: &Graph, z: usize, chi: &TriColoring) -> Option<TightOcc> {
    extract_tight_occ_traced(g, z, chi).tight
}

struct ColoredView {
    /// `G_χ`: vertices and edges colored `R` removed.
    graph: Graph,
    /// Components of `G_χ[B]` with their neighborhoods in `G_χ`.
    b_parts: Vec<(VertexSet, VertexSet)>,
}

impl ColoredView {
    fn new(g: &Graph, vc: &[Tri], ec: &[Tri]) -> Self {
        let kept: Vec<Edge> = g
            .edges()
            .iter()
            .zip(ec)
            .filter(|(&(u, v), &c)| c != Tri::R && vc[u] != Tri::R && vc[v] != Tri::R)
            .map(|(&e, _)| e)
            .collect();
        let graph = Graph::from_edges(g.n(), kept).expect("subgraph of a valid graph");
        let b_class: VertexSet = (0..g.n()).filter(|&v| vc[v] == Tri::B).collect();
        let b_parts = components(&graph, &b_class)
            .into_iter()
            .map(|c| {
                let nb = graph.neighborhood(&c);
                (c, nb)
            })
            .collect();
        Self { graph, b_parts }
    }

    /// `W_χ(C)` without the components that have no neighbors at all.
    fn w(&self, heads: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new();
        for (part, nb) in &self.b_parts {
            if !nb.is_empty() && nb.is_subset(heads) {
                out.extend_from(part);
            }
        }
        out
    }
}

/// Refines `chi` until its `B` and `C` classes form a tight odd cycle cut
/// of order `z`, or nothing is left.
pub fn extract_tight_occ_traced(g: &Graph, z: usize, chi: &TriColoring) -> Extraction {
    assert!(chi.fits(g), "coloring does not match the graph");
    let mut vc = chi.vertex_colors.clone();
    let mut ec = chi.edge_colors.clone();
    let mut restarts = 0;
    loop {
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            if vc[u] == Tri::R || vc[v] == Tri::R {
                ec[i] = Tri::R;
            }
        }
        let b_class: VertexSet = g.vertices().filter(|&v| vc[v] == Tri::B).collect();
        for comp in components(g, &b_class) {
            let escapes = g.neighborhood(&comp).iter().any(|&u| vc[u] != Tri::C);
            if escapes || !is_bipartite(g, &comp) {
                for &v in comp.iter() {
                    vc[v] = Tri::R;
                }
                for (i, &(u, v)) in g.edges().iter().enumerate() {
                    if comp.contains(&u) || comp.contains(&v) {
                        ec[i] = Tri::R;
                    }
                }
            }
        }
        let view = ColoredView::new(g, &vc, &ec);
        let marked_sets = mark_heads(&view, &vc, z);
        let marked: VertexSet = marked_sets.iter().flat_map(|c| c.iter().copied()).collect();
        let unmarked: Vec<Vertex> =
            g.vertices().filter(|&v| vc[v] == Tri::C && !marked.contains(&v)).collect();
        if !unmarked.is_empty() {
            for v in unmarked {
                vc[v] = Tri::R;
            }
            restarts += 1;
            continue;
        }
        let final_coloring = TriColoring { vertex_colors: vc.clone(), edge_colors: ec.clone() };
        let bipartite = final_coloring.class(Tri::B);
        let head = final_coloring.class(Tri::C);
        if bipartite.is_empty() && head.is_empty() {
            return Extraction { tight: None, restarts, final_coloring };
        }
        let rest = final_coloring.class(Tri::R);
        let occ = validate_occ(g, &Partition3::new(bipartite, head, rest))
            .expect("refined coloring forms an odd cycle cut");
        let certificate = Some(assemble_certificate(&view, &marked_sets));
        let tight = TightOcc { occ, order: z, certificate };
        return Extraction { tight: Some(tight), restarts, final_coloring };
    }
}

/// Sets `C` of at most `z` head candidates with `oct(G_χ[C ∪ W_χ(C)]) = |C|`,
/// enumerated inside the components of `G_χ` only. Subsets of already
/// marked vertices are skipped.
fn mark_heads(view: &ColoredView, vc: &[Tri], z: usize) -> Vec<VertexSet> {
    let live: VertexSet = (0..vc.len()).filter(|&v| vc[v] != Tri::R).collect();
    let mut marked = VertexSet::new();
    let mut sets = Vec::new();
    for comp in components(&view.graph, &live) {
        let candidates: Vec<Vertex> = comp.iter().copied().filter(|&v| vc[v] == Tri::C).collect();
        for size in 1..=z.min(candidates.len()) {
            for subset in candidates.iter().copied().combinations(size) {
                if subset.iter().all(|v| marked.contains(v)) {
                    continue;
                }
                let heads: VertexSet = subset.into_iter().collect();
                let scope = heads.union(&view.w(&heads));
                if oct_compress(&view.graph.induced(&scope), size - 1).is_none() {
                    marked.extend_from(&heads);
                    sets.push(heads);
                }
            }
        }
    }
    sets
}

/// Disjoint union of `G_χ[D_i ∪ (W_χ(C_≤i) \ W_χ(C_<i))]` with
/// `D_i = C_i \ C_<i` over the marked sets in order.
fn assemble_certificate(view: &ColoredView, marked_sets: &[VertexSet]) -> Certificate {
    let mut seen_heads = VertexSet::new();
    let mut seen_w = VertexSet::new();
    let mut vertices = VertexSet::new();
    let mut edges = BTreeSet::new();
    for c in marked_sets {
        let d = c.difference(&seen_heads);
        seen_heads.extend_from(c);
        let w_all = view.w(&seen_heads);
        let fresh = w_all.difference(&seen_w);
        seen_w = w_all;
        let piece = d.union(&fresh);
        for &(u, v) in view.graph.edges() {
            if piece.contains(&u) && piece.contains(&v) {
                edges.insert((u, v));
            }
        }
        vertices.extend_from(&piece);
    }
    Certificate::new(vertices, edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("order z = {z} exceeds k = {k}")]
    OrderAboveWidth { k: usize, z: usize },
    #[error("hint does not match the graph")]
    HintMismatch,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOptions {
    pub config: ReductionConfig,
    /// Upper bound on reduction rounds; `None` runs to a fixed point.
    pub max_rounds: Option<usize>,
    /// Upper bound on colorings tried; hitting it makes the run inconclusive.
    pub max_colorings: Option<u128>,
    pub jobs: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { config: ReductionConfig::default(), max_rounds: None, max_colorings: None, jobs: 1 }
    }
}

/// Known-good input that replaces the coloring family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineHint {
    Coloring(TriColoring),
    Occ(TightOcc),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineOutcome {
    Found,
    /// The whole family was tried without finding a wide enough head.
    NoZocc,
    /// The coloring budget ran out first.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub outcome: PipelineOutcome,
    pub selected: VertexSet,
    pub width_found: usize,
    pub reduction_rounds: usize,
    pub colorings_tried: u128,
    pub vertices_before: usize,
    pub vertices_after: usize,
    pub elapsed: Duration,
}

struct Reduced {
    graph: Graph,
    rounds: usize,
}

fn reduce_to_fixed_point(
    g: &Graph,
    k: usize,
    opts: &PipelineOptions,
) -> Result<Reduced, PipelineError> {
    let mut graph = g.clone();
    let mut rounds = 0;
    while opts.max_rounds.is_none_or(|m| rounds < m) {
        let Some(occ) = find_reducible_occ(&graph, k, &opts.config) else { break };
        let out = reduce_occ_with(&graph, &occ, &opts.config)?;
        if live_vertex_count(&out.reduced) >= live_vertex_count(&graph) {
            break;
        }
        graph = out.reduced;
        rounds += 1;
    }
    Ok(Reduced { graph, rounds })
}

/// Heads found on `reduced` only count when they lie inside the input graph.
fn accept_head(t: &TightOcc, k: usize, original_n: usize) -> Option<VertexSet> {
    let head = t.occ.head();
    (head.len() >= k && head.iter().all(|&v| v < original_n)).then(|| head.clone())
}

/// Finds at least `k` vertices of some optimal odd cycle transversal, or
/// reports that no tight odd cycle cut of width `k` and order `z` exists.
pub fn pipeline(
    g: &Graph,
    k: usize,
    z: usize,
    opts: &PipelineOptions,
) -> Result<PipelineReport, PipelineError> {
    if z > k {
        return Err(PipelineError::OrderAboveWidth { k, z });
    }
    let start = Instant::now();
    let reduced = reduce_to_fixed_point(g, k, opts)?;
    let h = &reduced.graph;
    let domain = h.n() + h.m();
    let budget = opts.config.coloring_budget(k as u64, z as u64).min(domain as u64) as usize;
    let family = universal_function_family(domain, 3, budget)?;
    let jobs = opts.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    let batch_size = if jobs == 1 { 1 } else { 16 * jobs };
    let mut tried: u128 = 0;
    let mut batch: Vec<Vec<u8>> = Vec::with_capacity(batch_size);
    let mut found: Option<VertexSet> = None;
    let mut exhausted_budget = false;
    let run_batch = |batch: &mut Vec<Vec<u8>>, tried: &mut u128| -> Option<VertexSet> {
        let results: Vec<Option<VertexSet>> = pool.install(|| {
            batch
                .par_iter()
                .map(|values| {
                    let chi = TriColoring::from_values(h, values);
                    extract_tight_occ(h, z, &chi).and_then(|t| accept_head(&t, k, g.n()))
                })
                .collect()
        });
        let hit = results.iter().position(Option::is_some);
        *tried += hit.map_or(batch.len(), |i| i + 1) as u128;
        batch.clear();
        hit.and_then(|i| results[i].clone())
    };
    let _ = family.for_each(|values| {
        if opts.max_colorings.is_some_and(|cap| tried + batch.len() as u128 >= cap) {
            exhausted_budget = true;
            return ControlFlow::Break(());
        }
        batch.push(values.to_vec());
        if batch.len() == batch_size {
            if let Some(head) = run_batch(&mut batch, &mut tried) {
                found = Some(head);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if found.is_none() && !batch.is_empty() {
        found = run_batch(&mut batch, &mut tried);
    }
    let outcome = match (&found, exhausted_budget) {
        (Some(_), _) => PipelineOutcome::Found,
        (None, true) => PipelineOutcome::Inconclusive,
        (None, false) => PipelineOutcome::NoZocc,
    };
    let selected = found.unwrap_or_default();
    Ok(PipelineReport {
        outcome,
        width_found: selected.len(),
        selected,
        reduction_rounds: reduced.rounds,
        colorings_tried: tried,
        vertices_before: live_vertex_count(g),
        vertices_after: live_vertex_count(h),
        elapsed: start.elapsed(),
    })
}

/// Same contract as [`pipeline`] with the coloring family replaced by a
/// single coloring of `g`. Discovery and reduction are skipped since the
/// hint refers to the input graph.
pub fn pipeline_hinted(
    g: &Graph,
    k: usize,
    z: usize,
    hint: &PipelineHint,
) -> Result<PipelineReport, PipelineError> {
    if z > k {
        return Err(PipelineError::OrderAboveWidth { k, z });
    }
    let start = Instant::now();
    let chi = match hint {
        PipelineHint::Coloring(chi) => chi.clone(),
        PipelineHint::Occ(t) => {
            validate_occ(g, &t.occ.partition()).map_err(|_| PipelineError::HintMismatch)?;
            TriColoring::from_tight_occ(g, t)
        }
    };
    if !chi.fits(g) {
        return Err(PipelineError::HintMismatch);
    }
    let found = extract_tight_occ(g, z, &chi).and_then(|t| accept_head(&t, k, g.n()));
    let outcome = if found.is_some() { PipelineOutcome::Found } else { PipelineOutcome::NoZocc };
    let selected = found.unwrap_or_default();
    Ok(PipelineReport {
        outcome,
        width_found: selected.len(),
        selected,
        reduction_rounds: 0,
        colorings_tried: 1,
        vertices_before: live_vertex_count(g),
        vertices_after: live_vertex_count(g),
        elapsed: start.elapsed(),
    })
}
